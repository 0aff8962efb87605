#include "discrim.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "casekit.hpp"
#include "error.hpp"
#include "expsum.hpp"
#include "verify.hpp"

using discrim::Error;
using discrim::ErrorCode;
using discrim::modarith::u128;
using discrim::modarith::u32;
using discrim::modarith::u64;

struct discrim_cert_list {
    std::vector<discrim::casekit::CollisionCertificate> items;
};

struct discrim_scan_report {
    discrim::verify::ScanReport rep;
};

struct discrim_check_report {
    discrim::expsum::CheckReport rep;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg ? msg : "unknown error"; }

// run a callable, translating exceptions into status codes + message
template <typename F>
int wrap(F&& f) noexcept {
    try {
        f();
        return DISCRIM_OK;
    } catch (const Error& e) {
        set_error(e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        set_error(e.what());
        return DISCRIM_BADARG;
    } catch (...) {
        set_error("unknown error");
        return DISCRIM_BADARG;
    }
}

int require(bool ok, const char* msg) {
    if (!ok) set_error(msg);
    return ok ? DISCRIM_OK : DISCRIM_BADARG;
}

void copy_label(char (&dst)[12], const char* src) {
    std::snprintf(dst, sizeof dst, "%s", src);
}

discrim_certificate to_c(const discrim::casekit::CollisionCertificate& cert) {
    discrim_certificate out{};
    out.n = cert.n;
    out.m = cert.m;
    out.a = cert.a;
    out.b = cert.b;
    out.quotient = cert.quotient;
    copy_label(out.case_label,
               cert.case_used ? discrim::casekit::case_label(cert.case_used->c)
                              : "brute-force");
    return out;
}

discrim_theorem_row to_c(const discrim::verify::TheoremRow& row) {
    return {row.n, row.k, row.d, row.match ? 1 : 0};
}

} // namespace

extern "C" {

const char* discrim_last_error(void) {
    return g_last_error.empty() ? "no error" : g_last_error.c_str();
}

int discrim_k_of(uint64_t n, uint32_t* k_out) {
    if (int rc = require(k_out != nullptr, "k_out is null")) return rc;
    return wrap([&] { *k_out = discrim::verify::k_of(n); });
}

int discrim_d_of(uint64_t n, uint64_t* d_out) {
    if (int rc = require(d_out != nullptr, "d_out is null")) return rc;
    return wrap([&] { *d_out = discrim::verify::d_of(n); });
}

int discrim_check_theorem(uint64_t n, discrim_theorem_row* row_out) {
    if (int rc = require(row_out != nullptr, "row_out is null")) return rc;
    return wrap([&] { *row_out = to_c(discrim::verify::check_theorem(n)); });
}

int discrim_lemma1_check(uint64_t n, int* ok_out) {
    if (int rc = require(ok_out != nullptr, "ok_out is null")) return rc;
    return wrap([&] { *ok_out = discrim::verify::lemma1_check(n) ? 1 : 0; });
}

int discrim_residue_injective(uint64_t n, uint64_t m, uint64_t* a_out, uint64_t* b_out,
                              int* injective_out) {
    if (int rc = require(a_out && b_out && injective_out, "output pointer is null"))
        return rc;
    return wrap([&] {
        auto hit = discrim::verify::residue_injective(n, m);
        *injective_out = hit ? 0 : 1;
        if (hit) {
            *a_out = hit->first;
            *b_out = hit->second;
        }
    });
}

int discrim_classify(uint64_t n, uint64_t m, discrim_case_info* info_out) {
    if (int rc = require(info_out != nullptr, "info_out is null")) return rc;
    return wrap([&] {
        auto range = discrim::casekit::validate_range(n, m);
        if (!range.ok)
            discrim::raise(ErrorCode::Range,
                           std::string("window inequality violated: ") + range.violated);
        auto tag = discrim::casekit::classify(discrim::casekit::factorize(m));
        discrim_case_info info{};
        copy_label(info.label, discrim::casekit::case_label(tag.c));
        info.delta = tag.delta;
        info.p = tag.p;
        info.r = tag.r;
        info.s = tag.s;
        info.has5 = tag.has5 ? 1 : 0;
        *info_out = info;
    });
}

int discrim_collide(uint64_t n, uint64_t m, discrim_certificate* cert_out) {
    if (int rc = require(cert_out != nullptr, "cert_out is null")) return rc;
    return wrap([&] { *cert_out = to_c(discrim::casekit::collide(n, m)); });
}

int discrim_certificate_check(const discrim_certificate* cert, int* ok_out) {
    if (int rc = require(cert && ok_out, "argument is null")) return rc;
    return wrap([&] {
        bool ok = cert->m >= 1 && cert->a >= 1 && cert->a < cert->b && cert->b <= cert->n;
        if (ok) {
            u128 diff = (u128(cert->b) * cert->b * cert->b + cert->b) -
                        (u128(cert->a) * cert->a * cert->a + cert->a);
            u128 msq = u128(cert->m) * cert->m;
            ok = diff % msq == 0 && diff / msq == cert->quotient;
        }
        *ok_out = ok ? 1 : 0;
    });
}

int discrim_lemma2_scan(uint64_t n, discrim_cert_list** list_out) {
    if (int rc = require(list_out != nullptr, "list_out is null")) return rc;
    return wrap([&] {
        auto list = std::make_unique<discrim_cert_list>();
        list->items = discrim::verify::lemma2_scan(n);
        *list_out = list.release();
    });
}

size_t discrim_cert_list_size(const discrim_cert_list* list) {
    return list ? list->items.size() : 0;
}

int discrim_cert_list_get(const discrim_cert_list* list, size_t index,
                          discrim_certificate* cert_out) {
    if (int rc = require(list && cert_out, "argument is null")) return rc;
    if (int rc = require(index < list->items.size(), "certificate index out of range"))
        return rc;
    *cert_out = to_c(list->items[index]);
    return DISCRIM_OK;
}

void discrim_cert_list_free(discrim_cert_list* list) { delete list; }

int discrim_range_scan(uint64_t n_lo, uint64_t n_hi, uint32_t workers,
                       const char* checkpoint_path, discrim_scan_report** report_out) {
    if (int rc = require(report_out != nullptr, "report_out is null")) return rc;
    return wrap([&] {
        auto rep = std::make_unique<discrim_scan_report>();
        rep->rep = discrim::verify::range_scan(
            n_lo, n_hi, workers, checkpoint_path ? std::string(checkpoint_path) : "");
        *report_out = rep.release();
    });
}

size_t discrim_scan_report_size(const discrim_scan_report* report) {
    return report ? report->rep.rows.size() : 0;
}

int discrim_scan_report_get(const discrim_scan_report* report, size_t index,
                            discrim_theorem_row* row_out) {
    if (int rc = require(report && row_out, "argument is null")) return rc;
    if (int rc = require(index < report->rep.rows.size(), "row index out of range"))
        return rc;
    *row_out = to_c(report->rep.rows[index]);
    return DISCRIM_OK;
}

int discrim_scan_report_stats(const discrim_scan_report* report, uint64_t* n_lo_out,
                              uint64_t* n_hi_out, uint64_t* failures_out,
                              double* wall_time_s_out, uint32_t* worker_count_out) {
    if (int rc = require(report != nullptr, "report is null")) return rc;
    if (n_lo_out) *n_lo_out = report->rep.n_lo;
    if (n_hi_out) *n_hi_out = report->rep.n_hi;
    if (failures_out) *failures_out = report->rep.failures;
    if (wall_time_s_out) *wall_time_s_out = report->rep.wall_time_s;
    if (worker_count_out) *worker_count_out = report->rep.worker_count;
    return DISCRIM_OK;
}

int discrim_scan_csv(const discrim_scan_report* report, char** csv_out) {
    if (int rc = require(report && csv_out, "argument is null")) return rc;
    return wrap([&] {
        std::string csv = discrim::verify::report_csv(report->rep);
        char* buf = static_cast<char*>(std::malloc(csv.size() + 1));
        if (!buf) discrim::raise(ErrorCode::Budget, "out of memory rendering CSV");
        std::memcpy(buf, csv.c_str(), csv.size() + 1);
        *csv_out = buf;
    });
}

void discrim_scan_report_free(discrim_scan_report* report) { delete report; }

void discrim_string_free(char* s) { std::free(s); }

int discrim_expsum_identity(uint64_t delta, uint64_t p, uint32_t r,
                            discrim_check_report** report_out) {
    if (int rc = require(report_out != nullptr, "report_out is null")) return rc;
    return wrap([&] {
        auto rep = std::make_unique<discrim_check_report>();
        rep->rep = discrim::expsum::identity_suite(discrim::expsum::make_ctx(delta, p, r));
        *report_out = rep.release();
    });
}

int discrim_expsum_bounds(uint64_t delta, uint64_t p, uint32_t r, uint32_t j,
                          discrim_check_report** report_out) {
    if (int rc = require(report_out != nullptr, "report_out is null")) return rc;
    return wrap([&] {
        auto rep = std::make_unique<discrim_check_report>();
        rep->rep =
            discrim::expsum::check_bounds(discrim::expsum::make_ctx(delta, p, r), j);
        *report_out = rep.release();
    });
}

size_t discrim_check_report_size(const discrim_check_report* report) {
    return report ? report->rep.rows.size() : 0;
}

int discrim_check_report_get(const discrim_check_report* report, size_t index,
                             discrim_check_row* row_out) {
    if (int rc = require(report && row_out, "argument is null")) return rc;
    if (int rc = require(index < report->rep.rows.size(), "row index out of range"))
        return rc;
    const auto& row = report->rep.rows[index];
    discrim_check_row out{};
    std::snprintf(out.name, sizeof out.name, "%s", row.name.c_str());
    out.measured = row.measured;
    out.bound = row.bound;
    out.pass = row.pass ? 1 : 0;
    *row_out = out;
    return DISCRIM_OK;
}

int discrim_check_report_all_pass(const discrim_check_report* report, int* all_pass_out) {
    if (int rc = require(report && all_pass_out, "argument is null")) return rc;
    *all_pass_out = report->rep.all_pass() ? 1 : 0;
    return DISCRIM_OK;
}

void discrim_check_report_free(discrim_check_report* report) { delete report; }

int discrim_threshold_check(uint64_t p, uint32_t r, int* check1_out, int* check3_out,
                            double* q_out, double* f_q_out) {
    if (int rc = require(check1_out && check3_out && q_out && f_q_out,
                         "output pointer is null"))
        return rc;
    return wrap([&] {
        auto rep = discrim::expsum::threshold_check(p, r);
        *check1_out = rep.check1 ? 1 : 0;
        *check3_out = rep.check3 ? 1 : 0;
        *q_out = rep.q;
        *f_q_out = rep.f_q;
    });
}

} // extern "C"
