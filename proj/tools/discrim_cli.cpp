// discrim: command-line front end over the C API.
//
// Exit codes: 0 = success and every reported check passed; 1 = a check,
// certificate or construction failed (including no-case/exhausted/budget
// results); 2 = usage, domain, range or I/O errors.
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "discrim.h"

using ordered_json = nlohmann::ordered_json;

namespace {

int status_exit(int rc) {
    std::fprintf(stderr, "error: %s\n", discrim_last_error());
    switch (rc) {
        case DISCRIM_NOCASE:
        case DISCRIM_EXHAUSTED:
        case DISCRIM_BUDGET:
            return 1;
        default:
            return 2;
    }
}

const char* bool_word(int v) { return v ? "true" : "false"; }

void print_json(const ordered_json& j) { std::printf("%s\n", j.dump().c_str()); }

struct Options {
    std::string format = "human"; // human | json | csv
};

int run_dvalue(const Options& opt, uint64_t n) {
    discrim_theorem_row row{};
    if (int rc = discrim_check_theorem(n, &row)) return status_exit(rc);
    if (opt.format == "json") {
        ordered_json j;
        j["n"] = row.n;
        j["k"] = row.k;
        j["D"] = row.d;
        j["match"] = row.match != 0;
        print_json(j);
    } else {
        std::printf("D(%llu)=%llu k=%u match=%s\n", (unsigned long long)row.n,
                    (unsigned long long)row.d, row.k, bool_word(row.match));
    }
    return row.match ? 0 : 1;
}

int run_scan(const Options& opt, uint64_t n_lo, uint64_t n_hi, uint32_t workers,
             const std::string& checkpoint) {
    discrim_scan_report* rep = nullptr;
    int rc = discrim_range_scan(n_lo, n_hi, workers,
                                checkpoint.empty() ? nullptr : checkpoint.c_str(), &rep);
    if (rc) return status_exit(rc);
    uint64_t lo = 0, hi = 0, failures = 0;
    double wall = 0.0;
    uint32_t used = 0;
    discrim_scan_report_stats(rep, &lo, &hi, &failures, &wall, &used);
    size_t rows = discrim_scan_report_size(rep);
    if (opt.format == "csv") {
        char* csv = nullptr;
        if ((rc = discrim_scan_csv(rep, &csv))) {
            discrim_scan_report_free(rep);
            return status_exit(rc);
        }
        std::fputs(csv, stdout);
        discrim_string_free(csv);
    } else if (opt.format == "json") {
        ordered_json j;
        j["n_lo"] = lo;
        j["n_hi"] = hi;
        j["failures"] = failures;
        ordered_json arr = ordered_json::array();
        for (size_t i = 0; i < rows; ++i) {
            discrim_theorem_row row{};
            discrim_scan_report_get(rep, i, &row);
            ordered_json r;
            r["n"] = row.n;
            r["k"] = row.k;
            r["D"] = row.d;
            r["match"] = row.match != 0;
            arr.push_back(std::move(r));
        }
        j["rows"] = std::move(arr);
        print_json(j);
    } else {
        std::printf("scanned n in [%llu,%llu]: rows=%zu failures=%llu workers=%u wall=%.3fs\n",
                    (unsigned long long)lo, (unsigned long long)hi, rows,
                    (unsigned long long)failures, used, wall);
        size_t shown = 0;
        for (size_t i = 0; i < rows && shown < 20; ++i) {
            discrim_theorem_row row{};
            discrim_scan_report_get(rep, i, &row);
            if (!row.match) {
                std::printf("MISMATCH n=%llu k=%u D=%llu\n", (unsigned long long)row.n,
                            row.k, (unsigned long long)row.d);
                ++shown;
            }
        }
    }
    discrim_scan_report_free(rep);
    return failures == 0 ? 0 : 1;
}

int run_collide(const Options& opt, uint64_t n, uint64_t m) {
    discrim_certificate cert{};
    if (int rc = discrim_collide(n, m, &cert)) return status_exit(rc);
    int ok = 0;
    if (int rc = discrim_certificate_check(&cert, &ok)) return status_exit(rc);
    if (opt.format == "json") {
        ordered_json j;
        j["n"] = cert.n;
        j["m"] = cert.m;
        j["a"] = cert.a;
        j["b"] = cert.b;
        j["quotient"] = cert.quotient;
        j["case"] = cert.case_label;
        print_json(j);
    } else {
        std::printf("n=%llu m=%llu a=%llu b=%llu quotient=%llu case=%s\n",
                    (unsigned long long)cert.n, (unsigned long long)cert.m,
                    (unsigned long long)cert.a, (unsigned long long)cert.b,
                    (unsigned long long)cert.quotient, cert.case_label);
    }
    return ok ? 0 : 1;
}

int run_classify(const Options& opt, uint64_t n, uint64_t m) {
    discrim_case_info info{};
    if (int rc = discrim_classify(n, m, &info)) return status_exit(rc);
    if (opt.format == "json") {
        ordered_json j;
        j["n"] = n;
        j["m"] = m;
        j["case"] = info.label;
        j["delta"] = info.delta;
        j["p"] = info.p;
        j["r"] = info.r;
        j["s"] = info.s;
        j["has5"] = info.has5 != 0;
        print_json(j);
    } else {
        std::printf("n=%llu m=%llu case=%s delta=%llu p=%llu r=%u s=%u has5=%s\n",
                    (unsigned long long)n, (unsigned long long)m, info.label,
                    (unsigned long long)info.delta, (unsigned long long)info.p, info.r,
                    info.s, bool_word(info.has5));
    }
    return 0;
}

int print_check_report(const Options& opt, discrim_check_report* rep) {
    size_t rows = discrim_check_report_size(rep);
    int all_pass = 0;
    discrim_check_report_all_pass(rep, &all_pass);
    if (opt.format == "json") {
        ordered_json arr = ordered_json::array();
        for (size_t i = 0; i < rows; ++i) {
            discrim_check_row row{};
            discrim_check_report_get(rep, i, &row);
            ordered_json r;
            r["name"] = row.name;
            r["measured"] = row.measured;
            r["bound"] = row.bound;
            r["pass"] = row.pass != 0;
            arr.push_back(std::move(r));
        }
        ordered_json j;
        j["rows"] = std::move(arr);
        j["all_pass"] = all_pass != 0;
        print_json(j);
    } else {
        for (size_t i = 0; i < rows; ++i) {
            discrim_check_row row{};
            discrim_check_report_get(rep, i, &row);
            std::printf("%s %s measured=%.10g bound=%.10g\n", row.pass ? "PASS" : "FAIL",
                        row.name, row.measured, row.bound);
        }
        std::printf("all_pass=%s (%zu rows)\n", bool_word(all_pass), rows);
    }
    discrim_check_report_free(rep);
    return all_pass ? 0 : 1;
}

int run_thresholds(const Options& opt, uint64_t p, uint32_t r) {
    int c1 = 0, c3 = 0;
    double q = 0.0, fq = 0.0;
    if (int rc = discrim_threshold_check(p, r, &c1, &c3, &q, &fq)) return status_exit(rc);
    if (opt.format == "json") {
        ordered_json j;
        j["p"] = p;
        j["r"] = r;
        j["check1"] = c1 != 0;
        j["check3"] = c3 != 0;
        j["q"] = q;
        j["f_q"] = fq;
        print_json(j);
    } else {
        std::printf("p=%llu r=%u check1=%s check3=%s q=%.10g f_q=%.10g\n",
                    (unsigned long long)p, r, bool_word(c1), bool_word(c3), q, fq);
    }
    return (c1 && c3) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"checks for the least modulus D(n) separating a^3+a on 1..n"};
    app.require_subcommand(1);
    app.fallthrough(); // global --format may follow the subcommand name

    Options opt;
    app.add_option("--format", opt.format, "output format")
        ->envname("DISCRIM_FORMAT")
        ->check(CLI::IsMember({"human", "json", "csv"}));

    uint64_t n = 0, m = 0, n_lo = 0, n_hi = 0, p = 0, delta = 1;
    uint32_t workers = 0, r = 0, j_level = 0;
    std::string checkpoint;

    auto* dvalue = app.add_subcommand("dvalue", "compute D(n) and compare with 3^k");
    dvalue->add_option("n", n, "upper end of 1..n")->required();

    auto* scan = app.add_subcommand("scan", "verify D(n) = 3^k over a range");
    scan->add_option("n_lo", n_lo, "first n")->required();
    scan->add_option("n_hi", n_hi, "last n")->required();
    scan->add_option("--workers", workers, "worker threads (0 = hardware)");
    scan->add_option("--checkpoint", checkpoint, "resumable checkpoint file");

    auto* collide = app.add_subcommand("collide", "collision certificate for (n, m)");
    collide->add_option("n", n, "range bound")->required();
    collide->add_option("m", m, "modulus (collision taken mod m^2)")->required();

    auto* classify = app.add_subcommand("classify", "construction case for (n, m)");
    classify->add_option("n", n, "range bound")->required();
    classify->add_option("m", m, "modulus")->required();

    auto* expsum = app.add_subcommand("expsum", "exponential-sum checks");
    expsum->require_subcommand(1);
    auto* identity = expsum->add_subcommand("identity", "direct vs closed-form identities");
    identity->add_option("--delta", delta, "scale factor (1..3)")->capture_default_str();
    identity->add_option("--p", p, "prime >= 5 with p ≡ 2 (mod 3)")->required();
    identity->add_option("--r", r, "half-exponent: modulus is p^{2r}")->required();
    auto* bounds = expsum->add_subcommand("bounds", "bound certification at one level");
    bounds->add_option("--delta", delta, "scale factor (1..3)")->capture_default_str();
    bounds->add_option("--p", p, "prime >= 5 with p ≡ 2 (mod 3)")->required();
    bounds->add_option("--j", j_level, "level: sums taken mod p^j")->required();
    bounds->add_option("--r", r, "half-exponent (default: least r with 2r >= j)");

    auto* thresholds = app.add_subcommand("thresholds", "closing inequalities at p^r");
    thresholds->add_option("--p", p, "prime >= 5")->required();
    thresholds->add_option("--r", r, "exponent")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (dvalue->parsed()) return run_dvalue(opt, n);
    if (scan->parsed()) return run_scan(opt, n_lo, n_hi, workers, checkpoint);
    if (collide->parsed()) return run_collide(opt, n, m);
    if (classify->parsed()) return run_classify(opt, n, m);
    if (identity->parsed()) {
        discrim_check_report* rep = nullptr;
        if (int rc = discrim_expsum_identity(delta, p, r, &rep)) return status_exit(rc);
        return print_check_report(opt, rep);
    }
    if (bounds->parsed()) {
        if (bounds->count("--r") == 0) r = (j_level + 1) / 2;
        discrim_check_report* rep = nullptr;
        if (int rc = discrim_expsum_bounds(delta, p, r, j_level, &rep))
            return status_exit(rc);
        return print_check_report(opt, rep);
    }
    if (thresholds->parsed()) return run_thresholds(opt, p, r);
    return 2;
}
