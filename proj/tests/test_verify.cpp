#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "error.hpp"
#include "verify.hpp"

using namespace discrim;
using namespace discrim::verify;
namespace fs = std::filesystem;

namespace {

// least m >= 1 whose square separates a^3+a for a = 1..n, by blunt ascent
u64 naive_d(u64 n) {
    for (u64 m = 1;; ++m) {
        if (!residue_injective(n, m).has_value()) return m;
    }
}

u64 pow3(u32 k) {
    u64 v = 1;
    while (k--) v *= 3;
    return v;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("discrim_verify_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("k_of is the least k with 9^k >= n") {
    CHECK(k_of(2) == 1);
    CHECK(k_of(9) == 1);
    CHECK(k_of(10) == 2);
    CHECK(k_of(81) == 2);
    CHECK(k_of(82) == 3);
    CHECK(k_of(100) == 3);
    CHECK(k_of(1'000'000'000'000ull) == 13);
    CHECK_THROWS_AS(k_of(1), Error);
    CHECK_THROWS_AS(k_of(0), Error);

    u32 prev = 1;
    for (u64 n = 2; n <= 7000; ++n) {
        u32 k = k_of(n);
        u64 nine_k = pow3(k) * pow3(k);
        CHECK(nine_k >= n);
        if (k > 1) CHECK(pow3(k - 1) * pow3(k - 1) < n);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("residue_injective finds the first collision or proves none") {
    CHECK_FALSE(residue_injective(9, 3).has_value());

    auto c22 = residue_injective(2, 2);
    REQUIRE(c22.has_value());
    CHECK(c22->first == 1);
    CHECK(c22->second == 2);

    for (u64 n : {2, 5, 100}) {
        auto c = residue_injective(n, 1);
        REQUIRE(c.has_value());
        CHECK(c->first == 1);
        CHECK(c->second == 2);
    }

    // against a literal double loop, minimizing b then a
    for (u64 n = 2; n <= 60; ++n)
        for (u64 m = 1; m <= 12; ++m) {
            u64 q = m * m;
            std::optional<std::pair<u64, u64>> want;
            for (u64 b = 2; b <= n && !want; ++b)
                for (u64 a = 1; a < b; ++a) {
                    if ((b * b * b + b) % q == (a * a * a + a) % q) {
                        want = {a, b};
                        break;
                    }
                }
            auto got = residue_injective(n, m);
            CHECK(got == want);
        }
}

TEST_CASE("bucketed fallback matches the single-pass table") {
    // a cap of 3 entries forces the multi-pass path for every m >= 2
    for (u64 n : {2, 9, 50, 200, 1000})
        for (u64 m : {2, 3, 5, 9, 16, 27, 31})
            CHECK(residue_injective(n, m, 3) == residue_injective(n, m));
}

TEST_CASE("d_of matches blunt ascent and the predicted power of three") {
    CHECK(d_of(2) == 3);
    CHECK(d_of(9) == 3);
    CHECK(d_of(10) == 9);
    CHECK_THROWS_AS(d_of(1), Error);

    for (u64 n = 2; n <= 400; ++n) {
        u64 d = d_of(n);
        CHECK(d == naive_d(n));
        CHECK(d == pow3(k_of(n)));
        CHECK(d * d >= n);
    }
}

TEST_CASE("check_theorem rows") {
    auto r2 = check_theorem(2);
    CHECK(r2.n == 2);
    CHECK(r2.k == 1);
    CHECK(r2.d == 3);
    CHECK(r2.match);

    auto r81 = check_theorem(81);
    CHECK(r81.k == 2);
    CHECK(r81.d == 9);
    CHECK(r81.match);

    auto r100 = check_theorem(100);
    CHECK(r100.k == 3);
    CHECK(r100.d == 27);
    CHECK(r100.match);
}

TEST_CASE("injectivity at the 3-power modulus plus the factoring identity") {
    CHECK(lemma1_check(9));
    CHECK(lemma1_check(1000));
    CHECK(lemma1_check(100000));
}

TEST_CASE("window sweep produces one verified certificate per modulus") {
    auto certs100 = lemma2_scan(100);
    CHECK(certs100.size() == 16); // m = 11..26
    u64 expect_m = 11;
    for (const auto& c : certs100) {
        CHECK(c.m == expect_m++);
        CHECK(casekit::verify_certificate(c));
        CHECK(c.b <= 100);
    }

    auto certs10 = lemma2_scan(10);
    CHECK(certs10.size() == 5); // m = 4..8
    for (const auto& c : certs10) CHECK(casekit::verify_certificate(c));

    auto certs2 = lemma2_scan(2);
    REQUIRE(certs2.size() == 1);
    CHECK(certs2[0].m == 2);
    CHECK(certs2[0].a == 1);
    CHECK(certs2[0].b == 2);

    // every modulus strictly between sqrt(n) and 3^k, nothing skipped
    for (u64 n : {50, 500, 5000}) {
        auto certs = lemma2_scan(n);
        u64 lo = 1;
        while (lo * lo <= n) ++lo; // least m with m^2 > n
        u64 hi = pow3(k_of(n));    // exclusive
        CHECK(certs.size() == (hi > lo ? hi - lo : 0));
        for (size_t i = 0; i < certs.size(); ++i) {
            CHECK(certs[i].m == lo + i);
            CHECK(casekit::verify_certificate(certs[i]));
        }
    }
}

TEST_CASE("range_scan covers the range in order with zero failures") {
    auto rep = range_scan(2, 10, 1);
    REQUIRE(rep.rows.size() == 9);
    u64 want_d[] = {3, 3, 3, 3, 3, 3, 3, 3, 9};
    for (size_t i = 0; i < 9; ++i) {
        CHECK(rep.rows[i].n == 2 + i);
        CHECK(rep.rows[i].d == want_d[i]);
        CHECK(rep.rows[i].match);
    }
    CHECK(rep.failures == 0);

    auto rep1000 = range_scan(2, 1000, 4);
    CHECK(rep1000.rows.size() == 999);
    CHECK(rep1000.failures == 0);

    CHECK_THROWS_AS(range_scan(1, 10, 1), Error);
    CHECK_THROWS_AS(range_scan(50, 10, 1), Error);
}

TEST_CASE("reports are byte-identical regardless of worker count") {
    auto csv1 = report_csv(range_scan(2, 500, 1));
    auto csv4 = report_csv(range_scan(2, 500, 4));
    auto csv0 = report_csv(range_scan(2, 500, 0)); // hardware default
    CHECK(csv1 == csv4);
    CHECK(csv1 == csv0);
}

TEST_CASE("report_csv layout") {
    auto rep = range_scan(2, 4, 1);
    CHECK(report_csv(rep) == "n,k,D,match\n2,1,3,1\n3,1,3,1\n4,1,3,1\n");
}

TEST_CASE("checkpoint: write, resume from full and truncated files") {
    TempDir tmp;
    auto ckpt = (tmp.path / "scan.ckpt").string();

    // spans three 4096-wide chunks
    auto fresh = range_scan(2, 9000, 2, ckpt);
    CHECK(fresh.failures == 0);
    std::string file_full = slurp(ckpt);
    CHECK(file_full.rfind("# scan 2 9000 chunk 4096 v1\n", 0) == 0);

    // resume with everything already done: same rows, file unchanged
    auto resumed = range_scan(2, 9000, 2, ckpt);
    CHECK(report_csv(resumed) == report_csv(fresh));
    CHECK(slurp(ckpt) == file_full);

    // chop the file mid-way through a later chunk; the valid prefix is
    // kept and the remainder recomputed
    std::string cut = file_full.substr(0, file_full.size() * 55 / 100);
    {
        std::ofstream out(ckpt, std::ios::binary | std::ios::trunc);
        out << cut;
    }
    auto repaired = range_scan(2, 9000, 2, ckpt);
    CHECK(report_csv(repaired) == report_csv(fresh));
    CHECK(slurp(ckpt) == file_full);

    // a corrupted row inside the first chunk invalidates from that point
    std::string damaged = file_full;
    auto pos = damaged.find("\n101,");
    if (pos != std::string::npos) damaged[pos + 1] = '9';
    {
        std::ofstream out(ckpt, std::ios::binary | std::ios::trunc);
        out << damaged;
    }
    auto healed = range_scan(2, 9000, 2, ckpt);
    CHECK(report_csv(healed) == report_csv(fresh));
    CHECK(slurp(ckpt) == file_full);
}

TEST_CASE("checkpoint: wrong header and unwritable path raise io errors") {
    TempDir tmp;
    auto ckpt = (tmp.path / "other.ckpt").string();
    {
        std::ofstream out(ckpt, std::ios::binary);
        out << "# scan 5 9000 chunk 4096 v1\n";
    }
    CHECK_THROWS_AS(range_scan(2, 9000, 1, ckpt), Error);
    try {
        range_scan(2, 9000, 1, ckpt);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }

    // a directory can be opened for neither reading rows nor appending
    CHECK_THROWS_AS(range_scan(2, 10, 1, tmp.path.string()), Error);
    try {
        range_scan(2, 10, 1, tmp.path.string());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}

TEST_CASE("oversized ranges are rejected before any work happens") {
    // k(10^14) = 15, and 3^15 squared overflows any sane residue table
    CHECK_THROWS_AS(range_scan(2, 100'000'000'000'000ull, 1), Error);
    try {
        range_scan(2, 100'000'000'000'000ull, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Budget);
    }
}
