#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "casekit.hpp"
#include "error.hpp"

using namespace discrim;
using namespace discrim::casekit;
using modarith::u128;
using modarith::u64;

namespace {

// independent arithmetic check of a collision pair
bool pair_collides(u64 n, u64 m, u64 a, u64 b) {
    if (!(1 <= a && a < b && b <= n)) return false;
    u128 diff = ((u128)b * b * b + b) - ((u128)a * a * a + a);
    return diff % ((u128)m * m) == 0;
}

} // namespace

TEST_CASE("validate_range checks the three window inequalities") {
    auto ok = validate_range(100, 16);
    CHECK(ok.ok);
    CHECK(ok.k == 3);

    auto low = validate_range(10, 3); // 10 >= 3^2
    CHECK_FALSE(low.ok);
    CHECK(std::string(low.violated) == "n < m^2");

    auto high = validate_range(10, 9); // 9 = 3^k(10)
    CHECK_FALSE(high.ok);
    CHECK(std::string(high.violated) == "m < 3^k");

    // the third inequality follows from minimality of k for every n >= 2,
    // so only the argument guards can reject below the window
    CHECK_THROWS_AS((void)validate_range(1, 2), Error);
    CHECK_THROWS_AS((void)validate_range(100, 1), Error);

    // ... and it indeed never fires across a dense sweep
    for (u64 n = 2; n <= 2000; ++n)
        for (u64 m = 2; m <= 50; ++m) {
            auto w = validate_range(n, m);
            if (!w.ok) CHECK(std::string(w.violated) != "3^{2k} < 9n");
        }
}

TEST_CASE("factorize produces ascending prime powers and the delta split") {
    auto f = factorize(175);
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0].p == 5);
    CHECK(f.factors[0].e == 2);
    CHECK(f.factors[1].p == 7);
    CHECK(f.factors[1].e == 1);
    REQUIRE(f.p.has_value());
    CHECK(*f.p == 7); // largest prime >= 5 is distinguished
    CHECK(f.r == 1);
    CHECK(f.delta == 25);

    auto g = factorize(48);
    CHECK_FALSE(g.p.has_value());
    CHECK(g.delta == 48);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        u64 m = 2 + rng() % 100000;
        auto fm = factorize(m);
        u64 prod = 1;
        for (auto& pp : fm.factors) prod *= pp.value;
        CHECK(prod == m);
    }
}

TEST_CASE("classify picks the documented case for each modulus shape") {
    auto tag = [](u64 m) { return classify(factorize(m)); };
    CHECK(tag(2).c == Case::II);
    CHECK(tag(16).c == Case::II);
    CHECK(tag(6).c == Case::III);
    CHECK(tag(36).c == Case::III);
    CHECK(tag(7).c == Case::I);   // delta = 1
    CHECK(tag(14).c == Case::I);  // delta = 2
    CHECK(tag(75).c == Case::I);  // delta = 3, p = 5, r = 2
    CHECK(tag(44).c == Case::VI); // delta = 4, 11 >= 11
    CHECK(tag(20).c == Case::IV); // 4 * 5, no factor >= 11
    CHECK(tag(90).c == Case::IV);
    CHECK(tag(63).c == Case::V);
    CHECK_FALSE(tag(63).has5);
    CHECK(tag(35).c == Case::V);
    CHECK(tag(35).has5);
    CHECK(tag(70).c == Case::V);
    CHECK_THROWS_AS((void)tag(27), Error); // pure power of 3: no case (never in window)

    // 175 = 5^2 * 7: the distinguished prime 7 is too small, but 5^2 = 25
    // with cofactor 7 >= 4 fits the general large-prime-power construction
    auto t175 = tag(175);
    CHECK(t175.c == Case::VI);
    CHECK(t175.p == 5);
    CHECK(t175.r == 2);
    CHECK(t175.delta == 7);
}

TEST_CASE("classify is total over every window modulus up to n = 5000") {
    for (u64 n = 2; n <= 5000; ++n) {
        u64 m_lo = modarith::isqrt(n) + 1;
        for (u64 m = m_lo;; ++m) {
            auto rc = validate_range(n, m);
            if (!rc.ok) break;
            CHECK_NOTHROW((void)classify(factorize(m)));
        }
    }
}

TEST_CASE("case i handles both residue classes of the large prime") {
    // p = 13 ≡ 1 (mod 3): root of 3a^2 + 1 mod 13, partner a + delta^2 p
    auto c13 = collide(150, 13);
    REQUIRE(c13.case_used.has_value());
    CHECK(c13.case_used->c == Case::I);
    CHECK(c13.a == 2);
    CHECK(c13.b == 15);
    CHECK(pair_collides(150, 13, c13.a, c13.b));

    // p = 5 ≡ 2 (mod 3): quadratic scan in the scaled variable
    auto c10 = collide(90, 10);
    REQUIRE(c10.case_used.has_value());
    CHECK(c10.case_used->c == Case::I);
    CHECK(c10.a == 8);
    CHECK(c10.b == 20);
    CHECK(pair_collides(90, 10, c10.a, c10.b));

    auto c15 = collide(105, 15);
    REQUIRE(c15.case_used.has_value());
    CHECK(c15.case_used->c == Case::I);
    CHECK(c15.a == 27);
    CHECK(c15.b == 63);

    auto c5 = collide(10, 5);
    REQUIRE(c5.case_used.has_value());
    CHECK(c5.case_used->c == Case::I);
    CHECK(c5.a == 2);
    CHECK(c5.b == 10);
    CHECK(c5.quotient == 40);
}

TEST_CASE("case ii covers every power of two") {
    auto c2 = collide(2, 2);
    REQUIRE(c2.case_used.has_value());
    CHECK(c2.case_used->c == Case::II);
    CHECK(c2.a == 1);
    CHECK(c2.b == 2);

    auto c4 = collide(10, 4);
    REQUIRE(c4.case_used.has_value());
    CHECK(c4.a == 1);
    CHECK(c4.b == 5);

    auto c8 = collide(60, 8);
    REQUIRE(c8.case_used.has_value());
    CHECK(c8.a == 1);
    CHECK(c8.b == 5);

    auto c16 = collide(100, 16);
    REQUIRE(c16.case_used.has_value());
    CHECK(c16.case_used->c == Case::II);
    CHECK(c16.a == 11);
    CHECK(c16.b == 15);
    CHECK(c16.quotient == 8);

    for (u64 m : {32ull, 64ull, 128ull, 256ull}) {
        u64 n = m * m - 1; // widest admissible n for this m
        auto c = collide(n, m);
        REQUIRE(c.case_used.has_value());
        CHECK(c.case_used->c == Case::II);
        CHECK(pair_collides(n, m, c.a, c.b));
    }
}

TEST_CASE("case iii splits on the exponents of 2 and 3") {
    auto c6 = collide(35, 6); // r = 1: (1, 1 + 3^{2s})
    REQUIRE(c6.case_used.has_value());
    CHECK(c6.case_used->c == Case::III);
    CHECK(c6.a == 1);
    CHECK(c6.b == 10);

    auto c12 = collide(100, 12); // s = 1: root of 3x^2 + 27x + 82
    REQUIRE(c12.case_used.has_value());
    CHECK(c12.case_used->c == Case::III);
    CHECK(pair_collides(100, 12, c12.a, c12.b));
    CHECK(c12.b - c12.a == 9);

    auto c36 = collide(1000, 36); // r, s >= 2: even-part solve, b - a = 81
    REQUIRE(c36.case_used.has_value());
    CHECK(c36.case_used->c == Case::III);
    CHECK(c36.a == 9);
    CHECK(c36.b == 90);

    for (u64 m : {18ull, 24ull, 48ull, 72ull, 108ull, 144ull}) {
        u64 n = m * m - 1;
        auto c = collide(n, m);
        REQUIRE(c.case_used.has_value());
        CHECK(c.case_used->c == Case::III);
        CHECK(pair_collides(n, m, c.a, c.b));
    }
}

TEST_CASE("case iv handles moduli 2^r 3^s * 5") {
    auto c20 = collide(100, 20); // r >= 2: even-part solve with t = 5
    REQUIRE(c20.case_used.has_value());
    CHECK(c20.case_used->c == Case::IV);
    CHECK(c20.a == 1);
    CHECK(c20.b == 26);

    auto c90 = collide(7000, 90); // r = 1: triangle scan
    REQUIRE(c90.case_used.has_value());
    CHECK(c90.case_used->c == Case::IV);
    CHECK(c90.a == 22);
    CHECK(c90.b == 670);
    CHECK(pair_collides(7000, 90, c90.a, c90.b));

    auto c45 = collide(2000, 45); // r = 0
    REQUIRE(c45.case_used.has_value());
    CHECK(c45.case_used->c == Case::IV);
    CHECK(pair_collides(2000, 45, c45.a, c45.b));
}

TEST_CASE("case v uses the fixed pair (3, 3 + t)") {
    auto c63 = collide(1000, 63); // t = m^2 / 7
    REQUIRE(c63.case_used.has_value());
    CHECK(c63.case_used->c == Case::V);
    CHECK(c63.a == 3);
    CHECK(c63.b == 570);

    auto c35 = collide(1000, 35);
    REQUIRE(c35.case_used.has_value());
    CHECK(c35.case_used->c == Case::V);
    CHECK(c35.a == 3);
    CHECK(c35.b == 178);

    auto c70 = collide(1000, 70); // t = m^2 / 14 once a factor 2 is present
    REQUIRE(c70.case_used.has_value());
    CHECK(c70.case_used->c == Case::V);
    CHECK(c70.a == 3);
    CHECK(c70.b == 353);
}

TEST_CASE("case vi covers large prime powers with big cofactors") {
    auto c44 = collide(1000, 44);
    REQUIRE(c44.case_used.has_value());
    CHECK(c44.case_used->c == Case::VI);
    CHECK(c44.a == 38);
    CHECK(c44.b == 54);
    CHECK(c44.quotient == 53);

    auto c175 = collide(7000, 175);
    REQUIRE(c175.case_used.has_value());
    CHECK(c175.case_used->c == Case::VI);
    CHECK(c175.a == 622);
    CHECK(c175.b == 720);
    CHECK(c175.quotient == 4330);
}

TEST_CASE("collide validates the window and reports violations") {
    CHECK_THROWS_AS((void)collide(10, 3), Error);  // n >= m^2
    CHECK_THROWS_AS((void)collide(10, 9), Error);  // m >= 3^k
    CHECK_THROWS_AS((void)collide(1, 2), Error);
    try {
        (void)collide(10, 3);
        FAIL("expected a range error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Range);
    }
}

TEST_CASE("brute_force_collision finds the first pair in gap order") {
    // gap 1 is insoluble mod 49; gap 2 first hits at a = 39
    auto c = brute_force_collision(100, 14);
    CHECK(c.a == 39);
    CHECK(c.b == 41);
    CHECK(c.quotient == 49);
    CHECK_FALSE(c.case_used.has_value());

    // matches a smallest-gap-then-smallest-a double loop on random inputs
    std::mt19937_64 rng(0xb10cf0ace);
    for (int trial = 0; trial < 50; ++trial) {
        u64 n = 10 + rng() % 500;
        u64 m = 2 + rng() % 20;
        u64 m2 = m * m;
        u64 want_a = 0, want_b = 0;
        for (u64 d = 1; d < n && want_a == 0; ++d)
            for (u64 a = 1; a + d <= n; ++a) {
                u64 b = a + d;
                if ((b * b * b + b) % m2 == (a * a * a + a) % m2) {
                    want_a = a;
                    want_b = b;
                    break;
                }
            }
        if (want_a == 0) continue;
        auto got = brute_force_collision(n, m);
        CHECK(got.a == want_a);
        CHECK(got.b == want_b);
    }
}

TEST_CASE("verify_certificate accepts good pairs and rejects tampering") {
    auto c = collide(100, 16);
    CHECK(verify_certificate(c));
    auto bad = c;
    bad.b += 1;
    CHECK_FALSE(verify_certificate(bad));
    auto badq = c;
    badq.quotient += 1;
    CHECK_FALSE(verify_certificate(badq));
    auto badn = c;
    badn.n = badn.b - 1; // pair exceeds the claimed range
    CHECK_FALSE(verify_certificate(badn));
}

TEST_CASE("random window pairs always produce verified structured certificates") {
    std::mt19937_64 rng(0xca5eca5e);
    int done = 0;
    while (done < 400) {
        u64 n = 2 + rng() % 4999;
        u64 m_lo = modarith::isqrt(n) + 1;
        u64 span = 0;
        for (u64 m = m_lo;; ++m, ++span)
            if (!validate_range(n, m).ok) break;
        if (span == 0) continue;
        u64 m = m_lo + rng() % span;
        auto cert = collide(n, m);
        CHECK(verify_certificate(cert));
        CHECK(cert.case_used.has_value());
        CHECK(pair_collides(n, m, cert.a, cert.b));
        ++done;
    }
}
