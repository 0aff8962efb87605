#include "casekit.hpp"

#include <algorithm>

namespace discrim::casekit {

using modarith::add_mod;
using modarith::inv_mod;
using modarith::legendre_symbol;
using modarith::lift_sqrt_odd;
using modarith::mul_mod;
using modarith::pow_checked;
using modarith::reduce_mod;
using modarith::solve_quadratic_2adic;

const char* case_label(Case c) {
    switch (c) {
        case Case::I: return "I";
        case Case::II: return "II";
        case Case::III: return "III";
        case Case::IV: return "IV";
        case Case::V: return "V";
        case Case::VI: return "VI";
    }
    return "?";
}

RangeCheck validate_range(u64 n, u64 m) {
    if (n < 2) raise(ErrorCode::Domain, "validate_range: n must be >= 2");
    if (m < 2) raise(ErrorCode::Domain, "validate_range: m must be >= 2");
    RangeCheck rc;
    u32 k = 1;
    u128 nine_k = 9; // 3^{2k}
    while (nine_k < n) { nine_k *= 9; ++k; }
    rc.k = k;
    u128 m2 = static_cast<u128>(m) * m;
    if (!(static_cast<u128>(n) < m2)) { rc.violated = "n < m^2"; return rc; }
    u128 three_k = 1;
    for (u32 i = 0; i < k; ++i) three_k *= 3;
    if (!(static_cast<u128>(m) < three_k)) { rc.violated = "m < 3^k"; return rc; }
    if (!(nine_k < static_cast<u128>(9) * n)) { rc.violated = "3^{2k} < 9n"; return rc; }
    rc.ok = true;
    return rc;
}

FactoredModulus factorize(u64 m) {
    if (m < 2) raise(ErrorCode::Domain, "factorize: m must be >= 2");
    FactoredModulus f;
    f.m = m;
    u64 rest = m;
    auto take = [&](u64 d) {
        u32 e = 0;
        while (rest % d == 0) { rest /= d; ++e; }
        if (e > 0) f.factors.push_back(modarith::PrimePower::make(d, e));
    };
    take(2);
    take(3);
    for (u64 d = 5; d * d <= rest; d += (d % 6 == 5) ? 2 : 4) take(d);
    if (rest > 1) f.factors.push_back(modarith::PrimePower::make(rest, 1));
    f.delta = m;
    for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
        if (it->p >= 5) {
            f.p = it->p;
            f.r = it->e;
            f.delta = m / it->value;
            break;
        }
    }
    return f;
}

CaseTag classify(const FactoredModulus& f) {
    u32 e2 = 0, e3 = 0;
    for (const auto& pp : f.factors) {
        if (pp.p == 2) e2 = pp.e;
        if (pp.p == 3) e3 = pp.e;
    }
    if (!f.p) {
        if (e2 >= 1 && e3 == 0) return CaseTag{Case::II, 0, 0, e2, 0, false};
        if (e2 >= 1 && e3 >= 1) return CaseTag{Case::III, 0, 0, e2, e3, false};
        raise(ErrorCode::NoCase, "classify: no case covers powers of 3");
    }
    if (f.delta <= 3) return CaseTag{Case::I, f.delta, *f.p, f.r, 0, false};
    // prefer the largest prime power, then any other factor p^r >= 11
    for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
        if (it->p < 5) continue;
        u64 delta = f.m / it->value;
        if (it->value >= 11 && delta >= 4)
            return CaseTag{Case::VI, delta, it->p, it->e, 0, false};
    }
    // remaining factors >= 5 can only be a single 5 and/or a single 7
    bool has5 = false, has7 = false;
    for (const auto& pp : f.factors) {
        if (pp.p == 5) has5 = true;
        if (pp.p == 7) has7 = true;
    }
    if (has5 && !has7) return CaseTag{Case::IV, 0, 0, e2, e3, false};
    if (has7) return CaseTag{Case::V, 0, 0, e2, e3, has5};
    raise(ErrorCode::NoCase, "classify: no case matches");
}

namespace {

u64 modulus_of(const CaseTag& t) {
    switch (t.c) {
        case Case::I:
        case Case::VI:
            return t.delta * pow_checked(t.p, t.r);
        case Case::II:
            return pow_checked(2, t.r);
        case Case::III:
            return pow_checked(2, t.r) * pow_checked(3, t.s);
        case Case::IV:
            return pow_checked(2, t.r) * pow_checked(3, t.s) * 5;
        case Case::V:
            return pow_checked(2, t.r) * pow_checked(3, t.s) * 7 * (t.has5 ? 5 : 1);
    }
    raise(ErrorCode::BadArg, "modulus_of: bad tag");
}

CollisionCertificate make_certificate(u64 n, u64 m, u64 a, u64 b,
                                      std::optional<CaseTag> tag) {
    if (!(1 <= a && a < b && b <= n))
        raise(ErrorCode::Exhausted, "certificate pair out of range");
    u128 gap = b - a;
    u128 sq = static_cast<u128>(a) * a + static_cast<u128>(a) * b + static_cast<u128>(b) * b + 1;
    u128 prod = gap * sq;
    u128 m2 = static_cast<u128>(m) * m;
    if (prod % m2 != 0)
        raise(ErrorCode::Exhausted, "constructed pair fails the divisibility check");
    u128 q = prod / m2;
    if (q > UINT64_MAX) raise(ErrorCode::Domain, "certificate quotient exceeds 64 bits");
    CollisionCertificate cert;
    cert.n = n;
    cert.m = m;
    cert.a = a;
    cert.b = b;
    cert.quotient = static_cast<u64>(q);
    cert.case_used = tag;
    return cert;
}

// Shared construction for cases VI and IV (r <= 1): pick c in [1, p] with
// -3 delta^4 c^2 - 12 a nonzero square mod p, take a square root w mod p^{2r},
// and solve 6a + 3 delta^2 c ≡ w. Then b = a + delta^2 c gives
// a^2 + ab + b^2 + 1 ≡ 0 (mod p^{2r}).
CollisionCertificate triangle_construction(u64 n, u64 delta, u64 p, u32 r, CaseTag tag) {
    u64 m = delta * pow_checked(p, r);
    u64 q = pow_checked(p, 2 * r);
    u64 d2 = mul_mod(delta % q, delta % q, q);
    u64 d4 = mul_mod(d2, d2, q);
    u64 inv6 = inv_mod(6, q);
    for (u64 c = 1; c <= p; ++c) {
        u64 c2 = mul_mod(c, c, q);
        u64 val = mul_mod(mul_mod(3, d4, q), c2, q);
        val = add_mod(val, 12 % q, q);
        val = (q - val) % q; // -3 delta^4 c^2 - 12 mod q
        if (val % p == 0) continue;
        if (legendre_symbol(static_cast<i64>(val % p), p) != 1) continue;
        auto w0 = lift_sqrt_odd(static_cast<i64>(val), p, 2 * r);
        if (!w0) continue; // cannot happen after the Legendre test
        u64 shift = mul_mod(mul_mod(3, d2, q), c % q, q); // 3 delta^2 c
        for (u64 w : {*w0, q - *w0}) {
            u64 a = mul_mod(add_mod(w, q - shift, q), inv6, q);
            if (a == 0) a = q;
            u128 b = static_cast<u128>(a) + static_cast<u128>(delta) * delta * c;
            if (b > n) continue;
            return make_certificate(n, m, a, static_cast<u64>(b), tag);
        }
    }
    raise(ErrorCode::Exhausted, "triangle construction found no pair within n");
}

} // namespace

CollisionCertificate collide_case_i(u64 n, u64 delta, u64 p, u32 r) {
    if (delta < 1 || delta > 3) raise(ErrorCode::Domain, "case i: delta must be 1..3");
    u64 m = delta * pow_checked(p, r);
    CaseTag tag{Case::I, delta, p, r, 0, false};
    if (p % 3 == 1) {
        // 3a^2 + 1 ≡ 0 (mod p^r) is solvable exactly when -3 is a square mod p
        u64 pr = pow_checked(p, r);
        u64 target = pr - inv_mod(3, pr); // -1/3 mod p^r
        auto root = lift_sqrt_odd(static_cast<i64>(target), p, r);
        if (!root) raise(ErrorCode::Exhausted, "case i: -1/3 unexpectedly a non-residue");
        u64 a = *root;
        u128 b = static_cast<u128>(a) + static_cast<u128>(delta) * delta * pr;
        if (b > n) raise(ErrorCode::Exhausted, "case i: constructed b exceeds n");
        return make_certificate(n, m, a, static_cast<u64>(b), tag);
    }
    // p ≡ 2 (mod 3): search a = delta^2 a', b = delta^2 b' with
    // delta^4 (a'^2 + a'b' + b'^2) + 1 ≡ 0 (mod p^{2r}). For each a' the b'
    // satisfy a quadratic whose discriminant is -3 a'^2 - 4/delta^4.
    u64 q = pow_checked(p, 2 * r);
    u64 d2 = delta * delta;
    u64 limit = std::min(n / d2, q);
    u64 dinv = inv_mod(static_cast<i64>(mul_mod(d2 % q, d2 % q, q)), q); // delta^{-4}
    u64 inv2 = inv_mod(2, q);
    for (u64 ap = 1; ap <= limit; ++ap) {
        u64 disc = add_mod(mul_mod(3, mul_mod(ap, ap, q), q), mul_mod(4, dinv, q), q);
        disc = (q - disc) % q; // -3 a'^2 - 4/delta^4 mod q
        if (disc % p == 0) continue;
        if (legendre_symbol(static_cast<i64>(disc % p), p) != 1) continue;
        auto w = lift_sqrt_odd(static_cast<i64>(disc), p, 2 * r);
        if (!w) continue;
        u64 best = 0;
        for (u64 root : {*w, q - *w}) {
            u64 bp = mul_mod(add_mod(root, q - ap % q, q), inv2, q);
            if (bp == 0) bp = q;
            if (bp <= limit && bp != ap && (best == 0 || bp < best)) best = bp;
        }
        if (best == 0) continue;
        u64 lo = std::min(ap, best), hi = std::max(ap, best);
        return make_certificate(n, m, d2 * lo, d2 * hi, tag);
    }
    raise(ErrorCode::Exhausted, "case i: no pair of scaled points within n");
}

CollisionCertificate collide_case_ii(u64 n, u32 r) {
    if (r < 1) raise(ErrorCode::Domain, "case ii: needs r >= 1");
    u64 m = pow_checked(2, r);
    CaseTag small_tag{Case::II, 0, 0, r, 0, false};
    // 2^2 | b^3+b-a^3-a for any pair of opposite parity; for 2^4 take
    // b - a = 4 with odd a, where the cofactor 3x^2+5 (x = a+2) is ≡ 0 mod 4
    if (r == 1) return make_certificate(n, m, 1, 2, small_tag);
    if (r == 2) {
        if (n < 5) raise(ErrorCode::Exhausted, "case ii: needs n >= 5");
        return make_certificate(n, m, 1, 5, small_tag);
    }
    // solve 3x^2 + 5 ≡ 0 (mod 2^{2r-2}) from the seed x = 1 at level 3,
    // then reflect into [1, 2^{2r-4}-1]; the pair is (x-2, x+2)
    u64 x = solve_quadratic_2adic(3, 0, 5, 2 * r - 2, 1, 3);
    u64 half = 1ull << (2 * r - 3);
    u64 quarter = 1ull << (2 * r - 4);
    x %= half; // solution set mod 2^{2r-2} is periodic with period 2^{2r-3}
    if (x > quarter) x = half - x;
    if (x < 3) raise(ErrorCode::Exhausted, "case ii: no admissible root");
    u64 a = x - 2, b = x + 2;
    if (b > n) raise(ErrorCode::Exhausted, "case ii: constructed b exceeds n");
    return make_certificate(n, m, a, b, CaseTag{Case::II, 0, 0, r, 0, false});
}

namespace {

// b = a + t^2 with odd t: solve 3a^2 + 3t^2 a + t^4 + 1 ≡ 0 (mod 2^{2r})
// from the seed a = 1 at level 1 (the value there is even for odd t).
CollisionCertificate even_part_construction(u64 n, u64 m, u64 t, u32 r, CaseTag tag) {
    if (t > 55000) raise(ErrorCode::Exhausted, "construction overflow guard");
    i64 t2 = static_cast<i64>(t * t);
    u64 a = solve_quadratic_2adic(3, 3 * t2, t2 * t2 + 1, 2 * r, 1, 1);
    u128 b = static_cast<u128>(a) + static_cast<u128>(t) * t;
    if (b > n) raise(ErrorCode::Exhausted, "constructed b exceeds n");
    return make_certificate(n, m, a, static_cast<u64>(b), tag);
}

} // namespace

CollisionCertificate collide_case_iii(u64 n, u32 r, u32 s) {
    if (r < 1 || s < 1) raise(ErrorCode::Domain, "case iii: needs r, s >= 1");
    u64 m = pow_checked(2, r) * pow_checked(3, s);
    CaseTag tag{Case::III, 0, 0, r, s, false};
    if (r == 1) {
        // b - a = 3^{2s} and b^2 + b + 2 ≡ 0 (mod 4) at a = 1
        u64 b = 1 + pow_checked(3, 2 * s);
        if (b > n) raise(ErrorCode::Exhausted, "case iii: constructed b exceeds n");
        return make_certificate(n, m, 1, b, tag);
    }
    if (s == 1) {
        // b = a + 9: solve 3a^2 + 27a + 82 ≡ 0 (mod 2^{2r}); at a = 1 the
        // value is 112 = 2^4 * 7, so the seed sits at level 4
        u64 a = solve_quadratic_2adic(3, 27, 82, 2 * r, 1, 4);
        u64 b = a + 9;
        if (b > n) raise(ErrorCode::Exhausted, "case iii: constructed b exceeds n");
        return make_certificate(n, m, a, b, tag);
    }
    return even_part_construction(n, m, pow_checked(3, s), r, tag);
}

CollisionCertificate collide_case_iv(u64 n, u32 r, u32 s) {
    u64 m = pow_checked(2, r) * pow_checked(3, s) * 5;
    CaseTag tag{Case::IV, 0, 0, r, s, false};
    if (r >= 2) return even_part_construction(n, m, pow_checked(3, s) * 5, r, tag);
    return triangle_construction(n, m / 5, 5, 1, tag);
}

CollisionCertificate collide_case_v(u64 n, u32 r, u32 s, bool has5) {
    u64 m = pow_checked(2, r) * pow_checked(3, s) * 7 * (has5 ? 5 : 1);
    u64 m2 = m * m;
    u64 t = (r >= 1) ? m2 / 14 : m2 / 7;
    // t is then itself divisible by 14 (resp. 7), which makes
    // t^2 + 9t + 28 ≡ 0 at the required modulus; the pair is (3, 3 + t)
    u64 b = 3 + t;
    if (b > n) raise(ErrorCode::Exhausted, "case v: constructed b exceeds n");
    return make_certificate(n, m, 3, b, CaseTag{Case::V, 0, 0, r, s, has5});
}

CollisionCertificate collide_case_vi(u64 n, u64 delta, u64 p, u32 r) {
    if (delta < 4) raise(ErrorCode::Domain, "case vi: delta must be >= 4");
    if (delta % p == 0) raise(ErrorCode::Domain, "case vi: p must not divide delta");
    return triangle_construction(n, delta, p, r, CaseTag{Case::VI, delta, p, r, 0, false});
}

CollisionCertificate brute_force_collision(u64 n, u64 m) {
    if (m >= (1ull << 31)) raise(ErrorCode::Domain, "brute force: m too large");
    u64 m2 = m * m;
    for (u64 d = 1; d < n; ++d) {
        // (b-a)(a^2+ab+b^2+1) = d (3a^2 + 3ad + d^2 + 1)
        u64 dmod = d % m2;
        u64 base = add_mod(mul_mod(dmod, dmod, m2), 1, m2);
        for (u64 a = 1; a + d <= n; ++a) {
            u64 am = a % m2;
            u64 sq = mul_mod(3, add_mod(mul_mod(am, am, m2), mul_mod(am, dmod, m2), m2), m2);
            u64 v = mul_mod(dmod, add_mod(sq, base, m2), m2);
            if (v == 0) return make_certificate(n, m, a, a + d, std::nullopt);
        }
    }
    raise(ErrorCode::Exhausted, "no collision up to n");
}

CollisionCertificate collide(u64 n, u64 m) {
    RangeCheck rc = validate_range(n, m);
    if (!rc.ok) raise(ErrorCode::Range, std::string("collide: window violated: ") + rc.violated);
    std::optional<CaseTag> tag;
    try {
        tag = classify(factorize(m));
    } catch (const Error&) {
        tag = std::nullopt;
    }
    if (tag) {
        try {
            switch (tag->c) {
                case Case::I: return collide_case_i(n, tag->delta, tag->p, tag->r);
                case Case::II: return collide_case_ii(n, tag->r);
                case Case::III: return collide_case_iii(n, tag->r, tag->s);
                case Case::IV: return collide_case_iv(n, tag->r, tag->s);
                case Case::V: return collide_case_v(n, tag->r, tag->s, tag->has5);
                case Case::VI: return collide_case_vi(n, tag->delta, tag->p, tag->r);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Exhausted && e.code() != ErrorCode::Domain) throw;
            // construction out of reach at this n: fall through to brute force
        }
    }
    return brute_force_collision(n, m);
}

bool verify_certificate(const CollisionCertificate& cert) {
    if (!(1 <= cert.a && cert.a < cert.b && cert.b <= cert.n)) return false;
    if (cert.m < 1) return false;
    u128 gap = cert.b - cert.a;
    u128 sq = static_cast<u128>(cert.a) * cert.a + static_cast<u128>(cert.a) * cert.b +
              static_cast<u128>(cert.b) * cert.b + 1;
    u128 prod = gap * sq;
    u128 m2 = static_cast<u128>(cert.m) * cert.m;
    if (prod % m2 != 0) return false;
    if (prod / m2 != cert.quotient) return false;
    if (cert.case_used && modulus_of(*cert.case_used) != cert.m) return false;
    return true;
}

} // namespace discrim::casekit
