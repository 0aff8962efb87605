#pragma once

//
// Collision certificates for the map a -> a^3 + a mod m^2. For every modulus
// m inside the scan window sqrt(n) < m < 3^k the factor shape of m selects
// one of six constructions that produces a pair a < b <= n with
// m^2 | (b - a)(a^2 + ab + b^2 + 1), i.e. a collision of a^3 + a mod m^2.
// A brute-force fallback keeps the dispatcher total when a construction is
// out of reach (small n, or a constructed b that overshoots n).
//

#include <cstdint>
#include <optional>
#include <vector>

#include "modarith.hpp"

namespace discrim::casekit {

using modarith::u32;
using modarith::u64;
using modarith::i64;
using modarith::u128;

// Full factorization plus the distinguished decomposition m = delta * p^r,
// where p is the largest prime factor >= 5 (absent when m = 2^a 3^b).
struct FactoredModulus {
    u64 m = 0;
    std::vector<modarith::PrimePower> factors; // ascending by prime
    u64 delta = 0;                             // m / p^r, or m when p absent
    std::optional<u64> p;
    u32 r = 0;
};

enum class Case { I, II, III, IV, V, VI };

const char* case_label(Case c);

// Which construction applies, with the parameters it needs.
struct CaseTag {
    Case c;
    u64 delta = 0; // cases I, VI
    u64 p = 0;     // cases I, VI
    u32 r = 0;     // all cases: exponent of p (I, VI) or of 2 (II..V)
    u32 s = 0;     // cases III, IV, V: exponent of 3
    bool has5 = false; // case V: true for m = 2^r 3^s 35
};

struct CollisionCertificate {
    u64 n = 0, m = 0;
    u64 a = 0, b = 0;
    u64 quotient = 0; // (b - a)(a^2 + ab + b^2 + 1) / m^2
    std::optional<CaseTag> case_used; // nullopt = brute-force fallback
};

// Window check: n < m^2, m < 3^k, 3^{2k} < 9n, with k the least j >= 1 such
// that 3^{2j} >= n. All comparisons exact in integers.
struct RangeCheck {
    bool ok = false;
    u32 k = 0;
    const char* violated = nullptr; // names the failed inequality when !ok
};

RangeCheck validate_range(u64 n, u64 m);

// Trial-division factorization (fine at desk scale); fills the distinguished
// (delta, p, r) decomposition when a prime factor >= 5 exists.
FactoredModulus factorize(u64 m);

// Decide the construction case, tried in the fixed order II, III, I, VI,
// IV, V. Case VI accepts any prime-power factor p^r >= 11 (p >= 5) with
// cofactor >= 4, not only the largest prime; the largest-prime choice is
// preferred when it qualifies. Throws NoCase when nothing fits (only pure
// powers of 3 and m = 1, which never enter a valid window).
CaseTag classify(const FactoredModulus& f);

// Per-case constructors. Each returns a fully verified certificate or throws
// Exhausted when the construction cannot place b within [1, n].
CollisionCertificate collide_case_i(u64 n, u64 delta, u64 p, u32 r);
CollisionCertificate collide_case_ii(u64 n, u32 r);
CollisionCertificate collide_case_iii(u64 n, u32 r, u32 s);
CollisionCertificate collide_case_iv(u64 n, u32 r, u32 s);
CollisionCertificate collide_case_v(u64 n, u32 r, u32 s, bool has5);
CollisionCertificate collide_case_vi(u64 n, u64 delta, u64 p, u32 r);

// Brute-force search in order of ascending gap d = b - a, then ascending a.
CollisionCertificate brute_force_collision(u64 n, u64 m);

// Range-check, classify, construct; fall back to brute force whenever the
// construction misses. Always returns a verified certificate or throws
// (Range for a bad window, Exhausted when even brute force finds nothing).
CollisionCertificate collide(u64 n, u64 m);

// 1 <= a < b <= n and m^2 | (b-a)(a^2+ab+b^2+1), plus the stored quotient;
// all arithmetic 128-bit exact.
bool verify_certificate(const CollisionCertificate& cert);

} // namespace discrim::casekit
