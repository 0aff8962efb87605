#pragma once

//
// Exact modular arithmetic over 64-bit operands with 128-bit intermediates:
// modular powering, Legendre/Jacobi symbols, square roots mod p and their
// Hensel lifts to odd prime powers, a bit-by-bit solver for quadratics over
// the 2-adics, and small helpers (primality, integer sqrt, inverses).
//

#include <cstdint>
#include <optional>

#include "error.hpp"

namespace discrim::modarith {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// (a * b) mod m without overflow; m >= 1.
inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

inline u64 add_mod(u64 a, u64 b, u64 m) {
    u128 s = static_cast<u128>(a) + b;
    return static_cast<u64>(s % m);
}

// Reduce a signed value into [0, m).
inline u64 reduce_mod(i64 a, u64 m) {
    i128 r = static_cast<i128>(a) % static_cast<i128>(m);
    if (r < 0) r += static_cast<i128>(m);
    return static_cast<u64>(r);
}

// base^exp mod modulus by square-and-multiply; modulus == 0 is a domain error,
// modulus == 1 gives 0.
u64 pow_mod(i64 base, u64 exp, u64 modulus);

// Deterministic primality for the full u64 range: trial division below 2^16,
// then strong pseudoprime tests to the 12 standard witness bases.
bool is_prime(u64 n);

// A checked prime power p^e; construction verifies primality and that the
// value fits in 64 bits.
struct PrimePower {
    u64 p = 0;
    u32 e = 0;
    u64 value = 0;

    static PrimePower make(u64 p, u32 e);
};

// p^e as u64, throwing on overflow.
u64 pow_checked(u64 p, u32 e);

// floor(sqrt(n)) exactly.
u64 isqrt(u64 n);

// Legendre symbol (a/p) for odd p >= 3, via Euler's criterion.
int legendre_symbol(i64 a, u64 p);

// Jacobi symbol (a / p^j) = legendre(a,p)^j for j >= 1.
int jacobi_prime_power(i64 a, u64 p, u32 j);

// Least square root of d mod an odd prime p, if one exists (Tonelli-Shanks;
// the returned root x satisfies x <= p - x). d is reduced mod p; d ≡ 0 gives 0.
std::optional<u64> sqrt_mod_prime(i64 d, u64 p);

// Square root of a unit d mod p^e for odd prime p, by Hensel lifting the
// mod-p root. p | d is a domain error (the lift needs a unit); a non-residue
// gives nullopt. Returns the smaller of the two roots.
std::optional<u64> lift_sqrt_odd(i64 d, u64 p, u32 e);

// Solve A x^2 + B x + C ≡ 0 (mod 2^target_level), lifting a seed x0 known to
// solve the congruence at 2^seed_level one bit at a time. Two regimes:
//   B odd:  the derivative 2Ax + B is a unit, so x -> x + 2^j fixes bit j
//           (works from any seed_level >= 1);
//   B ≡ 0 (mod 4), A and x0 odd: x -> x + 2^{j-1} fixes bit j, valid for
//           j >= 3 (the quadratic correction term 2^{2j-2} is absorbed).
// At each level the c = 0 branch is tried first, so the result is the
// deterministic lift of the seed. Returns x in [1, 2^target_level].
u64 solve_quadratic_2adic(i64 A, i64 B, i64 C, u32 target_level, u64 x0, u32 seed_level);

// Moebius function at p^j: -1 for j == 1, 0 for j >= 2.
int mobius_prime_power(u64 p, u32 j);

// Inverse of a mod m (m >= 2) by the extended Euclid; gcd(a, m) != 1 is a
// domain error.
u64 inv_mod(i64 a, u64 m);

} // namespace discrim::modarith
