#include "modarith.hpp"

#include <algorithm>
#include <cmath>

namespace discrim::modarith {

u64 pow_mod(i64 base, u64 exp, u64 modulus) {
    if (modulus == 0) raise(ErrorCode::Domain, "pow_mod: modulus must be >= 1");
    if (modulus == 1) return 0;
    u64 b = reduce_mod(base, modulus);
    u64 acc = 1;
    while (exp > 0) {
        if (exp & 1) acc = mul_mod(acc, b, modulus);
        b = mul_mod(b, b, modulus);
        exp >>= 1;
    }
    return acc;
}

namespace {

bool sprp(u64 n, u64 a, u64 d, int s) {
    u64 x = pow_mod(static_cast<i64>(a % n), d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (n % p == 0) return n == p;
    }
    // trial division below 2^16 settles everything below 2^32
    for (u64 d = 17; d < 65536 && d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    if (n < (1ull << 32)) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // deterministic witness set for the full 64-bit range
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (a % n == 0) continue;
        if (!sprp(n, a, d, s)) return false;
    }
    return true;
}

u64 pow_checked(u64 p, u32 e) {
    u128 v = 1;
    for (u32 i = 0; i < e; ++i) {
        v *= p;
        if (v > UINT64_MAX) raise(ErrorCode::Domain, "prime power exceeds 64 bits");
    }
    return static_cast<u64>(v);
}

PrimePower PrimePower::make(u64 p, u32 e) {
    if (e == 0) raise(ErrorCode::Domain, "PrimePower: exponent must be >= 1");
    if (!is_prime(p)) raise(ErrorCode::Domain, "PrimePower: base is not prime");
    PrimePower pp;
    pp.p = p;
    pp.e = e;
    pp.value = pow_checked(p, e);
    return pp;
}

u64 isqrt(u64 n) {
    if (n == 0) return 0;
    u64 x = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    // the double estimate can land one off either way; squares are compared
    // in 128 bits because x*x wraps for n near 2^64
    if (x > 0xFFFFFFFFull) x = 0xFFFFFFFFull;
    while (x > 0 && static_cast<u128>(x) * x > n) --x;
    while (static_cast<u128>(x + 1) * (x + 1) <= n) ++x;
    return x;
}

int legendre_symbol(i64 a, u64 p) {
    if (p < 3 || p % 2 == 0) raise(ErrorCode::Domain, "legendre_symbol: p must be an odd prime");
    u64 r = reduce_mod(a, p);
    if (r == 0) return 0;
    u64 e = pow_mod(static_cast<i64>(r), (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

int jacobi_prime_power(i64 a, u64 p, u32 j) {
    if (j == 0) raise(ErrorCode::Domain, "jacobi_prime_power: j must be >= 1");
    int l = legendre_symbol(a, p);
    if (l == 0) return 0;
    return (j % 2 == 0) ? 1 : l;
}

std::optional<u64> sqrt_mod_prime(i64 d, u64 p) {
    if (p < 3 || p % 2 == 0) raise(ErrorCode::Domain, "sqrt_mod_prime: p must be an odd prime");
    u64 a = reduce_mod(d, p);
    if (a == 0) return 0;
    if (legendre_symbol(static_cast<i64>(a), p) != 1) return std::nullopt;
    u64 x;
    if (p % 4 == 3) {
        x = pow_mod(static_cast<i64>(a), (p + 1) / 4, p);
    } else {
        // Tonelli-Shanks with the least quadratic non-residue as generator
        u64 q = p - 1;
        u32 s = 0;
        while ((q & 1) == 0) { q >>= 1; ++s; }
        u64 z = 2;
        while (legendre_symbol(static_cast<i64>(z), p) != -1) ++z;
        u64 m = s;
        u64 c = pow_mod(static_cast<i64>(z), q, p);
        u64 t = pow_mod(static_cast<i64>(a), q, p);
        x = pow_mod(static_cast<i64>(a), (q + 1) / 2, p);
        while (t != 1) {
            u64 t2 = t;
            u64 i = 0;
            while (t2 != 1) { t2 = mul_mod(t2, t2, p); ++i; }
            u64 b = c;
            for (u64 k = 0; k + i + 1 < m; ++k) b = mul_mod(b, b, p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            x = mul_mod(x, b, p);
        }
    }
    return std::min(x, p - x);
}

std::optional<u64> lift_sqrt_odd(i64 d, u64 p, u32 e) {
    if (e == 0) raise(ErrorCode::Domain, "lift_sqrt_odd: exponent must be >= 1");
    u64 pe = pow_checked(p, e);
    u64 a = reduce_mod(d, pe);
    if (a % p == 0) raise(ErrorCode::Domain, "lift_sqrt_odd: d must be a unit mod p");
    auto root = sqrt_mod_prime(static_cast<i64>(a % p), p);
    if (!root) return std::nullopt;
    u64 x = *root;
    u64 mod = p;
    u64 inv2x = inv_mod(static_cast<i64>(mul_mod(2 % p, x % p, p)), p);
    for (u32 level = 1; level < e; ++level) {
        // x^2 ≡ a (mod p^level); fix the next digit with t = (a - x^2)/p^level * (2x)^{-1}
        u64 next = mod * p;
        u64 x2 = mul_mod(x, x, next);
        u64 diff = add_mod(a % next, next - x2, next);
        u64 t = mul_mod((diff / mod) % p, inv2x, p);
        x = add_mod(x, mul_mod(t, mod, next), next);
        mod = next;
    }
    return std::min(x, pe - x);
}

namespace {

// A x^2 + B x + C mod 2^level, all in 128-bit to dodge overflow.
u64 quad_eval_mod2(i64 A, i64 B, i64 C, u64 x, u32 level) {
    u128 mod = static_cast<u128>(1) << level;
    i128 v = static_cast<i128>(A) * x * x + static_cast<i128>(B) * x + C;
    i128 r = v % static_cast<i128>(mod);
    if (r < 0) r += static_cast<i128>(mod);
    return static_cast<u64>(r);
}

} // namespace

u64 solve_quadratic_2adic(i64 A, i64 B, i64 C, u32 target_level, u64 x0, u32 seed_level) {
    if (target_level == 0 || target_level > 62 || seed_level == 0 || seed_level > 62)
        raise(ErrorCode::Domain, "solve_quadratic_2adic: levels must be in [1, 62]");
    bool odd_b = (B % 2 != 0);
    if (!odd_b) {
        if (A % 2 == 0 || x0 % 2 == 0)
            raise(ErrorCode::Domain, "solve_quadratic_2adic: even B needs odd A and odd seed");
        if (reduce_mod(B, 4) != 0)
            raise(ErrorCode::Domain, "solve_quadratic_2adic: even B must be divisible by 4");
        if (seed_level < 3)
            raise(ErrorCode::Domain, "solve_quadratic_2adic: even B needs seed level >= 3");
    }
    if (quad_eval_mod2(A, B, C, x0, seed_level) != 0)
        raise(ErrorCode::Domain, "solve_quadratic_2adic: seed fails its own congruence");

    u64 x = x0;
    for (u32 j = seed_level; j < target_level; ++j) {
        // value ≡ 0 (mod 2^j) already; choose c in {0,1} to clear bit j
        if (quad_eval_mod2(A, B, C, x, j + 1) != 0) {
            x += odd_b ? (1ull << j) : (1ull << (j - 1));
            if (quad_eval_mod2(A, B, C, x, j + 1) != 0)
                raise(ErrorCode::Domain, "solve_quadratic_2adic: lift step failed");
        }
    }
    u64 mod = 1ull << target_level;
    x %= mod;
    if (x == 0) x = mod;
    if (quad_eval_mod2(A, B, C, x, target_level) != 0)
        raise(ErrorCode::Domain, "solve_quadratic_2adic: result check failed");
    return x;
}

int mobius_prime_power(u64 p, u32 j) {
    if (j == 0) raise(ErrorCode::Domain, "mobius_prime_power: j must be >= 1");
    (void)p;
    return j == 1 ? -1 : 0;
}

u64 inv_mod(i64 a, u64 m) {
    if (m < 2) raise(ErrorCode::Domain, "inv_mod: modulus must be >= 2");
    i64 r0 = static_cast<i64>(m), r1 = static_cast<i64>(reduce_mod(a, m));
    i64 t0 = 0, t1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        i64 r2 = r0 - q * r1; r0 = r1; r1 = r2;
        i64 t2 = t0 - q * t1; t0 = t1; t1 = t2;
    }
    if (r0 != 1) raise(ErrorCode::Domain, "inv_mod: argument is not a unit");
    return reduce_mod(t0, m);
}

} // namespace discrim::modarith
