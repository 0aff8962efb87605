#include "expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace discrim::expsum {

using modarith::add_mod;
using modarith::inv_mod;
using modarith::is_prime;
using modarith::jacobi_prime_power;
using modarith::mobius_prime_power;
using modarith::mul_mod;
using modarith::pow_checked;
using modarith::reduce_mod;

namespace {

// cap on literal term counts for any single direct evaluation
constexpr u64 kTermBudget = 400'000'000;
// completion-identity evaluations are quadratic in p^j; keep them small
constexpr u64 kTransformCap = 125;

struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

struct KahanC {
    Kahan re, im;
    void add(cdouble z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cdouble value() const { return {re.s, im.s}; }
};

std::vector<cdouble> phase_table(u64 q) {
    std::vector<cdouble> ph(q);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(q);
    for (u64 t = 0; t < q; ++t) ph[t] = std::polar(1.0, step * static_cast<double>(t));
    return ph;
}

// inverse of every unit mod q (prime power); 0 at non-units
std::vector<u64> unit_inverses(u64 q, u64 p) {
    std::vector<u64> inv(q, 0);
    for (u64 c = 1; c < q; ++c)
        if (c % p != 0) inv[c] = inv_mod(static_cast<i64>(c), q);
    return inv;
}

void require_budget(u64 terms, const char* what) {
    if (terms > kTermBudget)
        raise(ErrorCode::Budget, std::string(what) + ": direct evaluation exceeds term budget");
}

u64 checked_pj(u64 p, u32 j) {
    if (j < 1) raise(ErrorCode::Domain, "level j must be >= 1");
    return pow_checked(p, j);
}

// histogram h[g] = #{(a,b) in [1,X]^2 : f(a,b) ≡ g mod q}, exact integers
std::vector<u64> f_histogram(const ExpSumCtx& ctx, u64 q, const char* what) {
    std::vector<u64> h(q, 0);
    u64 d2 = mul_mod(ctx.delta % q, ctx.delta % q, q);
    u64 d4 = mul_mod(d2, d2, q);
    if (ctx.X >= q) {
        // [1,X] covers each residue class floor(X/q) or +1 times
        require_budget(q * q, what);
        u64 full = ctx.X / q, rem = ctx.X % q;
        std::vector<u64> cnt(q);
        for (u64 al = 0; al < q; ++al) cnt[al] = full + (al >= 1 && al <= rem ? 1 : 0);
        for (u64 al = 0; al < q; ++al) {
            u64 aa = mul_mod(al, al, q);
            for (u64 be = 0; be < q; ++be) {
                u64 s = add_mod(add_mod(aa, mul_mod(al, be, q), q), mul_mod(be, be, q), q);
                h[mul_mod(d4, s, q)] += cnt[al] * cnt[be];
            }
        }
        return h;
    }
    require_budget(ctx.X * ctx.X, what);
    std::vector<u64> bmod(ctx.X + 1), bterm(ctx.X + 1);
    for (u64 b = 1; b <= ctx.X; ++b) {
        bmod[b] = b % q;
        bterm[b] = mul_mod(d4, mul_mod(bmod[b], bmod[b], q), q);
    }
    for (u64 a = 1; a <= ctx.X; ++a) {
        u64 am = a % q;
        u64 aterm = mul_mod(d4, mul_mod(am, am, q), q);
        u64 across = mul_mod(d4, am, q);
        for (u64 b = 1; b <= ctx.X; ++b) {
            u64 f = add_mod(add_mod(aterm, mul_mod(across, bmod[b], q), q), bterm[b], q);
            ++h[f];
        }
    }
    return h;
}

// W(x) = Sum_{a=1..X} e(-ax/q) via the exact geometric form
std::vector<cdouble> incomplete_sums(const ExpSumCtx& ctx, u64 q,
                                     const std::vector<cdouble>& ph) {
    std::vector<cdouble> W(q);
    auto em = [&](u64 t) { return ph[(q - t % q) % q]; };
    W[0] = cdouble(static_cast<double>(ctx.X), 0.0);
    u64 xq = ctx.X % q;
    for (u64 x = 1; x < q; ++x)
        W[x] = em(x) * (1.0 - em(mul_mod(xq, x, q))) / (1.0 - em(x));
    return W;
}

// K(q;u) for every u in [0,q) at once; compensated per entry
std::vector<cdouble> kloosterman_table(u64 p, u64 q, const std::vector<cdouble>& ph,
                                       const std::vector<u64>& inv) {
    require_budget(q * (q - q / p), "kloosterman table");
    std::vector<KahanC> acc(q);
    for (u64 c = 1; c < q; ++c) {
        if (c % p == 0) continue;
        u64 cb = inv[c];
        u64 idx = c; // (u*cb + c) mod q at u = 0, then step by cb
        for (u64 u = 0; u < q; ++u) {
            acc[u].add(ph[idx]);
            idx += cb;
            if (idx >= q) idx -= q;
        }
    }
    std::vector<cdouble> K(q);
    for (u64 u = 0; u < q; ++u) K[u] = acc[u].value();
    return K;
}

double ln_of(u64 v) { return std::log(static_cast<double>(v)); }

struct ExpansionParts {
    double expansion;
    bool has_split;
    double split;
};

ExpansionParts expansion_parts(const ExpSumCtx& ctx) {
    double q = static_cast<double>(ctx.q);
    double x2 = static_cast<double>(ctx.X) * static_cast<double>(ctx.X);
    double tail = 0.0; // sum over j > rho
    double head = 0.0; // sum over j <= rho
    for (u32 j = 1; j <= 2 * ctx.r; ++j) {
        double tj = t_j(ctx, j, Method::direct).real();
        (j <= ctx.rho ? head : tail) += tj;
    }
    ExpansionParts parts;
    parts.expansion = x2 / q + (head + tail) / q;
    parts.has_split = ctx.rho >= 1;
    parts.split = parts.has_split
                      ? x2 / q * (1.0 + 1.0 / static_cast<double>(ctx.p)) + tail / q
                      : 0.0;
    return parts;
}

} // namespace

ExpSumCtx make_ctx(u64 delta, u64 p, u32 r) {
    if (delta < 1 || delta > 3) raise(ErrorCode::Domain, "make_ctx: delta must be 1, 2 or 3");
    if (p < 5 || !is_prime(p)) raise(ErrorCode::Domain, "make_ctx: p must be a prime >= 5");
    if (p % 3 != 2)
        raise(ErrorCode::Domain,
              "make_ctx: p ≡ 1 (mod 3) has a direct root construction; this machinery "
              "requires p ≡ 2 (mod 3)");
    if (r < 1) raise(ErrorCode::Domain, "make_ctx: r must be >= 1");
    ExpSumCtx ctx;
    ctx.delta = delta;
    ctx.p = p;
    ctx.r = r;
    ctx.q = pow_checked(p, 2 * r);
    if (p == 5) {
        ctx.rho = 2 * r - 2;
        ctx.X = (p * p / 9) * pow_checked(p, 2 * r - 2);
    } else {
        ctx.rho = 2 * r - 1;
        ctx.X = (p / 9) * pow_checked(p, 2 * r - 1);
    }
    return ctx;
}

cdouble unit_phase(i64 num, u64 den) {
    if (den == 0) raise(ErrorCode::Domain, "unit_phase: zero denominator");
    u64 t = reduce_mod(num, den);
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) /
                               static_cast<double>(den));
}

cdouble gauss_sum(i64 c, u64 p, u32 j, Method method) {
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        raise(ErrorCode::Domain, "gauss_sum: p must be an odd prime");
    u64 q = checked_pj(p, j);
    u64 cr = reduce_mod(c, q);
    if (method == Method::closed) {
        if (cr % p == 0) raise(ErrorCode::Domain, "gauss_sum: closed form needs gcd(c, p) = 1");
        double mag = std::pow(static_cast<double>(p), static_cast<double>(j) / 2.0);
        int chi = jacobi_prime_power(c, p, j);
        cdouble eps = (q % 4 == 1) ? cdouble(1, 0) : cdouble(0, 1);
        return mag * static_cast<double>(chi) * eps;
    }
    require_budget(q, "gauss_sum");
    auto ph = phase_table(q);
    KahanC acc;
    for (u64 a = 1; a <= q; ++a) {
        u64 am = a % q;
        acc.add(ph[mul_mod(cr, mul_mod(am, am, q), q)]);
    }
    return acc.value();
}

cdouble kloosterman(i64 u, u64 p, u32 j) {
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        raise(ErrorCode::Domain, "kloosterman: p must be an odd prime");
    u64 q = checked_pj(p, j);
    require_budget(q, "kloosterman");
    u64 ur = reduce_mod(u, q);
    auto ph = phase_table(q);
    KahanC acc;
    for (u64 c = 1; c < q; ++c) {
        if (c % p == 0) continue;
        u64 cb = inv_mod(static_cast<i64>(c), q);
        acc.add(ph[add_mod(mul_mod(ur, cb, q), c, q)]);
    }
    return acc.value();
}

double kloosterman_cap(i64 u, u64 p, u32 j) {
    u64 q = checked_pj(p, j);
    u64 ur = reduce_mod(u, q);
    if (ur == 0) return j == 1 ? 1.0 : 0.0; // Ramanujan value mu(p^j)
    if (ur % p == 0) return 0.0;            // p^t || u with 1 <= t < j
    return 2.0 * std::pow(static_cast<double>(p), static_cast<double>(j) / 2.0);
}

cdouble s_j(i64 x, i64 y, const ExpSumCtx& ctx, u32 j, Method method) {
    u64 q = checked_pj(ctx.p, j);
    u64 xr = reduce_mod(x, q), yr = reduce_mod(y, q);
    u64 d2 = mul_mod(ctx.delta % q, ctx.delta % q, q);
    u64 d4 = mul_mod(d2, d2, q);
    auto ph = phase_table(q);
    if (method == Method::closed) {
        int chi = jacobi_prime_power(-3, ctx.p, j);
        // inv(3 delta^4) * (-x^2 + xy - y^2), then a c-bar twist per unit
        u64 quad = add_mod(mul_mod(xr, xr, q), mul_mod(yr, yr, q), q);
        quad = add_mod(quad, q - mul_mod(xr, yr, q), q); // x^2 - xy + y^2
        u64 w0 = mul_mod(inv_mod(static_cast<i64>(mul_mod(3 % q, d4, q)), q), (q - quad) % q, q);
        KahanC acc;
        for (u64 c = 1; c < q; ++c) {
            if (c % ctx.p == 0) continue;
            u64 cb = inv_mod(static_cast<i64>(c), q);
            acc.add(ph[add_mod(mul_mod(cb, w0, q), c, q)]);
        }
        return static_cast<double>(q) * static_cast<double>(chi) * acc.value();
    }
    u64 units = q - q / ctx.p;
    if (q > 100000) raise(ErrorCode::Budget, "s_j: modulus too large for direct evaluation");
    require_budget(units * q * q, "s_j");
    std::vector<u64> F(q * q);
    for (u64 a = 0; a < q; ++a) {
        u64 aa = mul_mod(a, a, q);
        for (u64 b = 0; b < q; ++b) {
            u64 s = add_mod(add_mod(aa, mul_mod(a, b, q), q), mul_mod(b, b, q), q);
            F[a * q + b] = mul_mod(d4, s, q);
        }
    }
    std::vector<u64> ax(q), by(q);
    for (u64 t = 0; t < q; ++t) {
        ax[t] = mul_mod(t, xr, q);
        by[t] = mul_mod(t, yr, q);
    }
    KahanC acc;
    for (u64 c = 1; c < q; ++c) {
        if (c % ctx.p == 0) continue;
        for (u64 a = 0; a < q; ++a) {
            const u64* row = &F[a * q];
            u64 base = add_mod(ax[a], c, q);
            for (u64 b = 0; b < q; ++b) {
                u64 idx = add_mod(add_mod(mul_mod(c, row[b], q), base, q), by[b], q);
                acc.add(ph[idx]);
            }
        }
    }
    return acc.value();
}

cdouble t_j(const ExpSumCtx& ctx, u32 j, Method method) {
    u64 q = checked_pj(ctx.p, j);
    if (method == Method::closed) {
        if (j > ctx.rho)
            raise(ErrorCode::Domain, "t_j closed form holds only for 1 <= j <= rho");
        double val = static_cast<double>(ctx.X) * static_cast<double>(ctx.X) /
                     static_cast<double>(q) *
                     static_cast<double>(jacobi_prime_power(-3, ctx.p, j)) *
                     static_cast<double>(mobius_prime_power(ctx.p, j));
        return {val, 0.0};
    }
    u64 units = q - q / ctx.p;
    require_budget(units * q, "t_j");
    auto h = f_histogram(ctx, q, "t_j");
    auto ph = phase_table(q);
    KahanC acc;
    for (u64 c = 1; c < q; ++c) {
        if (c % ctx.p == 0) continue;
        u64 idx = c; // c*(g+1) mod q at g = 0, stepping by c
        for (u64 g = 0; g < q; ++g) {
            if (h[g]) acc.add(static_cast<double>(h[g]) * ph[idx]);
            idx += c;
            if (idx >= q) idx -= q;
        }
    }
    return acc.value();
}

cdouble t_j_transform(const ExpSumCtx& ctx, u32 j) {
    u64 q = checked_pj(ctx.p, j);
    require_budget(q * q, "t_j_transform");
    auto ph = phase_table(q);
    auto inv = unit_inverses(q, ctx.p);
    auto W = incomplete_sums(ctx, q, ph);
    auto K = kloosterman_table(ctx.p, q, ph, inv);
    u64 d2 = mul_mod(ctx.delta % q, ctx.delta % q, q);
    u64 d4 = mul_mod(d2, d2, q);
    u64 neg_inv3d4 = (q - inv_mod(static_cast<i64>(mul_mod(3 % q, d4, q)), q)) % q;
    std::vector<u64> sq(q);
    for (u64 t = 0; t < q; ++t) sq[t] = mul_mod(t, t, q);
    // bucket W(x)W(y) by the Kloosterman argument u(x,y)
    std::vector<KahanC> bucket(q);
    for (u64 x = 0; x < q; ++x) {
        for (u64 y = 0; y < q; ++y) {
            u64 quad = add_mod(add_mod(sq[x], sq[y], q), q - mul_mod(x, y, q), q);
            bucket[mul_mod(neg_inv3d4, quad, q)].add(W[x] * W[y]);
        }
    }
    KahanC acc;
    for (u64 u = 0; u < q; ++u) acc.add(K[u] * bucket[u].value());
    double chi = static_cast<double>(jacobi_prime_power(-3, ctx.p, j));
    return chi / static_cast<double>(q) * acc.value();
}

u64 n_count_brute(const ExpSumCtx& ctx) {
    if (ctx.X > 10'000) // X^2 <= 10^8
        raise(ErrorCode::Budget, "n_count: X^2 exceeds the brute-force budget");
    u64 q = ctx.q;
    u64 d2 = mul_mod(ctx.delta % q, ctx.delta % q, q);
    u64 d4 = mul_mod(d2, d2, q);
    std::vector<u64> bmod(ctx.X + 1), bterm(ctx.X + 1);
    for (u64 b = 1; b <= ctx.X; ++b) {
        bmod[b] = b % q;
        bterm[b] = mul_mod(d4, mul_mod(bmod[b], bmod[b], q), q);
    }
    u64 count = 0;
    for (u64 a = 1; a <= ctx.X; ++a) {
        u64 am = a % q;
        u64 aterm = add_mod(mul_mod(d4, mul_mod(am, am, q), q), 1, q);
        u64 across = mul_mod(d4, am, q);
        for (u64 b = 1; b <= ctx.X; ++b) {
            u64 v = add_mod(add_mod(aterm, mul_mod(across, bmod[b], q), q), bterm[b], q);
            if (v == 0) ++count;
        }
    }
    return count;
}

double n_count_expansion(const ExpSumCtx& ctx) {
    ExpansionParts parts = expansion_parts(ctx);
    if (parts.has_split) {
        double tol = 1e-6 * std::max(1.0, std::fabs(parts.expansion));
        if (std::fabs(parts.split - parts.expansion) > tol)
            raise(ErrorCode::Domain, "n_count: head-term split disagrees with full expansion");
    }
    return parts.expansion;
}

bool CheckReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

CheckReport check_bounds(const ExpSumCtx& ctx, u32 j) {
    if (j < 1 || j > 2 * ctx.r)
        raise(ErrorCode::Domain, "check_bounds: need 1 <= j <= 2r");
    if (j >= ctx.rho + 1) {
        // certifying |T_j| walks O(p^{2j}) terms
        unsigned __int128 terms = 1;
        for (u32 i = 0; i < 2 * j && terms <= 100'000'000; ++i) terms *= ctx.p;
        if (terms > 100'000'000)
            raise(ErrorCode::Budget, "check_bounds: p^{2j} exceeds the evaluation budget");
    }
    u64 q = checked_pj(ctx.p, j);
    CheckReport rep;
    auto add_row = [&](std::string name, double measured, double bound) {
        rep.rows.push_back({std::move(name), measured, bound, measured <= bound});
    };
    std::string suffix = " p^j=" + std::to_string(q);

    auto ph = phase_table(q);
    auto inv = unit_inverses(q, ctx.p);
    auto K = kloosterman_table(ctx.p, q, ph, inv);
    double weil = 2.0 * std::pow(static_cast<double>(ctx.p), static_cast<double>(j) / 2.0);
    double kmax = 0.0, kdeg = 0.0;
    for (u64 u = 0; u < q; ++u) {
        double a = std::abs(K[u]);
        kmax = std::max(kmax, a);
        if (u != 0 && u % ctx.p == 0) kdeg = std::max(kdeg, a);
    }
    add_row("kloosterman_max" + suffix, kmax, weil + 1e-6);
    if (j >= 2) add_row("kloosterman_vanishing" + suffix, kdeg, 1e-9 * static_cast<double>(q));
    double mu = static_cast<double>(mobius_prime_power(ctx.p, j));
    add_row("kloosterman_ramanujan" + suffix, std::abs(K[0] - mu),
            1e-9 * static_cast<double>(q));

    if (j >= ctx.rho + 1) {
        // incomplete-summation bounds need X < p^j, i.e. j > rho
        auto W = incomplete_sums(ctx, q, ph);
        Kahan rowsum;
        for (u64 x = 0; x < q; ++x) rowsum.add(std::abs(W[x]));
        add_row("row_sum" + suffix, rowsum.s,
                static_cast<double>(q) * (2.0 + ln_of(q)));
        double tmag = std::abs(t_j(ctx, j, Method::direct));
        double tbound = 2.0 * std::pow(static_cast<double>(ctx.p), 1.5 * j) *
                        std::pow(2.0 + ln_of(q), 2.0);
        add_row("t_abs" + suffix, tmag, tbound);
    }

    if (j == 2 * ctx.r) {
        double main = static_cast<double>(ctx.X) * static_cast<double>(ctx.X) /
                      static_cast<double>(ctx.q) * (1.0 + 1.0 / static_cast<double>(ctx.p));
        double dev = std::fabs(static_cast<double>(n_count_brute(ctx)) - main);
        double bound = 2.0 * std::pow(static_cast<double>(ctx.p), static_cast<double>(ctx.r)) *
                       std::pow(2.0 + ln_of(ctx.q), 2.0);
        if (ctx.p == 5)
            bound *= 1.0 + 1.0 / (static_cast<double>(ctx.p) *
                                  std::sqrt(static_cast<double>(ctx.p)));
        add_row("n_deviation", dev, bound);
    }
    return rep;
}

CheckReport identity_suite(const ExpSumCtx& ctx) {
    CheckReport rep;
    auto add_row = [&](std::string name, double measured, double bound) {
        rep.rows.push_back({std::move(name), measured, bound, measured <= bound});
    };

    for (u32 j = 1; j <= 2 * ctx.r; ++j) {
        u64 q = checked_pj(ctx.p, j);
        if (j <= ctx.rho) {
            double diff = std::abs(t_j(ctx, j, Method::direct) - t_j(ctx, j, Method::closed));
            add_row("t_closed j=" + std::to_string(j), diff, 1e-6);
        } else if (q <= kTransformCap) {
            cdouble direct = t_j(ctx, j, Method::direct);
            double diff = std::abs(direct - t_j_transform(ctx, j));
            add_row("t_transform j=" + std::to_string(j), diff,
                    1e-6 * std::max(1.0, std::abs(direct)));
        }
    }

    u64 brute = n_count_brute(ctx);
    ExpansionParts parts = expansion_parts(ctx);
    add_row("n_expansion", std::fabs(parts.expansion - static_cast<double>(brute)), 1e-4);
    add_row("n_round", std::fabs(std::round(parts.expansion) - static_cast<double>(brute)), 0.0);
    if (parts.has_split)
        add_row("n_split", std::fabs(parts.split - parts.expansion),
                1e-6 * std::max(1.0, std::fabs(parts.expansion)));

    for (u32 j = 1; j <= std::min<u32>(2, 2 * ctx.r); ++j) {
        u64 q = checked_pj(ctx.p, j);
        if (q > kTransformCap) break;
        double scale = 1e-9 * std::pow(static_cast<double>(ctx.p), 1.5 * j);
        for (auto [x, y] : {std::pair<i64, i64>{0, 0}, {1, 2}, {3, 1}}) {
            double diff = std::abs(s_j(x, y, ctx, j, Method::direct) -
                                   s_j(x, y, ctx, j, Method::closed));
            add_row("s_spot j=" + std::to_string(j) + " x=" + std::to_string(x) +
                        " y=" + std::to_string(y),
                    diff, scale);
        }
        // the geometric form used for W(x) against a literal sum
        auto ph = phase_table(q);
        auto W = incomplete_sums(ctx, q, ph);
        for (u64 x : {u64{1}, q - 1}) {
            KahanC lit;
            for (u64 a = 1; a <= ctx.X; ++a) lit.add(ph[(q - mul_mod(a % q, x, q)) % q]);
            add_row("w_geometric j=" + std::to_string(j) + " x=" + std::to_string(x),
                    std::abs(lit.value() - W[x]), 1e-9 * std::max<double>(1.0, ctx.X));
        }
    }

    // diagonal exclusion: f(a,a) + 1 is never 0 mod p^{2r}
    require_budget(ctx.X, "diagonal scan");
    u64 q = ctx.q;
    u64 d2 = mul_mod(ctx.delta % q, ctx.delta % q, q);
    u64 d4 = mul_mod(d2, d2, q);
    u64 hits = 0;
    for (u64 a = 1; a <= ctx.X; ++a) {
        u64 am = a % q;
        u64 v = add_mod(mul_mod(mul_mod(3 % q, d4, q), mul_mod(am, am, q), q), 1, q);
        if (v == 0) ++hits;
    }
    add_row("diagonal_hits", static_cast<double>(hits), 0.0);
    return rep;
}

double threshold_aux_f(double x) {
    if (!(x > 0.0)) raise(ErrorCode::Domain, "threshold_aux_f: needs x > 0");
    return x - 34.0 * std::sqrt(2.0) * (1.0 + 2.0 * std::log(x));
}

ThresholdReport threshold_check(u64 p, u32 r) {
    if (p < 5 || !is_prime(p)) raise(ErrorCode::Domain, "threshold_check: p must be a prime >= 5");
    if (r < 1) raise(ErrorCode::Domain, "threshold_check: r must be >= 1");
    double lnpr = static_cast<double>(r) * std::log(static_cast<double>(p));
    double pr = std::exp(lnpr);
    ThresholdReport rep;
    rep.check1 = pr > 2.0 * 625.0 * (1.0 + lnpr) * (1.0 + lnpr);
    rep.check3 = pr > 8.0 * 289.0 * (1.0 + lnpr) * (1.0 + lnpr);
    rep.q = std::exp(lnpr / 2.0);
    rep.f_q = threshold_aux_f(rep.q);
    return rep;
}

} // namespace discrim::expsum
