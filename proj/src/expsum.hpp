// Numerical evaluation of the quadratic exponential sums attached to
// f(a,b) = delta^4(a^2+ab+b^2) modulo p^{2r}, together with their closed
// forms and the bounds used to show the solution count N is positive.
// All phase numerators are reduced in exact integer arithmetic before any
// trigonometric call; direct sums use compensated accumulation.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "error.hpp"
#include "modarith.hpp"

namespace discrim::expsum {

using modarith::i64;
using modarith::u128;
using modarith::u32;
using modarith::u64;
using cdouble = std::complex<double>;

enum class Method { direct, closed };

// Evaluation context: modulus p^{2r} with scale delta, truncation X and
// the exponent rho with p^rho | X.
//   X = floor(p^2/9) p^{2r-2} (p = 5),  floor(p/9) p^{2r-1} (p >= 11)
//   rho = 2r-2 (p = 5),  2r-1 (p >= 11)
struct ExpSumCtx {
    u64 delta;
    u64 p;
    u32 r;
    u64 q;   // p^{2r}
    u64 X;
    u32 rho;
};

// Requires delta in {1,2,3} and prime p >= 5 with p ≡ 2 (mod 3); the
// p ≡ 1 (mod 3) moduli are handled constructively elsewhere.
ExpSumCtx make_ctx(u64 delta, u64 p, u32 r);

// e(num/den) = exp(2*pi*i*num/den); num is reduced mod den first.
cdouble unit_phase(i64 num, u64 den);

// Sum_{a mod p^j} e(c a^2 / p^j). Closed form p^{j/2} (c|p^j) eps with
// eps = 1 if p^j ≡ 1 (mod 4) and i otherwise; closed needs gcd(c,p)=1.
cdouble gauss_sum(i64 c, u64 p, u32 j, Method method);

// K(p^j; u) = Sum over units c mod p^j of e((u*inv(c) + c)/p^j).
cdouble kloosterman(i64 u, u64 p, u32 j);

// The proven ceiling for |K(p^j; u)|: 2 p^{j/2} for unit u, 1 when
// p^j | u (Ramanujan value mu(p^j)), 0 when p^t || u with 1 <= t < j.
double kloosterman_cap(i64 u, u64 p, u32 j);

// S_j(x,y) = Sum_{c unit} Sum_{a,b mod p^j} e((c f(a,b) + ax + by + c)/p^j).
// Closed form: p^j (-3|p^j) Sum_{c unit} e((inv(3 c delta^4)(-x^2+xy-y^2) + c)/p^j).
cdouble s_j(i64 x, i64 y, const ExpSumCtx& ctx, u32 j, Method method);

// T_j = Sum_{c unit mod p^j} Sum_{1<=a,b<=X} e((c f(a,b) + c)/p^j).
// Closed form (only for 1 <= j <= rho): X^2 p^{-j} (-3|p^j) mu(p^j).
cdouble t_j(const ExpSumCtx& ctx, u32 j, Method method);

// Completion identity: T_j = p^{-2j} Sum_{x,y mod p^j} S_j(x,y) W(x) W(y)
// with W(x) = Sum_{1<=a<=X} e(-ax/p^j), S_j evaluated in closed form.
cdouble t_j_transform(const ExpSumCtx& ctx, u32 j);

// N = #{(a,b) in [1,X]^2 : f(a,b) + 1 ≡ 0 (mod p^{2r})}.
u64 n_count_brute(const ExpSumCtx& ctx);

// N via the orthogonality expansion X^2/p^{2r} + p^{-2r} Sum_{j=1..2r} T_j.
// When rho >= 1 the split X^2 p^{-2r}(1+1/p) + p^{-2r} Sum_{j>rho} T_j is
// also evaluated and must agree.
double n_count_expansion(const ExpSumCtx& ctx);

struct CheckRow {
    std::string name;
    double measured;
    double bound;
    bool pass;
};

struct CheckReport {
    std::vector<CheckRow> rows;
    bool all_pass() const;
};

// Bound certification at level j: Kloosterman ceiling/vanishing/Ramanujan
// rows always; the incomplete-sum rows (row_sum <= p^j(2+ln p^j) and
// |T_j| <= 2 p^{3j/2}(2+ln p^j)^2) only for rho+1 <= j <= 2r, the range
// where those estimates hold (X exceeds p^j below it); the deviation row
// |N - X^2 p^{-2r}(1+1/p)| <= 2 p^r (2+ln p^{2r})^2 [* (1+1/(p sqrt p)) for
// p = 5] is emitted at j = 2r.
CheckReport check_bounds(const ExpSumCtx& ctx, u32 j);

// Cross-checks every identity on one context: T_j direct vs closed
// (j <= rho), direct vs completion transform (rho+1 <= j <= 2r, within
// budget), the N expansion vs brute count, the rho >= 1 split, spot
// direct-vs-closed S_j values, and the diagonal exclusion
// f(a,a) + 1 != 0 mod p^{2r}.
CheckReport identity_suite(const ExpSumCtx& ctx);

struct ThresholdReport {
    bool check1;  // p^r > 2 * 5^4 * (1 + ln p^r)^2
    bool check3;  // p^r > 8 * 17^2 * (1 + ln p^r)^2
    double q;     // sqrt(p^r)
    double f_q;   // q - 34 sqrt(2) (1 + 2 ln q); f_q > 0 iff check3
};

ThresholdReport threshold_check(u64 p, u32 r);
double threshold_aux_f(double x);

} // namespace discrim::expsum
