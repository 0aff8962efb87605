// End-to-end verification of the least-modulus function D(n): the smallest
// m such that a^3 + a for 1 <= a <= n are pairwise distinct mod m^2.
// Provides the direct residue-table computation, the D(n) = 3^k cross-check,
// window collision sweeps, and a deterministic chunked range scanner with
// checkpoint/resume.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "casekit.hpp"
#include "error.hpp"
#include "modarith.hpp"

namespace discrim::verify {

using modarith::u32;
using modarith::u64;

struct TheoremRow {
    u64 n;
    u32 k;     // least k >= 1 with 3^{2k} >= n
    u64 d;     // computed D(n)
    bool match; // d == 3^k
};

struct ScanReport {
    u64 n_lo = 0;
    u64 n_hi = 0;
    std::vector<TheoremRow> rows;
    u64 failures = 0;     // rows with match == false
    double wall_time_s = 0.0;
    u32 worker_count = 0;
};

// Least k >= 1 with 3^{2k} >= n.
u32 k_of(u64 n);

// First pair a < b <= n with a^3+a ≡ b^3+b (mod m^2), minimizing b then a;
// nullopt when the values are pairwise distinct. table_cap bounds the
// residue-table size in entries; larger moduli fall back to bucketed passes.
std::optional<std::pair<u64, u64>> residue_injective(u64 n, u64 m,
                                                     u64 table_cap = 20'000'000);

// D(n) for n >= 2, searching m upward from the smallest m with m^2 >= n
// (smaller m always collide by pigeonhole).
u64 d_of(u64 n);

TheoremRow check_theorem(u64 n);

// Injectivity at m = 3^k plus spot checks of the factorization
// b^3+b-a^3-a = (b-a)(a^2+ab+b^2+1) and 3 never dividing the second factor.
bool lemma1_check(u64 n);

// One verified collision certificate for every m with n < m^2 and m < 3^k.
std::vector<casekit::CollisionCertificate> lemma2_scan(u64 n);

// Scan [n_lo, n_hi] on a fixed 4096-wide chunk grid. Chunk results are
// independent of worker count and assembled in ascending order, so the
// rows (and any checkpoint file) are byte-identical for a given range.
// A non-empty checkpoint_path enables resume: a valid prefix of previously
// written chunks is loaded instead of recomputed, and completed chunks are
// appended as the scan progresses.
ScanReport range_scan(u64 n_lo, u64 n_hi, u32 workers,
                      const std::string& checkpoint_path = "");

// "n,k,D,match" header plus one row per n; match rendered as 1/0.
// Timing and worker count are deliberately excluded so output is
// reproducible across runs and worker counts.
std::string report_csv(const ScanReport& report);

} // namespace discrim::verify
