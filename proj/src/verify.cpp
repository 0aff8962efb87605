#include "verify.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace discrim::verify {

using modarith::isqrt;
using modarith::mul_mod;
using modarith::pow_checked;
using modarith::u128;

namespace {

constexpr u64 kChunk = 4096;

u64 pow3(u32 k) { return pow_checked(3, k); }

// smallest m with m^2 >= n
u64 ceil_sqrt(u64 n) {
    u64 s = isqrt(n);
    return s * s == n ? s : s + 1;
}

u64 fnv1a(std::string_view s) {
    u64 h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(u64 v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string row_csv(const TheoremRow& row) {
    std::string line = std::to_string(row.n);
    line += ',';
    line += std::to_string(row.k);
    line += ',';
    line += std::to_string(row.d);
    line += ',';
    line += row.match ? '1' : '0';
    line += '\n';
    return line;
}

struct ChunkOut {
    std::vector<TheoremRow> rows;
    std::string payload; // canonical CSV lines for the rows
    u64 failures = 0;
};

// One grid cell: first-collision bound b_m for every modulus up to 3^{k(hi)},
// then D(n) for each n by walking m upward until the bound exceeds n.
ChunkOut compute_chunk(u64 lo, u64 hi) {
    u32 k_hi = k_of(hi);
    u64 m_max = pow3(k_hi);
    u64 q_max = m_max * m_max;
    // b_m = smallest b with a collision among a = 1..b, or hi+2 when the
    // values stay distinct for every a <= hi+1 (injective for all n here)
    std::vector<u64> bm(m_max + 1, 0);
    std::vector<u32> stamp(q_max, 0);
    u32 epoch = 0;
    for (u64 m = 2; m <= m_max; ++m) {
        u64 q = m * m;
        ++epoch;
        u64 limit = std::min(q + 1, hi + 1); // any collision shows up by q+1
        u64 b = hi + 2;
        for (u64 a = 1; a <= limit; ++a) {
            u64 am = a % q;
            u64 r = (am * am % q * am + am) % q;
            if (stamp[r] == epoch) {
                b = a;
                break;
            }
            stamp[r] = epoch;
        }
        bm[m] = b;
    }
    ChunkOut out;
    out.rows.reserve(hi - lo + 1);
    for (u64 n = lo; n <= hi; ++n) {
        u64 m = ceil_sqrt(n);
        while (m <= m_max && bm[m] <= n) ++m;
        if (m > m_max)
            raise(ErrorCode::Exhausted, "range_scan: no injective modulus up to 3^k at n=" +
                                            std::to_string(n));
        u32 k = k_of(n);
        TheoremRow row{n, k, m, m == pow3(k)};
        out.failures += row.match ? 0 : 1;
        out.payload += row_csv(row);
        out.rows.push_back(row);
    }
    return out;
}

struct Slot {
    bool ready = false;
    ChunkOut out;
    std::exception_ptr err;
};

struct RestoredPrefix {
    std::vector<ChunkOut> chunks; // hash-verified, in grid order
};

std::string header_line(u64 n_lo, u64 n_hi) {
    return "# scan " + std::to_string(n_lo) + " " + std::to_string(n_hi) + " chunk " +
           std::to_string(kChunk) + " v1";
}

bool parse_u64(std::string_view s, u64& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

// Load the longest valid prefix of a previous run's checkpoint. A corrupt or
// partially written tail is dropped; a header for different scan parameters
// is an error rather than silently recomputing.
RestoredPrefix load_checkpoint(const std::string& path, u64 n_lo, u64 n_hi, u64 nchunks) {
    RestoredPrefix restored;
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) return restored; // nothing to resume
    std::string header;
    if (!std::getline(in, header) || header.empty()) return restored;
    if (header != header_line(n_lo, n_hi))
        raise(ErrorCode::Io, "checkpoint belongs to a different scan: " + path);
    std::string line;
    for (u64 i = 0; i < nchunks; ++i) {
        u64 lo = n_lo + i * kChunk;
        u64 hi = std::min(n_hi, lo + kChunk - 1);
        if (!std::getline(in, line)) return restored;
        std::istringstream head(line);
        std::string tag, lo_s, hi_s, hash_s;
        head >> tag >> lo_s >> hi_s >> hash_s;
        u64 got_lo = 0, got_hi = 0;
        if (tag != "chunk" || !parse_u64(lo_s, got_lo) || !parse_u64(hi_s, got_hi) ||
            got_lo != lo || got_hi != hi || hash_s.size() != 16)
            return restored;
        ChunkOut out;
        bool ok = true;
        for (u64 n = lo; n <= hi && ok; ++n) {
            if (!std::getline(in, line)) {
                ok = false;
                break;
            }
            // strict field parse; the canonical re-rendering must round-trip
            u64 f[4];
            size_t pos = 0;
            for (int fi = 0; fi < 4 && ok; ++fi) {
                size_t next = fi < 3 ? line.find(',', pos) : line.size();
                if (next == std::string::npos) {
                    ok = false;
                    break;
                }
                ok = parse_u64(std::string_view(line).substr(pos, next - pos), f[fi]);
                pos = next + 1;
            }
            if (!ok) break;
            TheoremRow row{f[0], static_cast<u32>(f[1]), f[2], f[3] == 1};
            if (row.n != n || (f[3] != 0 && f[3] != 1) || row_csv(row) != line + "\n") {
                ok = false;
                break;
            }
            out.failures += row.match ? 0 : 1;
            out.payload += row_csv(row);
            out.rows.push_back(row);
        }
        if (!ok || hex64(fnv1a(out.payload)) != hash_s) return restored;
        restored.chunks.push_back(std::move(out));
    }
    return restored;
}

void append_chunk(std::ofstream& out, u64 lo, u64 hi, const ChunkOut& chunk,
                  const std::string& path) {
    out << "chunk " << lo << ' ' << hi << ' ' << hex64(fnv1a(chunk.payload)) << '\n';
    out << chunk.payload;
    out.flush();
    if (!out) raise(ErrorCode::Io, "cannot write checkpoint: " + path);
}

} // namespace

u32 k_of(u64 n) {
    if (n < 2) raise(ErrorCode::Domain, "k_of: n must be >= 2");
    u32 k = 1;
    u128 nine_k = 9;
    while (nine_k < n) {
        nine_k *= 9;
        ++k;
    }
    return k;
}

std::optional<std::pair<u64, u64>> residue_injective(u64 n, u64 m, u64 table_cap) {
    if (n < 2 || m < 1) raise(ErrorCode::Domain, "residue_injective: need n >= 2, m >= 1");
    if (table_cap < 2) raise(ErrorCode::BadArg, "residue_injective: table_cap too small");
    if (m > 0xFFFFFFFFull)
        raise(ErrorCode::Budget, "residue_injective: modulus too large");
    u64 q = m * m;
    if (q <= table_cap) {
        std::vector<u32> first(q, 0);
        u64 limit = std::min(n, q + 1); // injective past q+1 means injective forever
        for (u64 a = 1; a <= limit; ++a) {
            u64 am = a % q;
            u64 r = q < (1ull << 31) ? (am * am % q * am + am) % q
                                     : (mul_mod(mul_mod(am, am, q), am, q) + am) % q;
            if (first[r] != 0) return std::pair<u64, u64>(first[r], a);
            first[r] = static_cast<u32>(a);
        }
        return std::nullopt;
    }
    // bucketed passes over the residue space; each pass finds its first
    // collision in scan order, the global minimum over buckets wins
    if (n >= std::numeric_limits<u32>::max())
        raise(ErrorCode::Budget, "residue_injective: n too large for bucketed passes");
    std::optional<std::pair<u64, u64>> best;
    u64 pigeon = std::min(n, q + 1);
    for (u64 lo = 0; lo < q; lo += table_cap) {
        u64 hi = std::min(q, lo + table_cap);
        std::vector<u32> first(hi - lo, 0);
        u64 limit = best ? best->second - 1 : pigeon;
        for (u64 a = 1; a <= limit; ++a) {
            u64 am = a % q;
            u64 r = (mul_mod(mul_mod(am, am, q), am, q) + am) % q;
            if (r < lo || r >= hi) continue;
            u64 idx = r - lo;
            if (first[idx] != 0) {
                best = std::pair<u64, u64>(first[idx], a);
                break;
            }
            first[idx] = static_cast<u32>(a);
        }
    }
    return best;
}

u64 d_of(u64 n) {
    if (n < 2) raise(ErrorCode::Domain, "d_of: n must be >= 2");
    u64 cap = pow3(k_of(n));
    for (u64 m = ceil_sqrt(n); m <= cap; ++m)
        if (!residue_injective(n, m)) return m;
    raise(ErrorCode::Exhausted, "d_of: no injective modulus up to 3^k");
}

TheoremRow check_theorem(u64 n) {
    u32 k = k_of(n);
    u64 d = d_of(n);
    return {n, k, d, d == pow3(k)};
}

bool lemma1_check(u64 n) {
    if (n < 2) raise(ErrorCode::Domain, "lemma1_check: n must be >= 2");
    if (residue_injective(n, pow3(k_of(n)))) return false;
    std::mt19937_64 rng(0x1ec0ffee5eedULL);
    u64 span = std::min<u64>(n, 1'000'000'000'000ull); // keep cubes inside 128 bits
    for (int i = 0; i < 100; ++i) {
        u64 b = 2 + rng() % (span - 1);
        u64 a = 1 + rng() % (b - 1);
        u128 lhs = (u128(b) * b * b + b) - (u128(a) * a * a + a);
        u128 quad = u128(a) * a + u128(a) * b + u128(b) * b + 1;
        if (lhs != u128(b - a) * quad) return false;
        if (quad % 3 == 0) return false;
    }
    return true;
}

std::vector<casekit::CollisionCertificate> lemma2_scan(u64 n) {
    if (n < 2) raise(ErrorCode::Domain, "lemma2_scan: n must be >= 2");
    u64 m_hi = pow3(k_of(n)) - 1;
    std::vector<casekit::CollisionCertificate> certs;
    for (u64 m = isqrt(n) + 1; m <= m_hi; ++m) {
        auto cert = casekit::collide(n, m);
        if (!casekit::verify_certificate(cert))
            raise(ErrorCode::Domain,
                  "lemma2_scan: certificate failed verification at m=" + std::to_string(m));
        certs.push_back(cert);
    }
    return certs;
}

ScanReport range_scan(u64 n_lo, u64 n_hi, u32 workers, const std::string& checkpoint_path) {
    if (n_lo < 2 || n_hi < n_lo)
        raise(ErrorCode::Domain, "range_scan: need 2 <= n_lo <= n_hi");
    {
        u64 m_max = pow3(k_of(n_hi));
        if (m_max * m_max > 20'000'000)
            raise(ErrorCode::Budget, "range_scan: residue tables for n_hi exceed the memory cap");
    }
    auto t0 = std::chrono::steady_clock::now();
    u64 nchunks = (n_hi - n_lo) / kChunk + 1;
    if (workers == 0) {
        unsigned hc = std::thread::hardware_concurrency();
        workers = hc ? hc : 1;
    }
    workers = static_cast<u32>(std::min<u64>(workers, nchunks));

    ScanReport report;
    report.n_lo = n_lo;
    report.n_hi = n_hi;
    report.worker_count = workers;

    RestoredPrefix restored;
    std::ofstream ckpt;
    if (!checkpoint_path.empty()) {
        restored = load_checkpoint(checkpoint_path, n_lo, n_hi, nchunks);
        ckpt.open(checkpoint_path, std::ios::binary | std::ios::trunc);
        if (!ckpt.is_open())
            raise(ErrorCode::Io, "cannot open checkpoint for writing: " + checkpoint_path);
        ckpt << header_line(n_lo, n_hi) << '\n';
    }
    u64 first_missing = restored.chunks.size();
    for (u64 i = 0; i < first_missing; ++i) {
        ChunkOut& chunk = restored.chunks[i];
        u64 lo = n_lo + i * kChunk;
        u64 hi = std::min(n_hi, lo + kChunk - 1);
        if (ckpt.is_open()) append_chunk(ckpt, lo, hi, chunk, checkpoint_path);
        report.failures += chunk.failures;
        report.rows.insert(report.rows.end(), chunk.rows.begin(), chunk.rows.end());
    }

    if (first_missing < nchunks) {
        std::vector<Slot> slots(nchunks);
        std::atomic<u64> next{first_missing};
        std::mutex mu;
        std::condition_variable cv;
        auto work = [&] {
            for (;;) {
                u64 i = next.fetch_add(1);
                if (i >= nchunks) return;
                u64 lo = n_lo + i * kChunk;
                u64 hi = std::min(n_hi, lo + kChunk - 1);
                Slot local;
                try {
                    local.out = compute_chunk(lo, hi);
                } catch (...) {
                    local.err = std::current_exception();
                }
                std::lock_guard<std::mutex> lk(mu);
                slots[i].out = std::move(local.out);
                slots[i].err = local.err;
                slots[i].ready = true;
                cv.notify_all();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (u32 w = 0; w < workers; ++w) pool.emplace_back(work);
        std::exception_ptr failure;
        for (u64 i = first_missing; i < nchunks; ++i) {
            std::unique_lock<std::mutex> lk(mu);
            cv.wait(lk, [&] { return slots[i].ready; });
            Slot slot = std::move(slots[i]);
            lk.unlock();
            if (slot.err) {
                failure = slot.err;
                next.store(nchunks); // stop handing out new chunks
                break;
            }
            u64 lo = n_lo + i * kChunk;
            u64 hi = std::min(n_hi, lo + kChunk - 1);
            if (ckpt.is_open()) append_chunk(ckpt, lo, hi, slot.out, checkpoint_path);
            report.failures += slot.out.failures;
            report.rows.insert(report.rows.end(), slot.out.rows.begin(), slot.out.rows.end());
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string report_csv(const ScanReport& report) {
    std::string out = "n,k,D,match\n";
    for (const auto& row : report.rows) out += row_csv(row);
    return out;
}

} // namespace discrim::verify
