#pragma once
// Shared plumbing: error taxonomy, search budgets, seeded RNG draws,
// 128-bit arithmetic helpers and a small deterministic parallel loop.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace plsq {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Error taxonomy, mapped onto process exit codes by the CLI:
//   input_error    -> 1: malformed instance or arguments
//   verify_error   -> 2: a stated postcondition or verification failed
//   resource_error -> 3: an explicit state budget ran out
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct verify_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string to_string_u128(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

inline u128 parse_u128(const std::string& s) {
    if (s.empty()) throw input_error("empty integer literal");
    u128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw input_error("bad integer literal: " + s);
        u128 next = v * 10 + u128(c - '0');
        if (next < v) throw input_error("integer literal overflows 128 bits: " + s);
        v = next;
    }
    return v;
}

// Exact count that usually fits 128 bits.  decimal always holds the value;
// lo is only meaningful while exact128 is true.
struct BigCount {
    u128 lo = 0;
    bool exact128 = true;
    std::string decimal = "0";

    static BigCount of(u128 v) { return {v, true, to_string_u128(v)}; }

    static BigCount from_decimal(std::string s) {
        BigCount c;
        c.decimal = s;
        try {
            c.lo = parse_u128(s);
            c.exact128 = true;
        } catch (const input_error&) {
            c.lo = 0;
            c.exact128 = false;
        }
        return c;
    }

    u128 as_u128() const {
        if (!exact128) throw verify_error("count does not fit in 128 bits: " + decimal);
        return lo;
    }

    friend bool operator==(const BigCount& a, const BigCount& b) { return a.decimal == b.decimal; }
};

// Default state budget for decomposition and prefix searches.
inline constexpr u64 kDefaultBudget = 100'000'000;

// Counts abstract states visited by a search.  tick() throws once the limit
// is crossed, so a caller sees either a complete result or resource_error,
// never a partial count.  limit 0 means unlimited.
struct Budget {
    u64 limit = 0;
    u64 used = 0;

    void tick(u64 k = 1) {
        used += k;
        if (limit != 0 && used > limit)
            throw resource_error("state budget exhausted after " + std::to_string(limit) + " states");
    }
    bool unlimited() const { return limit == 0; }
};

// Seeded deterministic draws.  Index draws use rejection sampling on the raw
// 64-bit stream instead of uniform_int_distribution, whose output differs
// between standard libraries.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(u64 seed) : eng(seed) {}

    u64 next() { return eng(); }

    // uniform on [0, n), n >= 1
    u64 index(u64 n) {
        if (n == 0) throw input_error("Rng::index: n must be positive");
        u64 bound = UINT64_MAX - UINT64_MAX % n;
        u64 v;
        do {
            v = eng();
        } while (v >= bound);
        return v % n;
    }

    // uniform on [0, 1), 53 random bits
    double real01() { return double(eng() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(index(i));
            std::swap(v[i - 1], v[j]);
        }
    }
};

inline unsigned default_threads() {
    if (const char* env = std::getenv("PLSQ_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Splits [0, n) into contiguous chunks, one worker thread per chunk.  The
// body receives (begin, end, chunk_index); callers keep per-chunk results in
// indexed slots and combine them in order, which keeps totals deterministic.
inline void parallel_chunks(u64 n, unsigned threads,
                            const std::function<void(u64, u64, unsigned)>& body) {
    if (threads <= 1 || n < 2 * threads) {
        body(0, n, 0);
        return;
    }
    u64 chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    unsigned used = 0;
    for (u64 begin = 0; begin < n; begin += chunk, ++used)
        pool.emplace_back(body, begin, std::min(n, begin + chunk), used);
    for (auto& t : pool) t.join();
}

}  // namespace plsq
