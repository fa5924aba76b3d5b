#pragma once
// Rectangle, octahedron and associative-triple counting.
//
// A rectangle is an ordered tuple (x1, x2, y1, y2) whose four cells are all
// present; x1 = x2 and y1 = y2 are allowed, so every cell already supports a
// fully degenerate rectangle.  Its labelling is the quadruple
//   (z(x1,y1), z(x2,y1), z(x1,y2), z(x2,y2)).
// An octahedron is an ordered pair of rectangles with equal labellings, so
// the octahedron count is sum of m(q)^2 over labellings q, where m(q) counts
// rectangles labelled q.

#include <chrono>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "plsq/common.hpp"
#include "plsq/pls.hpp"

namespace plsq {

struct CountReport {
    BigCount value;
    std::string method;
    double elapsed_ms = 0.0;
};

namespace detail {

// Labelling histogram over all rectangles, keyed by four 16-bit labels.
// Runs in O(#rectangles) after an O(nx^2 * ny) sweep over column pairs.
inline std::unordered_map<u64, u64> rectangle_histogram(const Pls& a) {
    if (a.dims.nz > 0xffff) throw input_error("label count beyond 16-bit packing limit");
    std::unordered_map<u64, u64> hist;
    hist.reserve(a.cells.size() * 4 + 16);
    std::vector<std::pair<int, int>> both;  // (label at x1, label at x2) per shared row
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2) {
            both.clear();
            for (int y = 0; y < a.dims.ny; ++y) {
                int z1 = a.z_at(x1, y);
                if (z1 < 0) continue;
                int z2 = a.z_at(x2, y);
                if (z2 < 0) continue;
                both.emplace_back(z1, z2);
            }
            for (const auto& [a1, b1] : both)
                for (const auto& [a2, b2] : both) {
                    u64 key = (u64(u32(a1)) << 48) | (u64(u32(b1)) << 32) |
                              (u64(u32(a2)) << 16) | u64(u32(b2));
                    ++hist[key];
                }
        }
    return hist;
}

}  // namespace detail

inline BigCount count_rectangles(const Pls& a) {
    u128 total = 0;
    for (int x1 = 0; x1 < a.dims.nx; ++x1)
        for (int x2 = 0; x2 < a.dims.nx; ++x2) {
            u64 shared = 0;
            for (int y = 0; y < a.dims.ny; ++y)
                if (a.z_at(x1, y) >= 0 && a.z_at(x2, y) >= 0) ++shared;
            total += u128(shared) * shared;
        }
    return BigCount::of(total);
}

// Sum of m(q)^2 over rectangle labellings q.  The 128-bit accumulator cannot
// overflow while labels fit 16 bits (the sum is at most n^8 < 2^128), but the
// additions are checked anyway and fall back to arbitrary precision.
inline CountReport count_octahedra(const Pls& a) {
    auto t0 = std::chrono::steady_clock::now();
    auto hist = detail::rectangle_histogram(a);

    CountReport rep;
    rep.method = "hash-grouped";
    u128 total = 0;
    bool overflow = false;
    for (const auto& [key, m] : hist) {
        (void)key;
        u128 sq = u128(m) * m;
        if (total + sq < total) {
            overflow = true;
            break;
        }
        total += sq;
    }
    if (!overflow) {
        rep.value = BigCount::of(total);
    } else {
        boost::multiprecision::cpp_int big = 0;
        for (const auto& [key, m] : hist) {
            (void)key;
            big += boost::multiprecision::cpp_int(m) * m;
        }
        rep.value = BigCount::from_decimal(big.str());
        rep.method = "hash-grouped+bigint";
    }
    rep.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Triples (x, y, z) with x*(y*z) and (x*y)*z both defined and equal.
inline u64 count_associative_triples(const PartialBinaryOp& op) {
    u64 total = 0;
    for (int x = 0; x < op.n; ++x)
        for (int y = 0; y < op.n; ++y) {
            int xy = op.at(x, y);
            if (xy < 0) continue;
            for (int z = 0; z < op.n; ++z) {
                int yz = op.at(y, z);
                if (yz < 0) continue;
                int l = op.at(x, yz);
                int r = op.at(xy, z);
                if (l >= 0 && l == r) ++total;
            }
        }
    return total;
}

}  // namespace plsq
