#pragma once
// 2r-cycles in a partial Latin square.
//
// A label 2r-cycle is a sequence of 2r cells t_1 .. t_2r where consecutive
// cells share a row for odd steps and a column for even steps, the last
// sharing a column with the first.  Its signature is the label sequence
// (z_1, ..., z_2r).  Column and row cycles are the same picture with the
// coordinate classes rotated; their signatures list columns and rows
// respectively.  Cycles follow the closed-walk convention: cells may repeat,
// matching the trace formula below.
//
// Everything is implemented for the label kind; the other kinds reduce to it
// by swapping the signature class into the label slot, which leaves cell
// sequences in bijection.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "plsq/common.hpp"
#include "plsq/pls.hpp"

namespace plsq {

enum class CycleKind { label, column, row };

inline const char* to_string(CycleKind k) {
    switch (k) {
        case CycleKind::label: return "label";
        case CycleKind::column: return "column";
        case CycleKind::row: return "row";
    }
    return "?";
}

inline CycleKind cycle_kind_from_string(const std::string& s) {
    if (s == "label") return CycleKind::label;
    if (s == "column") return CycleKind::column;
    if (s == "row") return CycleKind::row;
    throw input_error("unknown cycle kind: " + s);
}

// Moves the signature class of the given kind into the label slot.  The swap
// is an involution, so it also maps results back.
inline Pls reduce_to_label_kind(const Pls& a, CycleKind kind) {
    switch (kind) {
        case CycleKind::label: return a;
        case CycleKind::column: return permute_coords(a, {2, 1, 0});
        case CycleKind::row: return permute_coords(a, {0, 2, 1});
    }
    throw input_error("bad cycle kind");
}

namespace detail {

template <class T>
std::vector<T> mat_mult(const std::vector<T>& lhs, const std::vector<T>& rhs, int n) {
    std::vector<T> out(std::size_t(n) * n, T(0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const T& v = lhs[std::size_t(i) * n + k];
            if (v == T(0)) continue;
            for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] += v * rhs[std::size_t(k) * n + j];
        }
    return out;
}

template <class T>
T closed_walk_trace(const Pls& a, int r) {
    int p = a.dims.nx, q = a.dims.ny;
    // B = A A^T over the cell adjacency between columns and rows.
    std::vector<T> b(std::size_t(p) * p, T(0));
    for (int x1 = 0; x1 < p; ++x1)
        for (int x2 = 0; x2 < p; ++x2) {
            u64 shared = 0;
            for (int y = 0; y < q; ++y)
                if (a.z_at(x1, y) >= 0 && a.z_at(x2, y) >= 0) ++shared;
            b[std::size_t(x1) * p + x2] = T(shared);
        }
    std::vector<T> acc = b;
    for (int i = 1; i < r; ++i) acc = mat_mult(acc, b, p);
    T tr(0);
    for (int i = 0; i < p; ++i) tr += acc[std::size_t(i) * p + i];
    return tr;
}

}  // namespace detail

// Number of 2r-cycles of the given kind, i.e. rooted closed walks of length
// 2r in the bipartite cell graph: trace((A A^T)^r).
inline BigCount count_cycles(const Pls& pls, CycleKind kind, int r) {
    if (r < 2) throw input_error("cycle half-length r must be at least 2");
    Pls a = reduce_to_label_kind(pls, kind);
    // Entries of (A A^T)^r are at most (nx ny)^r; stay in 128 bits when safe.
    double bits = 0.0;
    if (a.dims.nx > 1 || a.dims.ny > 1)
        bits = double(r) * (std::log2(double(std::max(a.dims.nx, 2))) +
                            std::log2(double(std::max(a.dims.ny, 2))));
    if (bits < 120.0) return BigCount::of(detail::closed_walk_trace<u128>(a, r));
    return BigCount::from_decimal(detail::closed_walk_trace<boost::multiprecision::cpp_int>(a, r).str());
}

// Number of cell sequences realizing one signature.  The first cell
// determines the rest of the walk, so the count never exceeds the number of
// cells carrying the first signature value; with equal dims that is the
// trivial maximum n.
inline u64 count_signature_occurrences(const Pls& pls, CycleKind kind,
                                       const std::vector<int>& signature) {
    if (signature.size() < 4 || signature.size() % 2 != 0)
        throw input_error("signature length must be even and at least 4");
    Pls a = reduce_to_label_kind(pls, kind);
    int two_r = int(signature.size());
    for (int z : signature)
        if (z < 0 || z >= a.dims.nz) throw input_error("signature value out of range");
    u64 hits = 0;
    for (int ci : a.in_label[std::size_t(signature[0])]) {
        const Cell& start = a.cells[std::size_t(ci)];
        int cx = start.x, cy = start.y;
        bool alive = true;
        for (int d = 1; d < two_r && alive; ++d) {
            int z = signature[std::size_t(d)];
            if (d % 2 == 1) {  // share the row
                int nx = a.x_at(cy, z);
                if (nx < 0) alive = false;
                else cx = nx;
            } else {  // share the column
                int ny = a.y_at(cx, z);
                if (ny < 0) alive = false;
                else cy = ny;
            }
        }
        if (alive && cx == start.x) ++hits;  // closing step shares the column
    }
    return hits;
}

struct SignatureCount {
    std::vector<int> signature;
    u64 count = 0;
};

namespace detail {

// Depth-first sweep over realizable signature prefixes.  A node at depth d
// carries every realization of the current d-label prefix as a pair
// (start cell, current cell); the start cell determines the walk, so a node
// holds at most min(nx, ny) pairs.  At depth 2r-1 the leaf callback receives
// the prefix and its realizations; the closing cell of a realization (s, c)
// is the one at (column of s, row of c), if present.
class PrefixWalk {
  public:
    using Pair = std::pair<int, int>;
    using Leaf = std::function<void(const std::vector<int>&, const std::vector<Pair>&)>;

    PrefixWalk(const Pls& a, int r, Budget& budget) : a_(a), two_r_(2 * r), budget_(budget) {
        scratch_.assign(std::size_t(two_r_), {});
        touched_.assign(std::size_t(two_r_), {});
        for (auto& s : scratch_) s.assign(std::size_t(a.dims.nz), {});
    }

    void run(const Leaf& leaf) {
        leaf_ = &leaf;
        prefix_.clear();
        std::vector<Pair> pairs;
        for (int z = 0; z < a_.dims.nz; ++z) {
            const auto& group = a_.in_label[std::size_t(z)];
            if (group.empty()) continue;
            pairs.clear();
            for (int ci : group) pairs.emplace_back(ci, ci);
            prefix_.push_back(z);
            descend(1, pairs);
            prefix_.pop_back();
        }
    }

  private:
    void descend(int depth, const std::vector<Pair>& pairs) {
        budget_.tick(pairs.size());
        if (depth == two_r_ - 1) {
            (*leaf_)(prefix_, pairs);
            return;
        }
        auto& buckets = scratch_[std::size_t(depth)];
        auto& touched = touched_[std::size_t(depth)];
        touched.clear();
        bool share_row = depth % 2 == 1;
        for (const Pair& pr : pairs) {
            const Cell& c = a_.cells[std::size_t(pr.second)];
            const auto& next = share_row ? a_.in_row[std::size_t(c.y)] : a_.in_col[std::size_t(c.x)];
            for (int ni : next) {
                int z = a_.cells[std::size_t(ni)].z;
                if (buckets[std::size_t(z)].empty()) touched.push_back(z);
                buckets[std::size_t(z)].emplace_back(pr.first, ni);
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int z : touched) {
            std::vector<Pair> sub = std::move(buckets[std::size_t(z)]);
            buckets[std::size_t(z)].clear();
            prefix_.push_back(z);
            descend(depth + 1, sub);
            prefix_.pop_back();
        }
    }

    const Pls& a_;
    int two_r_;
    Budget& budget_;
    const Leaf* leaf_ = nullptr;
    std::vector<int> prefix_;
    std::vector<std::vector<std::vector<Pair>>> scratch_;
    std::vector<std::vector<int>> touched_;
};

}  // namespace detail

// All signatures occurring at least ceil(theta * n) times, where n is the
// ambient size of the kind class.  Counts are exact.
inline std::vector<SignatureCount> popular_cycles(const Pls& pls, CycleKind kind, int r,
                                                  double theta, Budget& budget) {
    if (r < 2) throw input_error("cycle half-length r must be at least 2");
    if (theta <= 0.0 || theta > 1.0) throw input_error("theta must lie in (0, 1]");
    Pls a = reduce_to_label_kind(pls, kind);
    u64 ambient = u64(a.dims.nz);
    u64 needed = u64(std::ceil(theta * double(ambient)));
    if (needed == 0) needed = 1;
    u64 occurrence_cap = u64(std::min(a.dims.nx, a.dims.ny));

    std::vector<SignatureCount> out;
    detail::PrefixWalk walk(a, r, budget);
    walk.run([&](const std::vector<int>& prefix, const std::vector<detail::PrefixWalk::Pair>& pairs) {
        // Bucket realizations by the label of their closing cell.
        std::map<int, u64> closing;
        for (const auto& [s, c] : pairs) {
            int x0 = a.cells[std::size_t(s)].x;
            int y1 = a.cells[std::size_t(c)].y;
            int z = a.z_at(x0, y1);
            if (z >= 0) ++closing[z];
        }
        for (const auto& [z, cnt] : closing) {
            if (cnt > occurrence_cap)
                throw verify_error("signature occurrence exceeds its trivial maximum");
            if (cnt >= needed) {
                SignatureCount sc;
                sc.signature = prefix;
                sc.signature.push_back(z);
                sc.count = cnt;
                out.push_back(std::move(sc));
            }
        }
    });
    return out;
}

}  // namespace plsq
