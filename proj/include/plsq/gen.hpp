#pragma once
// Instance generators.  Everything here is deterministic for a fixed seed.

#include <numeric>
#include <vector>

#include "plsq/common.hpp"
#include "plsq/pls.hpp"

namespace plsq {

// Multiplication table of Z/n.
inline Pls gen_cyclic(int n) {
    if (n < 1) throw input_error("cyclic group order must be positive");
    std::vector<Cell> cells;
    cells.reserve(std::size_t(n) * n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) cells.push_back({x, y, (x + y) % n});
    return Pls({n, n, n}, std::move(cells));
}

// Direct product of cyclic groups, elements indexed in mixed radix with the
// first factor most significant.
inline Pls gen_cyclic_product(const std::vector<int>& orders) {
    if (orders.empty()) throw input_error("need at least one factor");
    long long n = 1;
    for (int m : orders) {
        if (m < 1) throw input_error("factor orders must be positive");
        n *= m;
        if (n > 4096) throw input_error("product order too large");
    }
    auto add = [&](int a, int b) {
        int out = 0;
        for (std::size_t i = orders.size(); i-- > 0;) {
            int m = orders[i];
            int da = a % m, db = b % m;
            a /= m;
            b /= m;
            int scale = 1;
            for (std::size_t j = i + 1; j < orders.size(); ++j) scale *= orders[j];
            out += ((da + db) % m) * scale;
        }
        return out;
    };
    int nn = int(n);
    std::vector<Cell> cells;
    cells.reserve(std::size_t(nn) * nn);
    for (int x = 0; x < nn; ++x)
        for (int y = 0; y < nn; ++y) cells.push_back({x, y, add(x, y)});
    return Pls({nn, nn, nn}, std::move(cells));
}

// Applies one permutation per coordinate class.  pi_x must have size nx, and
// similarly for the others.
inline Pls relabel(const Pls& a, const std::vector<int>& pi_x, const std::vector<int>& pi_y,
                   const std::vector<int>& pi_z) {
    auto check = [](const std::vector<int>& p, int n, const char* name) {
        if (int(p.size()) != n) throw input_error(std::string(name) + ": wrong permutation size");
        std::vector<char> seen(std::size_t(n), 0);
        for (int v : p) {
            if (v < 0 || v >= n || seen[std::size_t(v)])
                throw input_error(std::string(name) + ": not a permutation");
            seen[std::size_t(v)] = 1;
        }
    };
    check(pi_x, a.dims.nx, "pi_x");
    check(pi_y, a.dims.ny, "pi_y");
    check(pi_z, a.dims.nz, "pi_z");
    std::vector<Cell> cells;
    cells.reserve(a.cells.size());
    for (const Cell& c : a.cells)
        cells.push_back({pi_x[std::size_t(c.x)], pi_y[std::size_t(c.y)], pi_z[std::size_t(c.z)]});
    return Pls(a.dims, std::move(cells));
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> p(static_cast<std::size_t>(n), 0);
    std::iota(p.begin(), p.end(), 0);
    rng.shuffle(p);
    return p;
}

// Scrambles all three coordinate classes with permutations drawn from seed.
inline Pls scramble(const Pls& a, u64 seed) {
    Rng rng(seed);
    auto px = random_permutation(a.dims.nx, rng);
    auto py = random_permutation(a.dims.ny, rng);
    auto pz = random_permutation(a.dims.nz, rng);
    return relabel(a, px, py, pz);
}

// Keeps each cell independently with probability p.  Cells are visited in
// sorted order, so the outcome is a function of (instance, p, seed) only.
inline Pls restrict_random(const Pls& a, double p, u64 seed) {
    if (p < 0.0 || p > 1.0) throw input_error("keep probability must lie in [0,1]");
    Rng rng(seed);
    std::vector<Cell> kept;
    kept.reserve(a.cells.size());
    for (const Cell& c : a.cells)
        if (rng.real01() < p) kept.push_back(c);
    return Pls(a.dims, std::move(kept));
}

// Random Latin square of order n by row-by-row completion with backtracking.
// Candidate labels are tried in a seeded random order per cell.  This is not
// uniform over Latin squares; it is only meant to produce varied valid
// instances reproducibly.
inline Pls random_quasigroup(int n, u64 seed) {
    if (n < 1) throw input_error("order must be positive");
    Rng rng(seed);
    std::vector<int> grid(std::size_t(n) * n, -1);
    std::vector<u32> col_used(std::size_t(n), 0);  // bitmask per column, n <= 32

    if (n > 32) throw input_error("random quasigroup generation supports n <= 32");

    std::function<bool(int)> fill_row = [&](int y) -> bool {
        if (y == n) return true;
        u32 row_used = 0;
        std::function<bool(int)> place = [&](int x) -> bool {
            if (x == n) return fill_row(y + 1);
            std::vector<int> cand;
            for (int z = 0; z < n; ++z)
                if (!(row_used >> z & 1) && !(col_used[std::size_t(x)] >> z & 1))
                    cand.push_back(z);
            rng.shuffle(cand);
            for (int z : cand) {
                grid[std::size_t(y) * n + x] = z;
                row_used |= u32(1) << z;
                col_used[std::size_t(x)] |= u32(1) << z;
                if (place(x + 1)) return true;
                row_used &= ~(u32(1) << z);
                col_used[std::size_t(x)] &= ~(u32(1) << z);
                grid[std::size_t(y) * n + x] = -1;
            }
            return false;
        };
        return place(0);
    };

    if (!fill_row(0)) throw verify_error("row completion failed; this should not happen");

    std::vector<Cell> cells;
    cells.reserve(std::size_t(n) * n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) cells.push_back({x, y, grid[std::size_t(y) * n + x]});
    return Pls({n, n, n}, std::move(cells));
}

}  // namespace plsq
