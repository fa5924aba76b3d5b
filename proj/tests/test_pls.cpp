#include <catch2/catch_amalgamated.hpp>

#include "plsq/gen.hpp"
#include "plsq/pls.hpp"

using namespace plsq;

TEST_CASE("validate accepts a Latin square and rejects out-of-range triples") {
    Pls a = gen_cyclic(3);
    REQUIRE(a.size() == 9);
    REQUIRE(is_full_latin_square(a));

    std::vector<Cell> bad{{0, 0, 0}, {0, 1, 3}};
    REQUIRE_THROWS_AS(Pls(Dims{2, 2, 2}, bad), input_error);
    try {
        Pls b(Dims{2, 2, 2}, bad);
    } catch (const input_error& e) {
        std::string msg = e.what();
        REQUIRE(msg.find("(0,1,3)") != std::string::npos);
    }
}

TEST_CASE("validate lists every pairwise linearity violation") {
    // two cells in the same row+column, two sharing row+label, two sharing
    // column+label
    std::vector<Cell> cells{{0, 0, 0}, {0, 0, 1}, {1, 1, 2}, {2, 1, 2}, {3, 2, 3}, {3, 3, 3}};
    ValidationReport rep = validate(cells, Dims{4, 4, 4});
    REQUIRE_FALSE(rep.ok);
    int same_xy = 0, same_xz = 0, same_yz = 0;
    for (const auto& v : rep.violations) {
        if (v.kind == ViolationKind::same_xy) ++same_xy;
        if (v.kind == ViolationKind::same_xz) ++same_xz;
        if (v.kind == ViolationKind::same_yz) ++same_yz;
    }
    REQUIRE(same_xy == 1);
    REQUIRE(same_xz == 1);
    REQUIRE(same_yz == 1);
    REQUIRE(rep.violations.size() == 3);
}

TEST_CASE("constructor rejects non-linear cell sets") {
    std::vector<Cell> cells{{0, 0, 0}, {0, 0, 1}};
    REQUIRE_THROWS_AS(Pls(Dims{2, 2, 2}, cells), input_error);
}

TEST_CASE("lookups agree with the cell list") {
    Pls a = gen_cyclic(4);
    for (const Cell& c : a.cells) {
        REQUIRE(a.z_at(c.x, c.y) == c.z);
        REQUIRE(a.y_at(c.x, c.z) == c.y);
        REQUIRE(a.x_at(c.y, c.z) == c.x);
        REQUIRE(a.contains(c.x, c.y, c.z));
    }
    REQUIRE(a.z_at(0, 0) == 0);
    Pls b = restrict_random(a, 0.5, 7);
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
            int z = b.z_at(x, y);
            if (z >= 0) REQUIRE(b.contains(x, y, z));
        }
}

TEST_CASE("coordinate lists are consistent") {
    Pls a = restrict_random(gen_cyclic(5), 0.7, 11);
    std::size_t total = 0;
    for (int x = 0; x < 5; ++x) {
        for (int idx : a.in_col[std::size_t(x)]) REQUIRE(a.cells[std::size_t(idx)].x == x);
        total += a.in_col[std::size_t(x)].size();
    }
    REQUIRE(total == a.size());
    for (int y = 0; y < 5; ++y)
        for (int idx : a.in_row[std::size_t(y)]) REQUIRE(a.cells[std::size_t(idx)].y == y);
    for (int z = 0; z < 5; ++z)
        for (int idx : a.in_label[std::size_t(z)]) REQUIRE(a.cells[std::size_t(idx)].z == z);
}

TEST_CASE("binary operation round-trip") {
    Pls a = gen_cyclic(4);
    PartialBinaryOp op = to_binary_op(a);
    REQUIRE(op.at(1, 2) == 3);
    Pls b = from_binary_op(op);
    REQUIRE(a == b);
}

TEST_CASE("permute_coords relabels coordinates as claimed") {
    Pls a = restrict_random(gen_cyclic(4), 0.6, 3);
    Pls b = permute_coords(a, {2, 1, 0});  // swap columns and labels
    REQUIRE(b.size() == a.size());
    for (const Cell& c : a.cells) REQUIRE(b.contains(c.z, c.y, c.x));
    Pls c = permute_coords(b, {2, 1, 0});
    REQUIRE(c == a);
}

TEST_CASE("density is cells over grid area") {
    Pls a = gen_cyclic(4);
    REQUIRE(a.density() == Catch::Approx(1.0));
    Pls b(Dims{4, 4, 4}, std::vector<Cell>{{0, 0, 0}, {1, 1, 2}});
    REQUIRE(b.density() == Catch::Approx(2.0 / 16.0));
}

TEST_CASE("dimensions may differ per class") {
    // a 2x3 grid with 4 labels
    std::vector<Cell> cells{{0, 0, 0}, {1, 0, 1}, {0, 1, 2}, {1, 1, 3}, {0, 2, 1}, {1, 2, 0}};
    Pls a(Dims{2, 3, 4}, cells);
    REQUIRE(a.size() == 6);
    REQUIRE_FALSE(is_full_latin_square(a));
    REQUIRE(a.z_at(0, 2) == 1);
}
