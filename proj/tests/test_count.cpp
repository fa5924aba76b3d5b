#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "plsq/count.hpp"
#include "plsq/gen.hpp"
#include "plsq/quadrangle.hpp"

using namespace plsq;

TEST_CASE("a single cell supports one rectangle and one octahedron") {
    Pls a(Dims{2, 2, 2}, {{0, 0, 0}});
    REQUIRE(count_rectangles(a) == BigCount::of(1));
    REQUIRE(count_octahedra(a).value == BigCount::of(1));
}

TEST_CASE("group tables hit the fifth-power octahedron count") {
    REQUIRE(count_octahedra(gen_cyclic(2)).value == BigCount::of(32));
    for (int n = 2; n <= 4; ++n) {
        u64 expect = 1;
        for (int i = 0; i < 5; ++i) expect *= u64(n);
        REQUIRE(count_octahedra(gen_cyclic(n)).value == BigCount::of(expect));
    }
    REQUIRE(count_octahedra(gen_cyclic_product({2, 2})).value == BigCount::of(1024));
}

TEST_CASE("rectangle and octahedron counts match the nested-loop oracles") {
    std::vector<Pls> instances;
    instances.push_back(gen_cyclic(2));
    instances.push_back(gen_cyclic(3));
    instances.push_back(restrict_random(gen_cyclic(3), 0.7, 5));
    instances.push_back(Pls(Dims{2, 3, 4},
                            {{0, 0, 0}, {1, 0, 1}, {0, 1, 2}, {1, 1, 3}, {0, 2, 1}, {1, 2, 0}}));
    for (const Pls& a : instances) {
        REQUIRE(count_rectangles(a) == BigCount::of(oracle::count_rectangles(a)));
        REQUIRE(count_octahedra(a).value == BigCount::of(oracle::count_octahedra(a)));
    }
}

TEST_CASE("twelve-coordinate enumeration agrees with rectangle pairs") {
    std::vector<Pls> instances;
    instances.push_back(gen_cyclic(2));
    instances.push_back(gen_cyclic(3));
    instances.push_back(restrict_random(gen_cyclic(3), 0.6, 9));
    instances.push_back(Pls(Dims{2, 2, 3}, {{0, 0, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 2}}));
    for (const Pls& a : instances) {
        u64 pairs = oracle::count_octahedra(a);
        REQUIRE(oracle::count_octahedra_symmetric(a) == pairs);
        REQUIRE(count_octahedra(a).value == BigCount::of(pairs));
    }
}

TEST_CASE("group tables have every triple associative") {
    for (int n = 2; n <= 6; ++n) {
        PartialBinaryOp op = to_binary_op(gen_cyclic(n));
        REQUIRE(count_associative_triples(op) == u64(n) * u64(n) * u64(n));
    }
    REQUIRE(count_associative_triples(to_binary_op(gen_cyclic_product({2, 2}))) == 64);
}

TEST_CASE("restrictions keep associative triples at or below the cube") {
    for (u64 seed : {1, 2, 3}) {
        PartialBinaryOp op = to_binary_op(restrict_random(gen_cyclic(5), 0.7, seed));
        REQUIRE(count_associative_triples(op) <= 125);
    }
}

TEST_CASE("full squares attain the fifth power exactly when label-quadrangle-clean") {
    Pls group = gen_cyclic(5);
    REQUIRE(check_quadrangle(group, CycleKind::label).empty());
    REQUIRE(count_octahedra(group).value == BigCount::of(3125));

    Pls odd = fixtures::ls5_nongroup();
    REQUIRE_FALSE(check_quadrangle(odd, CycleKind::label).empty());
    REQUIRE_FALSE(count_octahedra(odd).value == BigCount::of(3125));
    REQUIRE(count_octahedra(odd).value == BigCount::of(oracle::count_octahedra(odd)));
}

TEST_CASE("associative-triple density lower-bounds the octahedron count") {
    for (u64 seed : {1, 2, 3}) {
        Pls a = restrict_random(gen_cyclic(6), 0.8, seed);
        u64 triples = count_associative_triples(to_binary_op(a));
        // octahedra * n^7 >= triples^4, the integer form of eps^4 * n^5
        u128 lhs = count_octahedra(a).value.as_u128();
        for (int i = 0; i < 7; ++i) lhs *= 6;
        u128 rhs = u128(triples) * triples;
        rhs *= rhs;
        REQUIRE(lhs >= rhs);
    }
}
