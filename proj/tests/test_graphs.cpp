#include <doctest.h>

#include <cmath>

#include "c2m/graphs.hpp"

using namespace c2m;

namespace {

PointSet points_of(std::size_t n, std::size_t d = 2, std::uint64_t seed = 1) {
    Rng rng(seed);
    Matrix x(n, d);
    for (double& v : x.data()) v = rng.normal();
    return PointSet(std::move(x));
}

}  // namespace

TEST_SUITE("graphs") {

TEST_CASE("adjacency connects exactly the same-cluster pairs") {
    const ClusterGraph g = build_graph(points_of(3), {0, 0, 1});
    CHECK(g.adjacency == Matrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}});
    CHECK(g.features == points_of(3).matrix());
}

TEST_CASE("single label gives the complete graph, distinct labels give none") {
    CHECK(edge_count(build_graph(points_of(3), {2, 2, 2})) == 6);
    CHECK(build_graph(points_of(4), {0, 1, 2, 3}).adjacency == Matrix(4, 4));
}

TEST_CASE("edge count is the sum of n_c (n_c - 1)") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(0, 30);
        Labeling y(n);
        for (auto& l : y) l = static_cast<Label>(rng.uniform_index(0, 5));
        std::size_t expect = 0;
        for (const auto& grp : groups_of(y)) expect += grp.size() * (grp.size() - 1);
        const ClusterGraph g = build_graph(points_of(n), y);
        CHECK(edge_count(g) == expect);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(g.adjacency(i, i) == 0.0);
            for (std::size_t j = 0; j < n; ++j) CHECK(g.adjacency(i, j) == g.adjacency(j, i));
        }
    }
}

TEST_CASE("relabeling does not change the graph") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 10;
        Labeling y(n), py(n);
        for (auto& l : y) l = static_cast<Label>(rng.uniform_index(0, 4));
        std::vector<Label> perm{7, 3, 11, 0, 5};
        for (std::size_t i = 0; i < n; ++i) py[i] = perm[static_cast<std::size_t>(y[i])];
        CHECK(build_graph(points_of(n), y).adjacency == build_graph(points_of(n), py).adjacency);
    }
}

TEST_CASE("length mismatch is rejected") {
    CHECK_THROWS_AS(build_graph(points_of(3), {0, 1}), ShapeError);
}

TEST_CASE("normalizing an edgeless graph gives the identity") {
    CHECK(normalize(build_graph(points_of(2), {0, 1})).matrix == Matrix::identity(2));
}

TEST_CASE("normalizing the 2-clique gives one half everywhere") {
    const Matrix a = normalize(build_graph(points_of(2), {0, 0})).matrix;
    for (double v : a.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normalized adjacency matches the direct formula") {
    Rng rng(13);
    const std::size_t n = 12;
    Labeling y(n);
    for (auto& l : y) l = static_cast<Label>(rng.uniform_index(0, 3));
    const ClusterGraph g = build_graph(points_of(n), y);
    const Matrix a = normalize(g).matrix;
    std::vector<double> deg(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) deg[i] += g.adjacency(i, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = g.adjacency(i, j) + (i == j ? 1.0 : 0.0);
            CHECK(a(i, j) == doctest::Approx(aij / std::sqrt(deg[i] * deg[j])).epsilon(1e-14));
            CHECK(a(i, j) == a(j, i));
            if (y[i] == y[j]) {
                CHECK(a(i, j) > 0.0);
                CHECK(a(i, j) <= 1.0);
            }
        }
}

TEST_CASE("same-clique nodes have identical normalized rows") {
    const Labeling y{0, 1, 0, 2, 1, 0};
    const Matrix a = normalize(build_graph(points_of(6), y)).matrix;
    // Nodes 0, 2 and 5 form a clique: their rows agree entry by entry.
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(a(0, j) == a(2, j));
        CHECK(a(0, j) == a(5, j));
    }
}

TEST_CASE("cliques recovers the groups and rejects non-clique graphs") {
    const Labeling y{3, 1, 3, 0, 1};
    const ClusterGraph g = build_graph(points_of(5), y);
    CHECK(cliques(g) == groups_of(y));
    CHECK(groups_of(y) == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 4}, {3}});
    ClusterGraph path = build_graph(points_of(3), {0, 1, 2});
    path.adjacency(0, 1) = path.adjacency(1, 0) = 1;
    path.adjacency(1, 2) = path.adjacency(2, 1) = 1;
    CHECK_THROWS_AS(cliques(path), ValidationError);
}

}  // TEST_SUITE
