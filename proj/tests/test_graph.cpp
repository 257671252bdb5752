#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "chromnet/graph.hpp"
#include "support/graphs.hpp"

using namespace chromnet;
using chromnet::testing::cycle;
using chromnet::testing::graph_from_edges;
using chromnet::testing::random_gnp;
using chromnet::testing::random_permutation;

TEST_CASE("complete graph edge counts") {
    CHECK(edge_count(complete_graph(1)) == 0);
    CHECK(edge_count(complete_graph(4)) == 6);
    CHECK(edge_count(complete_graph(50)) == 1225);
    CHECK_THROWS_AS(complete_graph(0), std::invalid_argument);
}

TEST_CASE("edge_count on small graphs") {
    CHECK(edge_count(complete_graph(3)) == 3);
    CHECK(edge_count(Graph(10)) == 0);
    CHECK(edge_count(cycle(5)) == 5);
}

TEST_CASE("adjacency invariants are enforced") {
    Graph g(3);
    CHECK_THROWS(g.set_edge(1, 1));
    CHECK_THROWS(g.set_edge(0, 3));

    const std::vector<std::uint8_t> asym = {0, 1, 0, 0};
    CHECK_THROWS(Graph::from_adjacency(2, asym));
    const std::vector<std::uint8_t> loop = {1, 0, 0, 0};
    CHECK_THROWS(Graph::from_adjacency(2, loop));
    const std::vector<std::uint8_t> two = {0, 2, 2, 0};
    CHECK_THROWS(Graph::from_adjacency(2, two));
    const std::vector<std::uint8_t> ok = {0, 1, 1, 0};
    CHECK(edge_count(Graph::from_adjacency(2, ok)) == 1);
}

TEST_CASE("permutation validation") {
    CHECK_THROWS(VertexPermutation({0, 0, 1}));
    CHECK_THROWS(VertexPermutation({0, 3, 1}));
    CHECK_NOTHROW(VertexPermutation({2, 0, 1}));
}

TEST_CASE("apply_permutation examples") {
    const Graph g = graph_from_edges(3, {{0, 2}});
    CHECK(apply_permutation(g, VertexPermutation::identity(3)) == g);

    Rng rng(7);
    const Graph k6 = complete_graph(6);
    CHECK(apply_permutation(k6, random_permutation(6, rng)) == k6);

    // swap(1,2) in 1-indexed terms is swap(0,1) here; {1-3} becomes {2-3}.
    const Graph swapped = apply_permutation(g, VertexPermutation({1, 0, 2}));
    CHECK(swapped == graph_from_edges(3, {{1, 2}}));

    CHECK_THROWS(apply_permutation(g, VertexPermutation::identity(4)));
}

TEST_CASE("pad_to_order examples") {
    const Graph padded = pad_to_order(complete_graph(3), 5);
    CHECK(padded.order() == 5);
    CHECK(edge_count(padded) == 3);
    CHECK(padded.degree(3) == 0);
    CHECK(padded.degree(4) == 0);
    CHECK(pad_to_order(cycle(4), 4) == cycle(4));
    CHECK(pad_to_order(Graph(2), 50) == Graph(50));
    CHECK_THROWS(pad_to_order(cycle(5), 4));
}

TEST_CASE("permutation properties on random graphs") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 20));
        const Graph g = random_gnp(n, rng.uniform_real(), rng);
        const auto p = random_permutation(n, rng);
        const auto q = random_permutation(n, rng);

        const Graph pg = apply_permutation(g, p);
        CHECK(edge_count(pg) == edge_count(g));
        CHECK(apply_permutation(pg, p.inverse()) == g);
        CHECK(apply_permutation(pg, q) == apply_permutation(g, compose(q, p)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(pg.has_edge(p(i), p(j)) == g.has_edge(i, j));

        const int t = n + static_cast<int>(rng.uniform_int(0, 5));
        CHECK(edge_count(pad_to_order(g, t)) == edge_count(g));
    }
}

TEST_CASE("degree and max_degree") {
    const Graph s = chromnet::testing::star(5);
    CHECK(s.degree(0) == 5);
    CHECK(s.degree(3) == 1);
    CHECK(s.max_degree() == 5);
    CHECK(Graph(4).max_degree() == 0);
}
