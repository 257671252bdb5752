#include <doctest.h>

#include "chromnet/generator.hpp"
#include "chromnet/oracles.hpp"
#include "support/graphs.hpp"

using namespace chromnet;
using namespace chromnet::oracle;
using chromnet::testing::cycle;
using chromnet::testing::graph_from_edges;
using chromnet::testing::graph_from_mask;
using chromnet::testing::petersen;
using chromnet::testing::random_gnp;
using chromnet::testing::random_permutation;
using chromnet::testing::star;

TEST_CASE("max_clique examples") {
    CHECK(max_clique(complete_graph(4)).size == 4);
    CHECK(max_clique(cycle(5)).size == 2);
    CHECK(max_clique(petersen()).size == 2);
    CHECK(max_clique(Graph(3)).size == 1);
}

TEST_CASE("chromatic_number examples") {
    for (int n : {1, 2, 7, 50}) CHECK(chromatic_number(Graph(n)).chromatic == 1);
    CHECK(chromatic_number(cycle(5)).chromatic == 3);
    CHECK(chromatic_number(cycle(6)).chromatic == 2);
    CHECK(chromatic_number(petersen()).chromatic == 3);
    CHECK(chromatic_number(complete_graph(7)).chromatic == 7);
}

TEST_CASE("Petersen graph is not 2-colourable and has an explicit 3-colouring") {
    const Graph p = petersen();
    CHECK(brute_force_chromatic(p) == 3);
    const auto res = chromatic_number(p);
    CHECK(is_proper_coloring(p, res.assignment));
    CHECK(brute_force_clique(p) == 2);
}

TEST_CASE("brute-force reference examples") {
    CHECK(brute_force_clique(complete_graph(3)) == 3);
    CHECK(brute_force_clique(graph_from_edges(4, {{1, 3}})) == 2);
    CHECK(brute_force_clique(cycle(5)) == 2);
    CHECK(brute_force_chromatic(complete_graph(4)) == 4);
    CHECK(brute_force_chromatic(star(5)) == 2);
    CHECK(brute_force_chromatic(cycle(5)) == 3);
    CHECK_THROWS(brute_force_clique(Graph(17)));
    CHECK_THROWS(brute_force_chromatic(Graph(11)));
}

TEST_CASE("label_graph examples") {
    const Labels k5 = label_graph(pad_to_order(complete_graph(5), 50));
    CHECK(k5.chromatic == 5);
    CHECK(k5.clique == 5);
    const Labels empty = label_graph(Graph(50));
    CHECK(empty.chromatic == 1);
    CHECK(empty.clique == 1);
    Rng rng(11);
    for (int i = 0; i < 10; ++i) {
        const Labels c = label_graph(apply_permutation(cycle(5), random_permutation(5, rng)));
        CHECK(c.chromatic == 3);
        CHECK(c.clique == 2);
    }
}

TEST_CASE("witnesses are valid") {
    Rng rng(31);
    for (int t = 0; t < 300; ++t) {
        const int n = static_cast<int>(rng.uniform_int(1, 30));
        const Graph g = random_gnp(n, rng.uniform_real(), rng);
        const auto cl = max_clique(g);
        CHECK(static_cast<int>(cl.witness.size()) == cl.size);
        CHECK(is_clique(g, cl.witness));
        const auto col = chromatic_number(g);
        CHECK(is_proper_coloring(g, col.assignment));
        // Colours form the contiguous range 1..chromatic.
        std::vector<bool> used(static_cast<std::size_t>(col.chromatic) + 1, false);
        for (int c : col.assignment) {
            REQUIRE(c >= 1);
            REQUIRE(c <= col.chromatic);
            used[static_cast<std::size_t>(c)] = true;
        }
        for (int c = 1; c <= col.chromatic; ++c) CHECK(used[static_cast<std::size_t>(c)]);
    }
}

TEST_CASE("oracles agree with brute force on all graphs up to 5 vertices") {
    for (int n = 1; n <= 5; ++n) {
        const int pairs = n * (n - 1) / 2;
        for (unsigned long long mask = 0; mask < (1ULL << pairs); ++mask) {
            const Graph g = graph_from_mask(n, mask);
            REQUIRE(max_clique(g).size == brute_force_clique(g));
            REQUIRE(chromatic_number(g).chromatic == brute_force_chromatic(g));
        }
    }
}

TEST_CASE("oracles agree with brute force on random 7-10 vertex graphs") {
    Rng rng(8);
    for (int t = 0; t < 400; ++t) {
        const int n = static_cast<int>(rng.uniform_int(7, 10));
        const Graph g = random_gnp(n, rng.uniform_real(), rng);
        REQUIRE(max_clique(g).size == brute_force_clique(g));
        REQUIRE(chromatic_number(g).chromatic == brute_force_chromatic(g));
    }
}

TEST_CASE("sandwich bound, permutation and padding invariance") {
    Rng rng(4242);
    const gen::GenConfig cfg{30, 1, 5};
    for (int t = 0; t < 300; ++t) {
        const int n = static_cast<int>(rng.uniform_int(2, 30));
        const Graph g = gen::generate_one(cfg, n, t);
        const Labels l = label_graph(g);
        CHECK(l.clique <= l.chromatic);
        CHECK(l.chromatic <= g.max_degree() + 1);
        const Labels lp = label_graph(apply_permutation(g, random_permutation(g.order(), rng)));
        CHECK(lp.chromatic == l.chromatic);
        CHECK(lp.clique == l.clique);
        const Labels pad = label_graph(pad_to_order(g, g.order() + 7));
        CHECK(pad.chromatic == l.chromatic);
        CHECK(pad.clique == l.clique);
    }
}

TEST_CASE("seeded colouring validates its clique") {
    const Graph g = cycle(5);
    CHECK(chromatic_number(g, max_clique(g)).chromatic == 3);
    CliqueResult bogus{2, {0, 2}};
    CHECK_THROWS(chromatic_number(g, bogus));
}

TEST_CASE("node budget is reported, not silently truncated") {
    Rng rng(1);
    const Graph g = random_gnp(60, 0.5, rng);
    SolverLimits tiny;
    tiny.node_budget = 10;
    CHECK_THROWS_AS(chromatic_number(g, tiny), BudgetExceeded);
}

TEST_CASE("mycielski graphs: triangle-free with growing chromatic number") {
    // M2 = K2, M3 = C5, M4 = Groetzsch (11 vertices, chi 4), M5 (23, chi 5).
    Graph m = complete_graph(2);
    for (int k = 3; k <= 5; ++k) {
        const int n = m.order();
        Graph next(2 * n + 1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (!m.has_edge(i, j)) continue;
                next.set_edge(i, j);
                next.set_edge(i, n + j);
            }
            next.set_edge(n + i, 2 * n);
        }
        m = next;
        CHECK(max_clique(m).size == 2);
        CHECK(chromatic_number(m).chromatic == k);
    }
}
