#pragma once

#include <utility>
#include <vector>

#include "chromnet/graph.hpp"
#include "chromnet/rng.hpp"

namespace chromnet::testing {

inline Graph graph_from_edges(int order, const std::vector<std::pair<int, int>>& edges) {
    Graph g(order);
    for (auto [a, b] : edges) g.set_edge(a, b);
    return g;
}

inline Graph cycle(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i) g.set_edge(i, (i + 1) % n);
    return g;
}

inline Graph star(int leaves) {
    Graph g(leaves + 1);
    for (int i = 1; i <= leaves; ++i) g.set_edge(0, i);
    return g;
}

// Outer 5-cycle 0..4, inner pentagram 5..9, spokes i -- i+5.
inline Graph petersen() {
    Graph g(10);
    for (int i = 0; i < 5; ++i) {
        g.set_edge(i, (i + 1) % 5);
        g.set_edge(5 + i, 5 + (i + 2) % 5);
        g.set_edge(i, i + 5);
    }
    return g;
}

// Graph on `order` vertices whose upper-triangle pairs follow the bits of `mask`.
inline Graph graph_from_mask(int order, unsigned long long mask) {
    Graph g(order);
    int bit = 0;
    for (int i = 0; i < order; ++i)
        for (int j = i + 1; j < order; ++j, ++bit)
            if (mask >> bit & 1ULL) g.set_edge(i, j);
    return g;
}

inline Graph random_gnp(int order, double p, Rng& rng) {
    Graph g(order);
    for (int i = 0; i < order; ++i)
        for (int j = i + 1; j < order; ++j)
            if (rng.uniform_real() < p) g.set_edge(i, j);
    return g;
}

inline VertexPermutation random_permutation(int n, Rng& rng) {
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span<int>(m));
    return VertexPermutation(std::move(m));
}

} // namespace chromnet::testing
