#include "chromnet/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace chromnet {

Graph::Graph(int order) : order_(order) {
    if (order < 1) {
        throw std::invalid_argument("graph order must be >= 1, got " + std::to_string(order));
    }
    adj_.assign(static_cast<std::size_t>(order) * order, 0);
}

Graph Graph::from_adjacency(int order, std::span<const std::uint8_t> adj) {
    Graph g(order);
    if (adj.size() != g.adj_.size()) {
        throw std::invalid_argument("adjacency size does not match order");
    }
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            const auto a = adj[static_cast<std::size_t>(i) * order + j];
            const auto b = adj[static_cast<std::size_t>(j) * order + i];
            if (a > 1) throw std::invalid_argument("adjacency entries must be 0 or 1");
            if (a != b) throw std::invalid_argument("adjacency matrix is not symmetric");
            if (i == j && a != 0) throw std::invalid_argument("adjacency diagonal must be zero");
        }
    }
    std::copy(adj.begin(), adj.end(), g.adj_.begin());
    return g;
}

void Graph::set_edge(int i, int j, bool present) {
    if (i < 0 || j < 0 || i >= order_ || j >= order_) {
        throw std::out_of_range("vertex index out of range");
    }
    if (i == j) throw std::invalid_argument("self loops are not allowed");
    const std::uint8_t v = present ? 1 : 0;
    adj_[static_cast<std::size_t>(i) * order_ + j] = v;
    adj_[static_cast<std::size_t>(j) * order_ + i] = v;
}

int Graph::degree(int v) const noexcept {
    const auto* row = adj_.data() + static_cast<std::size_t>(v) * order_;
    return static_cast<int>(std::count(row, row + order_, std::uint8_t{1}));
}

int Graph::max_degree() const noexcept {
    int best = 0;
    for (int v = 0; v < order_; ++v) best = std::max(best, degree(v));
    return best;
}

VertexPermutation VertexPermutation::identity(int size) {
    std::vector<int> m(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) m[static_cast<std::size_t>(i)] = i;
    return VertexPermutation(std::move(m));
}

VertexPermutation::VertexPermutation(std::vector<int> mapping) : map_(std::move(mapping)) {
    std::vector<char> seen(map_.size(), 0);
    for (int image : map_) {
        if (image < 0 || static_cast<std::size_t>(image) >= map_.size() || seen[static_cast<std::size_t>(image)]) {
            throw std::invalid_argument("mapping is not a bijection");
        }
        seen[static_cast<std::size_t>(image)] = 1;
    }
}

VertexPermutation VertexPermutation::inverse() const {
    std::vector<int> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[static_cast<std::size_t>(map_[i])] = static_cast<int>(i);
    return VertexPermutation(std::move(inv));
}

VertexPermutation compose(const VertexPermutation& outer, const VertexPermutation& inner) {
    if (outer.size() != inner.size()) throw std::invalid_argument("permutation sizes differ");
    std::vector<int> m(static_cast<std::size_t>(inner.size()));
    for (int i = 0; i < inner.size(); ++i) m[static_cast<std::size_t>(i)] = outer(inner(i));
    return VertexPermutation(std::move(m));
}

Graph complete_graph(int n) {
    if (n < 1) throw std::invalid_argument("complete graph needs n >= 1");
    Graph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.set_edge(i, j);
    return g;
}

int edge_count(const Graph& g) noexcept {
    const auto adj = g.adjacency();
    return static_cast<int>(std::count(adj.begin(), adj.end(), std::uint8_t{1}) / 2);
}

Graph apply_permutation(const Graph& g, const VertexPermutation& perm) {
    if (perm.size() != g.order()) {
        throw std::invalid_argument("permutation acts on " + std::to_string(perm.size()) +
                                    " vertices but graph has " + std::to_string(g.order()));
    }
    Graph out(g.order());
    for (int i = 0; i < g.order(); ++i)
        for (int j = i + 1; j < g.order(); ++j)
            if (g.has_edge(i, j)) out.set_edge(perm(i), perm(j));
    return out;
}

Graph pad_to_order(const Graph& g, int target) {
    if (target < g.order()) {
        throw std::invalid_argument("pad target " + std::to_string(target) + " is below graph order " +
                                    std::to_string(g.order()));
    }
    Graph out(target);
    for (int i = 0; i < g.order(); ++i)
        for (int j = i + 1; j < g.order(); ++j)
            if (g.has_edge(i, j)) out.set_edge(i, j);
    return out;
}

} // namespace chromnet
