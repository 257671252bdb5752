#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chromnet {

/// Simple undirected graph over vertices 0..order-1, stored as a dense
/// symmetric 0/1 adjacency matrix with zero diagonal.
///
/// Graphs are values: every operation returns a new graph and never mutates
/// its argument, so instances can be shared freely between threads.
class Graph {
public:
    /// Edgeless graph on `order` vertices. Throws std::invalid_argument for order 0.
    explicit Graph(int order);

    /// Builds from a row-major order*order matrix. Rejects asymmetric
    /// matrices, non-zero diagonals and entries other than 0/1.
    static Graph from_adjacency(int order, std::span<const std::uint8_t> adj);

    int order() const noexcept { return order_; }

    bool has_edge(int i, int j) const noexcept {
        return adj_[static_cast<std::size_t>(i) * order_ + j] != 0;
    }

    /// Adds (or removes) the undirected edge i-j. Self loops are rejected.
    void set_edge(int i, int j, bool present = true);

    int degree(int v) const noexcept;
    int max_degree() const noexcept;

    std::span<const std::uint8_t> adjacency() const noexcept { return adj_; }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    int order_;
    std::vector<std::uint8_t> adj_;
};

/// Bijection on {0..size-1}; image(i) is where vertex i is sent.
class VertexPermutation {
public:
    static VertexPermutation identity(int size);

    /// Validates that `mapping` is a bijection; throws std::invalid_argument otherwise.
    explicit VertexPermutation(std::vector<int> mapping);

    int size() const noexcept { return static_cast<int>(map_.size()); }
    int operator()(int i) const noexcept { return map_[static_cast<std::size_t>(i)]; }
    std::span<const int> mapping() const noexcept { return map_; }

    VertexPermutation inverse() const;

    friend bool operator==(const VertexPermutation&, const VertexPermutation&) = default;

private:
    std::vector<int> map_;
};

/// (outer ∘ inner)(i) = outer(inner(i)).
VertexPermutation compose(const VertexPermutation& outer, const VertexPermutation& inner);

Graph complete_graph(int n);

/// Number of undirected edges.
int edge_count(const Graph& g) noexcept;

/// result.adj[perm(i)][perm(j)] = g.adj[i][j].
Graph apply_permutation(const Graph& g, const VertexPermutation& perm);

/// Appends isolated vertices so the result has `target` vertices; the
/// original adjacency occupies the leading block.
Graph pad_to_order(const Graph& g, int target);

} // namespace chromnet
