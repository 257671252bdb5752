#pragma once

#include <cstdint>
#include <vector>

#include "chromnet/graph.hpp"
#include "chromnet/rng.hpp"

namespace chromnet::gen {

/// Batch parameters: graphs of every source order n in [2, max_order],
/// per_order_count of each, all embedded in max_order vertices.
struct GenConfig {
    int max_order = 50;
    int per_order_count = 1;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument unless max_order >= 2 and per_order_count >= 1.
    void validate() const;

    std::size_t total() const noexcept {
        return static_cast<std::size_t>(per_order_count) * static_cast<std::size_t>(max_order - 1);
    }
};

/// Seed of the stream used for the `index`-th graph of source order n.
/// attempt > 0 selects a fresh stream for regenerating a graph whose labels
/// could not be computed within budget.
std::uint64_t substream_seed(std::uint64_t seed, int n, int index, int attempt = 0) noexcept;

/// K_n with j edges removed, j uniform in [0, n(n-1)/2]. The edge list is
/// shuffled and its first j entries deleted.
Graph random_subgraph_of_complete(int n, Rng& rng);

/// Random subgraph of K_n, padded with isolated vertices to `max_order`, then
/// relabelled by a uniform random permutation.
Graph generate_embedded(int n, int max_order, Rng& rng);

/// The graph at (n, index) of a batch; what generate_batch emits at that slot.
Graph generate_one(const GenConfig& cfg, int n, int index, int attempt = 0);

/// per_order_count * (max_order - 1) graphs, ordered by n ascending then by
/// repetition index. Pure function of cfg.
std::vector<Graph> generate_batch(const GenConfig& cfg);

} // namespace chromnet::gen
