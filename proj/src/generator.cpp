#include "chromnet/generator.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace chromnet::gen {

void GenConfig::validate() const {
    if (max_order < 2) throw std::invalid_argument("max_order must be >= 2, got " + std::to_string(max_order));
    if (max_order > 255) throw std::invalid_argument("max_order must be <= 255");
    if (per_order_count < 1) throw std::invalid_argument("per_order_count must be >= 1");
}

std::uint64_t substream_seed(std::uint64_t seed, int n, int index, int attempt) noexcept {
    return mix_seed({seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index),
                     static_cast<std::uint64_t>(attempt)});
}

Graph random_subgraph_of_complete(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("random subgraph needs n >= 2");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);

    const auto removed = static_cast<std::size_t>(rng.uniform_int(0, edges.size()));
    rng.shuffle(std::span(edges));

    Graph g(n);
    for (std::size_t e = removed; e < edges.size(); ++e) g.set_edge(edges[e].first, edges[e].second);
    return g;
}

Graph generate_embedded(int n, int max_order, Rng& rng) {
    if (n < 2 || n > max_order) {
        throw std::invalid_argument("source order " + std::to_string(n) + " outside [2, " +
                                    std::to_string(max_order) + "]");
    }
    const Graph base = random_subgraph_of_complete(n, rng);
    std::vector<int> labels(static_cast<std::size_t>(max_order));
    for (int i = 0; i < max_order; ++i) labels[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span(labels));
    return apply_permutation(pad_to_order(base, max_order), VertexPermutation(std::move(labels)));
}

Graph generate_one(const GenConfig& cfg, int n, int index, int attempt) {
    Rng rng(substream_seed(cfg.seed, n, index, attempt));
    return generate_embedded(n, cfg.max_order, rng);
}

std::vector<Graph> generate_batch(const GenConfig& cfg) {
    cfg.validate();
    std::vector<Graph> out;
    out.reserve(cfg.total());
    for (int n = 2; n <= cfg.max_order; ++n)
        for (int k = 0; k < cfg.per_order_count; ++k) out.push_back(generate_one(cfg, n, k));
    return out;
}

} // namespace chromnet::gen
