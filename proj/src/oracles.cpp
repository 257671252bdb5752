#include "chromnet/oracles.hpp"

#include <algorithm>
#include <string>

#include "chromnet/vertex_set.hpp"

namespace chromnet::oracle {

namespace {

std::vector<VertexSet> neighbor_sets(const Graph& g) {
    if (g.order() > VertexSet::kCapacity) {
        throw std::invalid_argument("solvers support at most " + std::to_string(VertexSet::kCapacity) +
                                    " vertices");
    }
    std::vector<VertexSet> rows(static_cast<std::size_t>(g.order()));
    for (int i = 0; i < g.order(); ++i)
        for (int j = 0; j < g.order(); ++j)
            if (g.has_edge(i, j)) rows[static_cast<std::size_t>(i)].set(j);
    return rows;
}

/// Vertices by repeatedly removing one of minimum remaining degree (lowest index on ties).
std::vector<int> degeneracy_order(const std::vector<VertexSet>& adj) {
    const int n = static_cast<int>(adj.size());
    VertexSet alive;
    for (int v = 0; v < n; ++v) alive.set(v);
    std::vector<int> order;
    order.reserve(adj.size());
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        int pick_deg = n + 1;
        alive.for_each([&](int v) {
            const int d = adj[static_cast<std::size_t>(v)].intersect_count(alive);
            if (d < pick_deg) {
                pick_deg = d;
                pick = v;
            }
        });
        order.push_back(pick);
        alive.reset(pick);
    }
    return order;
}

class CliqueSearch {
public:
    explicit CliqueSearch(const std::vector<VertexSet>& adj) : adj_(adj) {}

    std::vector<int> run() {
        const int n = static_cast<int>(adj_.size());
        best_ = {0};
        VertexSet earlier;
        VertexSet later;
        for (int v = 0; v < n; ++v) later.set(v);
        for (int v : degeneracy_order(adj_)) {
            later.reset(v);
            const auto& nv = adj_[static_cast<std::size_t>(v)];
            const VertexSet candidates = nv & later;
            if (1 + candidates.count() > static_cast<int>(best_.size())) {
                current_.push_back(v);
                expand(candidates, nv & earlier);
                current_.pop_back();
            }
            earlier.set(v);
        }
        std::sort(best_.begin(), best_.end());
        return best_;
    }

private:
    void expand(VertexSet candidates, VertexSet excluded) {
        if (candidates.empty()) {
            if (current_.size() > best_.size()) best_ = current_;
            return;
        }
        // Tomita pivot: the vertex of P ∪ X covering most of P.
        int pivot = -1;
        int pivot_cover = -1;
        (candidates | excluded).for_each([&](int u) {
            const int c = adj_[static_cast<std::size_t>(u)].intersect_count(candidates);
            if (c > pivot_cover) {
                pivot_cover = c;
                pivot = u;
            }
        });
        const VertexSet branch = candidates - adj_[static_cast<std::size_t>(pivot)];
        branch.for_each([&](int v) {
            if (current_.size() + static_cast<std::size_t>(candidates.count()) <= best_.size()) return;
            const auto& nv = adj_[static_cast<std::size_t>(v)];
            current_.push_back(v);
            expand(candidates & nv, excluded & nv);
            current_.pop_back();
            candidates.reset(v);
            excluded.set(v);
        });
    }

    const std::vector<VertexSet>& adj_;
    std::vector<int> current_;
    std::vector<int> best_;
};

class ColoringSearch {
public:
    ColoringSearch(const Graph& g, const std::vector<int>& clique, std::uint64_t budget)
        : n_(g.order()), adj_(neighbor_sets(g)), budget_(budget), lower_bound_(static_cast<int>(clique.size())) {
        degree_.resize(static_cast<std::size_t>(n_));
        for (int v = 0; v < n_; ++v) degree_[static_cast<std::size_t>(v)] = adj_[static_cast<std::size_t>(v)].count();
        color_.assign(static_cast<std::size_t>(n_), 0);
        saturation_.assign(static_cast<std::size_t>(n_), 0);
        seen_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_ + 1), 0);
        for (int i = 0; i < static_cast<int>(clique.size()); ++i) assign(clique[static_cast<std::size_t>(i)], i + 1);
        clique_.insert(clique_.end(), clique.begin(), clique.end());
    }

    ColoringResult run() {
        peel();
        for (int v : clique_) core_.reset(v);
        const int remaining = core_.count();

        greedy_upper_bound(remaining);
        if (best_k_ > lower_bound_) search(lower_bound_, remaining);

        color_ = best_color_;
        for (auto it = peeled_.rbegin(); it != peeled_.rend(); ++it) {
            const int v = *it;
            int c = 1;
            while (used_by_neighbor(v, c)) ++c;
            color_[static_cast<std::size_t>(v)] = c;
        }
        return {best_k_, color_};
    }

private:
    /// Removes non-clique vertices of remaining degree below the clique size.
    /// Such a vertex always finds a free color among the first lower_bound_
    /// once the rest is colored.
    void peel() {
        for (int v = 0; v < n_; ++v) core_.set(v);
        VertexSet in_clique;
        for (int v : clique_) in_clique.set(v);
        bool changed = true;
        while (changed) {
            changed = false;
            (core_ - in_clique).for_each([&](int v) {
                if (adj_[static_cast<std::size_t>(v)].intersect_count(core_) < lower_bound_) {
                    core_.reset(v);
                    peeled_.push_back(v);
                    changed = true;
                }
            });
        }
    }

    bool used_by_neighbor(int v, int c) const {
        bool used = false;
        adj_[static_cast<std::size_t>(v)].for_each([&](int u) {
            if (color_[static_cast<std::size_t>(u)] == c) used = true;
        });
        return used;
    }

    std::uint8_t& seen(int v, int c) {
        return seen_[static_cast<std::size_t>(v) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(c)];
    }

    void assign(int v, int c) {
        color_[static_cast<std::size_t>(v)] = c;
        adj_[static_cast<std::size_t>(v)].for_each([&](int u) {
            if (seen(u, c)++ == 0) ++saturation_[static_cast<std::size_t>(u)];
        });
    }

    void unassign(int v) {
        const int c = color_[static_cast<std::size_t>(v)];
        color_[static_cast<std::size_t>(v)] = 0;
        adj_[static_cast<std::size_t>(v)].for_each([&](int u) {
            if (--seen(u, c) == 0) --saturation_[static_cast<std::size_t>(u)];
        });
    }

    /// Uncolored core vertex with highest saturation, then degree, then lowest index.
    int select() const {
        int pick = -1;
        int pick_sat = -1;
        int pick_deg = -1;
        core_.for_each([&](int v) {
            if (color_[static_cast<std::size_t>(v)] != 0) return;
            const int s = saturation_[static_cast<std::size_t>(v)];
            const int d = degree_[static_cast<std::size_t>(v)];
            if (s > pick_sat || (s == pick_sat && d > pick_deg)) {
                pick = v;
                pick_sat = s;
                pick_deg = d;
            }
        });
        return pick;
    }

    void greedy_upper_bound(int remaining) {
        int k = lower_bound_;
        std::vector<int> order;
        for (int step = 0; step < remaining; ++step) {
            const int v = select();
            int c = 1;
            while (c <= k && seen(v, c) != 0) ++c;
            k = std::max(k, c);
            assign(v, c);
            order.push_back(v);
        }
        best_k_ = k;
        best_color_ = color_;
        for (auto it = order.rbegin(); it != order.rend(); ++it) unassign(*it);
    }

    void search(int used, int remaining) {
        if (budget_ != 0 && ++nodes_ > budget_) throw BudgetExceeded(nodes_);
        if (remaining == 0) {
            best_k_ = used;
            best_color_ = color_;
            return;
        }
        const int v = select();
        for (int c = 1; c <= used && used < best_k_; ++c) {
            if (seen(v, c) != 0) continue;
            assign(v, c);
            search(used, remaining - 1);
            unassign(v);
            if (best_k_ == lower_bound_) return;
        }
        if (used + 1 < best_k_) {
            assign(v, used + 1);
            search(used + 1, remaining - 1);
            unassign(v);
        }
    }

    int n_;
    std::vector<VertexSet> adj_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    int lower_bound_;
    std::vector<int> clique_;
    std::vector<int> degree_;
    std::vector<int> color_;
    std::vector<int> saturation_;
    std::vector<std::uint8_t> seen_; ///< colored-neighbor count per (vertex, color)
    VertexSet core_;
    std::vector<int> peeled_;
    int best_k_ = 0;
    std::vector<int> best_color_;
};

} // namespace

BudgetExceeded::BudgetExceeded(std::uint64_t nodes)
    : std::runtime_error("coloring search exceeded its node budget (" + std::to_string(nodes) + " nodes)"),
      nodes_(nodes) {}

CliqueResult max_clique(const Graph& g) {
    const auto adj = neighbor_sets(g);
    auto witness = CliqueSearch(adj).run();
    return {static_cast<int>(witness.size()), std::move(witness)};
}

ColoringResult chromatic_number(const Graph& g, const SolverLimits& limits) {
    return chromatic_number(g, max_clique(g), limits);
}

ColoringResult chromatic_number(const Graph& g, const CliqueResult& seed, const SolverLimits& limits) {
    if (seed.witness.empty() || !is_clique(g, seed.witness)) {
        throw std::invalid_argument("seed is not a non-empty clique of the graph");
    }
    return ColoringSearch(g, seed.witness, limits.node_budget).run();
}

Labels label_graph(const Graph& g, const SolverLimits& limits) {
    const CliqueResult clique = max_clique(g);
    const ColoringResult coloring = chromatic_number(g, clique, limits);
    return {coloring.chromatic, clique.size};
}

int brute_force_clique(const Graph& g) {
    const int n = g.order();
    if (n > kBruteCliqueMaxOrder) {
        throw std::invalid_argument("brute_force_clique supports order <= " + std::to_string(kBruteCliqueMaxOrder));
    }
    int best = 1;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const int size = std::popcount(mask);
        if (size <= best) continue;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            for (int j = i + 1; j < n; ++j) {
                if ((mask >> j & 1u) && !g.has_edge(i, j)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) best = size;
    }
    return best;
}

namespace {

bool extend_coloring(const Graph& g, std::vector<int>& colors, int v, int k) {
    if (v == g.order()) return true;
    for (int c = 1; c <= k; ++c) {
        bool clash = false;
        for (int u = 0; u < v; ++u) {
            if (g.has_edge(u, v) && colors[static_cast<std::size_t>(u)] == c) {
                clash = true;
                break;
            }
        }
        if (clash) continue;
        colors[static_cast<std::size_t>(v)] = c;
        if (extend_coloring(g, colors, v + 1, k)) return true;
    }
    colors[static_cast<std::size_t>(v)] = 0;
    return false;
}

} // namespace

int brute_force_chromatic(const Graph& g) {
    const int n = g.order();
    if (n > kBruteChromaticMaxOrder) {
        throw std::invalid_argument("brute_force_chromatic supports order <= " +
                                    std::to_string(kBruteChromaticMaxOrder));
    }
    for (int k = 1; k <= n; ++k) {
        std::vector<int> colors(static_cast<std::size_t>(n), 0);
        colors[0] = 1;
        if (extend_coloring(g, colors, 1, k)) return k;
    }
    return n;
}

bool is_clique(const Graph& g, const std::vector<int>& vertices) {
    for (std::size_t a = 0; a < vertices.size(); ++a) {
        if (vertices[a] < 0 || vertices[a] >= g.order()) return false;
        for (std::size_t b = a + 1; b < vertices.size(); ++b)
            if (!g.has_edge(vertices[a], vertices[b])) return false;
    }
    return true;
}

bool is_proper_coloring(const Graph& g, const std::vector<int>& assignment) {
    if (static_cast<int>(assignment.size()) != g.order()) return false;
    for (int c : assignment)
        if (c < 1) return false;
    for (int i = 0; i < g.order(); ++i)
        for (int j = i + 1; j < g.order(); ++j)
            if (g.has_edge(i, j) && assignment[static_cast<std::size_t>(i)] == assignment[static_cast<std::size_t>(j)])
                return false;
    return true;
}

} // namespace chromnet::oracle
