#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "chromnet/graph.hpp"

namespace chromnet::oracle {

struct CliqueResult {
    int size = 0;
    std::vector<int> witness; ///< ascending vertex indices, pairwise adjacent
};

struct ColoringResult {
    int chromatic = 0;
    std::vector<int> assignment; ///< color per vertex, in 1..chromatic
};

struct Labels {
    int chromatic = 0;
    int clique = 0;
    friend bool operator==(const Labels&, const Labels&) = default;
};

/// Thrown when the coloring search visits more nodes than allowed.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(std::uint64_t nodes);
    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    std::uint64_t nodes_;
};

struct SolverLimits {
    /// Maximum branch-and-bound nodes per chromatic-number solve. 0 = unlimited.
    std::uint64_t node_budget = 200'000'000;
};

/// Maximum clique by Bron-Kerbosch with Tomita pivoting. The outermost level
/// walks vertices in degeneracy order; branches that cannot beat the
/// incumbent are cut.
CliqueResult max_clique(const Graph& g);

/// Exact chromatic number.
///
/// The seed clique is fixed to colors 1..|clique| first. Vertices outside the
/// clique whose remaining degree is below the clique size are peeled off and
/// colored greedily at the end; the rest is solved by DSATUR branch and bound
/// (saturation, then degree, then lowest index), pruned by a greedy DSATUR
/// upper bound. Uses max_clique(g) when no seed clique is passed.
ColoringResult chromatic_number(const Graph& g, const SolverLimits& limits = {});
ColoringResult chromatic_number(const Graph& g, const CliqueResult& seed, const SolverLimits& limits = {});

/// (chromatic number, clique number). The clique is computed first and seeds
/// the coloring search.
Labels label_graph(const Graph& g, const SolverLimits& limits = {});

// Reference solvers for tests. Exponential; guarded by order.

inline constexpr int kBruteCliqueMaxOrder = 16;
inline constexpr int kBruteChromaticMaxOrder = 10;

/// Largest pairwise-adjacent vertex subset, by enumeration of all subsets.
int brute_force_clique(const Graph& g);

/// Smallest c admitting a proper c-coloring, by exhaustive assignment with
/// vertex 0 fixed to the first color.
int brute_force_chromatic(const Graph& g);

bool is_clique(const Graph& g, const std::vector<int>& vertices);
bool is_proper_coloring(const Graph& g, const std::vector<int>& assignment);

} // namespace chromnet::oracle
