#include "chromnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chromnet::metrics {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p) {
    if (a.size() != p.size()) {
        throw std::invalid_argument("length mismatch: " + std::to_string(a.size()) + " actual vs " +
                                    std::to_string(p.size()) + " predicted");
    }
    if (a.empty()) throw std::invalid_argument("metrics need at least one record");
}

} // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
    return sum / static_cast<double>(actual.size());
}

double p_l(std::span<const double> actual, std::span<const double> predicted, double l) {
    check_pair(actual, predicted);
    if (l < 0) throw std::invalid_argument("threshold must be non-negative");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        if (std::abs(actual[i] - predicted[i]) <= l) ++hits;
    return static_cast<double>(hits) / static_cast<double>(actual.size());
}

double ape(double actual, double predicted) {
    if (!(actual > 0)) throw std::invalid_argument("APE needs a positive actual value");
    return 100.0 * std::abs(actual - predicted) / actual;
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += ape(actual[i], predicted[i]);
    return sum / static_cast<double>(actual.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<GroupStats> grouped_boxplot_stats(std::span<const double> actual, std::span<const double> predicted,
                                              ErrorMode mode, int bin_width) {
    check_pair(actual, predicted);
    if (bin_width < 1) throw std::invalid_argument("bin width must be >= 1");
    const double top = *std::max_element(actual.begin(), actual.end());
    const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(top / bin_width)));

    std::vector<std::vector<double>> errors(bins);
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = mode == ErrorMode::ae ? std::abs(actual[i] - predicted[i]) : ape(actual[i], predicted[i]);
        // Right-closed bins: (k*w, (k+1)*w] holds ceil(a/w) - 1 = k.
        auto b = static_cast<std::ptrdiff_t>(std::ceil(actual[i] / bin_width)) - 1;
        b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        errors[static_cast<std::size_t>(b)].push_back(e);
    }

    std::vector<GroupStats> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        auto& g = out[b];
        g.bin_lo = static_cast<double>(b) * bin_width;
        g.bin_hi = static_cast<double>(b + 1) * bin_width;
        auto& e = errors[b];
        g.n = e.size();
        if (e.empty()) continue;
        std::sort(e.begin(), e.end());
        g.q1 = quantile_sorted(e, 0.25);
        g.median = quantile_sorted(e, 0.5);
        g.q3 = quantile_sorted(e, 0.75);
        const double iqr = g.q3 - g.q1;
        const double lo_fence = g.q1 - 1.5 * iqr;
        const double hi_fence = g.q3 + 1.5 * iqr;
        // A whisker never retracts into the box.
        g.whisker_lo = std::min(g.q1, *std::lower_bound(e.begin(), e.end(), lo_fence));
        g.whisker_hi = std::max(g.q3, *(std::upper_bound(e.begin(), e.end(), hi_fence) - 1));
    }
    return out;
}

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted, int bin_width) {
    EvalReport r;
    r.mae = mae(actual, predicted);
    r.p_half = p_l(actual, predicted, 0.5);
    r.p_one = p_l(actual, predicted, 1.0);
    r.mape = mape(actual, predicted);
    r.n = actual.size();
    r.per_group = grouped_boxplot_stats(actual, predicted, ErrorMode::ae, bin_width);
    r.per_group_ape = grouped_boxplot_stats(actual, predicted, ErrorMode::ape, bin_width);
    return r;
}

} // namespace chromnet::metrics
