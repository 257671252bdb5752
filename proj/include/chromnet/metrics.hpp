#pragma once

#include <span>
#include <vector>

namespace chromnet::metrics {

double mae(std::span<const double> actual, std::span<const double> predicted);

/// Fraction of records whose absolute error is <= l (inclusive).
double p_l(std::span<const double> actual, std::span<const double> predicted, double l);

/// 100 * |actual - predicted| / actual. Requires actual > 0.
double ape(double actual, double predicted);

double mape(std::span<const double> actual, std::span<const double> predicted);

/// Linear-interpolation quantile (type 7) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

enum class ErrorMode { ae, ape };

struct GroupStats {
    double bin_lo = 0; ///< exclusive
    double bin_hi = 0; ///< inclusive
    std::size_t n = 0;
    // Empty bins carry no quartiles.
    double q1 = 0, median = 0, q3 = 0;
    double whisker_lo = 0, whisker_hi = 0;
};

/// Boxplot statistics of per-record error, grouped by the actual value into
/// right-closed bins (0, w], (w, 2w], ... up to the largest actual value.
/// Whiskers sit on the most extreme data within 1.5 IQR of the quartiles,
/// but never inside the box.
std::vector<GroupStats> grouped_boxplot_stats(std::span<const double> actual, std::span<const double> predicted,
                                              ErrorMode mode, int bin_width);

struct EvalReport {
    double mae = 0;
    double p_half = 0;
    double p_one = 0;
    double mape = 0;
    std::size_t n = 0;
    std::vector<GroupStats> per_group; ///< absolute error grouped with width 2
    std::vector<GroupStats> per_group_ape;
};

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted, int bin_width = 2);

} // namespace chromnet::metrics
