#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chromnet/dataset.hpp"
#include "chromnet/nn/model_spec.hpp"

namespace chromnet::learn {

enum class Family { regression, dense, seq_cnn, wide_cnn };

const char* to_string(Family f) noexcept;
Family parse_family(const std::string& s);

struct ArchitectureId {
    Family family = Family::regression;
    double scale = 1.0; ///< in (0, 1]

    void validate() const;
};

/// max(1, round-half-up(count * scale)). Throws if scale is outside (0, 1].
int scaled_count(int count, double scale);

// All builders take adjacency input of shape (1, order, order).
nn::ModelSpec build_dense(double scale, int order = 50);
nn::ModelSpec build_seq_cnn(double scale, int order = 50);
/// Kernel plan is fixed for order 50; other orders throw ShapeError.
nn::ModelSpec build_wide_cnn(double scale, int order = 50);

/// Dispatch over the three network families; regression has no ModelSpec.
nn::ModelSpec build_network(const ArchitectureId& id, int order);

class RegressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// prediction = slope * edges + intercept
struct RegressionModel {
    double slope = 0;
    double intercept = 0;

    double predict(double edges) const noexcept { return slope * edges + intercept; }
    friend bool operator==(const RegressionModel&, const RegressionModel&) = default;
};

/// Ordinary least squares; needs at least two distinct x values.
RegressionModel fit_line(const std::vector<double>& x, const std::vector<double>& y);
RegressionModel fit_regression(const data::Dataset& ds, data::Target target);
std::vector<double> predict_regression(const RegressionModel& m, const data::Dataset& ds);

/// Text form: "chromnet-regression 1\ntarget T\nslope S\nintercept B\n",
/// coefficients in shortest round-trip form.
std::string regression_to_text(const RegressionModel& m, data::Target target);
RegressionModel parse_regression_text(const std::string& text, data::Target* target = nullptr);

} // namespace chromnet::learn
