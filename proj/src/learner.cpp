#include "chromnet/learner.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace chromnet::learn {

using nn::ActivationFn;
using nn::Extent;
using nn::ModelBuilder;

const char* to_string(Family f) noexcept {
    switch (f) {
    case Family::regression: return "regression";
    case Family::dense: return "dense";
    case Family::seq_cnn: return "seq_cnn";
    case Family::wide_cnn: return "wide_cnn";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    if (s == "regression") return Family::regression;
    if (s == "dense") return Family::dense;
    if (s == "seq_cnn") return Family::seq_cnn;
    if (s == "wide_cnn") return Family::wide_cnn;
    throw std::invalid_argument("unknown architecture '" + s + "' (regression|dense|seq_cnn|wide_cnn)");
}

void ArchitectureId::validate() const { scaled_count(1, scale); }

int scaled_count(int count, double scale) {
    if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("scale must be in (0, 1]");
    return std::max(1, static_cast<int>(std::floor(count * scale + 0.5)));
}

namespace {

constexpr double kLeak = 0.3;

int leaky(ModelBuilder& b, int in) { return b.activation(in, ActivationFn::leaky_relu, kLeak); }

nn::Shape adjacency_shape(int order) {
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    return {1, order, order};
}

int dense_head(ModelBuilder& b, int in, int layers, int units, ActivationFn fn) {
    for (int i = 0; i < layers; ++i) in = b.activation(b.dense(in, units), fn, kLeak);
    return b.dense(in, 1, "output");
}

} // namespace

nn::ModelSpec build_dense(double scale, int order) {
    const int units = scaled_count(1000, scale);
    ModelBuilder b("dense", adjacency_shape(order));
    const int flat = b.flatten(0);
    dense_head(b, flat, 13, units, ActivationFn::relu);
    return b.build();
}

nn::ModelSpec build_seq_cnn(double scale, int order) {
    ModelBuilder b("seq_cnn", adjacency_shape(order));
    int x = leaky(b, b.conv2d(0, scaled_count(512, scale), {3, 3}, {1, 1}));
    x = b.maxpool2d(x, 2);
    x = leaky(b, b.conv2d(x, scaled_count(64, scale), {3, 3}, {1, 1}));
    x = b.maxpool2d(x, 2);
    x = b.flatten(x);
    dense_head(b, x, 7, scaled_count(300, scale), ActivationFn::leaky_relu);
    return b.build();
}

nn::ModelSpec build_wide_cnn(double scale, int order) {
    if (order != 50) throw nn::ShapeError(0, "input", "wide_cnn kernel plan is defined for order 50 only");
    const int first = scaled_count(512, scale);
    const int second = scaled_count(64, scale);
    ModelBuilder b("wide_cnn", adjacency_shape(order));

    int p1 = leaky(b, b.conv2d(0, first, {3, 3}, {1, 1}, "p1_conv1"));
    p1 = b.maxpool2d(p1, 2, "p1_pool1");
    p1 = leaky(b, b.conv2d(p1, second, {3, 3}, {1, 1}, "p1_conv2"));
    p1 = b.flatten(b.maxpool2d(p1, 2, "p1_pool2"), "p1_flatten");

    int p2 = leaky(b, b.conv2d(0, first, {5, 5}, {5, 5}, "p2_conv1"));
    p2 = b.maxpool2d(p2, 2, "p2_pool1");
    p2 = b.flatten(leaky(b, b.conv2d(p2, second, {5, 5}, {1, 1}, "p2_conv2")), "p2_flatten");

    int p3 = leaky(b, b.conv2d(0, first, {10, 10}, {10, 10}, "p3_conv1"));
    p3 = b.maxpool2d(p3, 2, "p3_pool1");
    p3 = b.flatten(leaky(b, b.conv2d(p3, second, {2, 2}, {1, 1}, "p3_conv2")), "p3_flatten");

    const int p4 = b.flatten(leaky(b, b.conv2d(0, first, {25, 25}, {25, 25}, "p4_conv1")), "p4_flatten");
    const int p5 = b.flatten(leaky(b, b.conv2d(0, first, {50, 50}, {1, 1}, "p5_conv1")), "p5_flatten");

    const int joined = b.concat({p1, p2, p3, p4, p5}, "concat");
    dense_head(b, joined, 7, scaled_count(200, scale), ActivationFn::leaky_relu);
    return b.build();
}

nn::ModelSpec build_network(const ArchitectureId& id, int order) {
    switch (id.family) {
    case Family::dense: return build_dense(id.scale, order);
    case Family::seq_cnn: return build_seq_cnn(id.scale, order);
    case Family::wide_cnn: return build_wide_cnn(id.scale, order);
    case Family::regression: break;
    }
    throw std::invalid_argument("regression is not a network architecture");
}

RegressionModel fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw RegressionError("regression needs equal, non-empty x and y");
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw RegressionError("degenerate design: all edge counts are equal");
    RegressionModel m;
    m.slope = sxy / sxx;
    m.intercept = my - m.slope * mx;
    if (!std::isfinite(m.slope) || !std::isfinite(m.intercept)) throw RegressionError("non-finite coefficients");
    return m;
}

RegressionModel fit_regression(const data::Dataset& ds, data::Target target) {
    std::vector<double> x, y;
    x.reserve(ds.size());
    y.reserve(ds.size());
    for (const auto& r : ds.records) {
        if (!r.labeled()) throw RegressionError("dataset contains unlabelled records");
        x.push_back(r.edges);
        y.push_back(r.label(target));
    }
    return fit_line(x, y);
}

std::vector<double> predict_regression(const RegressionModel& m, const data::Dataset& ds) {
    std::vector<double> out;
    out.reserve(ds.size());
    for (const auto& r : ds.records) out.push_back(m.predict(r.edges));
    return out;
}

namespace {

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw RegressionError("bad coefficient '" + s + "'");
    }
    return v;
}

} // namespace

std::string regression_to_text(const RegressionModel& m, data::Target target) {
    std::ostringstream os;
    os << "chromnet-regression 1\n"
       << "target " << data::to_string(target) << '\n'
       << "slope " << shortest(m.slope) << '\n'
       << "intercept " << shortest(m.intercept) << '\n';
    return os.str();
}

RegressionModel parse_regression_text(const std::string& text, data::Target* target) {
    std::istringstream is(text);
    std::string key, value;
    if (!std::getline(is, key) || key != "chromnet-regression 1") throw RegressionError("not a regression model file");
    RegressionModel m;
    bool have_slope = false, have_intercept = false, have_target = false;
    while (is >> key >> value) {
        if (key == "slope") {
            m.slope = parse_double(value);
            have_slope = true;
        } else if (key == "intercept") {
            m.intercept = parse_double(value);
            have_intercept = true;
        } else if (key == "target") {
            const auto t = data::parse_target(value);
            if (target) *target = t;
            have_target = true;
        } else {
            throw RegressionError("unknown key '" + key + "' in regression model file");
        }
    }
    if (!have_slope || !have_intercept || !have_target) throw RegressionError("regression model file is incomplete");
    return m;
}

} // namespace chromnet::learn
