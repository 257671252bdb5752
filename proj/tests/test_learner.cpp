#include <doctest.h>

#include <fstream>
#include <sstream>

#include "chromnet/learner.hpp"
#include "chromnet/nn/network.hpp"
#include "support/gradcheck.hpp"

using namespace chromnet;
using namespace chromnet::learn;
using nn::LayerKind;

namespace {

std::string read_golden(const std::string& name) {
    std::ifstream in(std::string(CHROMNET_GOLDEN_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<const nn::LayerSpec*> layers_of(const nn::ModelSpec& s, LayerKind kind) {
    std::vector<const nn::LayerSpec*> out;
    for (const auto& L : s.nodes)
        if (L.kind == kind) out.push_back(&L);
    return out;
}

std::size_t shape_of(const nn::ModelSpec& s, const std::string& name) {
    const auto shapes = nn::shape_plan(s);
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        if (s.nodes[i].name == name) return shapes[i].size();
    FAIL("no layer named " << name);
    return 0;
}

data::Dataset linear_dataset(const std::vector<std::pair<int, int>>& edges_and_labels) {
    data::Dataset ds;
    ds.order = 12;
    for (auto [e, y] : edges_and_labels) {
        data::LabeledGraph r;
        r.graph = Graph(12);
        int added = 0;
        for (int i = 0; i < 12 && added < e; ++i)
            for (int j = i + 1; j < 12 && added < e; ++j, ++added) r.graph.set_edge(i, j);
        r.edges = e;
        r.chromatic = y;
        r.clique = 1;
        r.source_order = 12;
        ds.records.push_back(r);
    }
    return ds;
}

} // namespace

TEST_CASE("scale rounding") {
    CHECK(scaled_count(1000, 1.0) == 1000);
    CHECK(scaled_count(1000, 0.01) == 10);
    CHECK(scaled_count(64, 0.125) == 8);
    CHECK(scaled_count(300, 0.125) == 38); // 37.5 rounds half up
    CHECK(scaled_count(64, 0.001) == 1);
    CHECK_THROWS(scaled_count(10, 0.0));
    CHECK_THROWS(scaled_count(10, 1.5));
}

TEST_CASE("dense family") {
    const auto s = build_dense(1.0);
    const auto dense = layers_of(s, LayerKind::dense);
    REQUIRE(dense.size() == 14);
    for (std::size_t i = 0; i < 13; ++i) CHECK(dense[i]->units == 1000);
    CHECK(dense.back()->units == 1);
    for (const auto* a : layers_of(s, LayerKind::activation)) CHECK(a->fn == nn::ActivationFn::relu);
    CHECK(shape_of(s, "flatten_1") == 2500);

    for (auto* L : layers_of(build_dense(0.01), LayerKind::dense)) CHECK((L->units == 10 || L->units == 1));
    CHECK(build_dense(0.01).nodes.back().units == 1);
}

TEST_CASE("sequential CNN family") {
    const auto s = build_seq_cnn(1.0);
    const auto convs = layers_of(s, LayerKind::conv2d);
    REQUIRE(convs.size() == 2);
    CHECK(convs[0]->filters == 512);
    CHECK(convs[1]->filters == 64);
    for (const auto* c : convs) {
        CHECK(c->kernel == nn::Extent{3, 3});
        CHECK(c->stride == nn::Extent{1, 1});
    }
    const auto dense = layers_of(s, LayerKind::dense);
    REQUIRE(dense.size() == 8);
    for (std::size_t i = 0; i < 7; ++i) CHECK(dense[i]->units == 300);
    for (const auto* a : layers_of(s, LayerKind::activation)) {
        CHECK(a->fn == nn::ActivationFn::leaky_relu);
        CHECK(a->alpha == 0.3);
    }
    CHECK(shape_of(s, "flatten_7") == 7744);
}

TEST_CASE("sequential CNN rejects inputs too small for the stack") {
    CHECK_THROWS_AS(build_seq_cnn(1.0, 7), nn::ShapeError);
    CHECK_THROWS_AS(build_seq_cnn(1.0, 9), nn::ShapeError);
    CHECK_NOTHROW(build_seq_cnn(1.0, 10));
    try {
        build_seq_cnn(0.1, 7);
    } catch (const nn::ShapeError& e) {
        CHECK(e.layer() == "conv2d_4");
    }
}

TEST_CASE("wide CNN family") {
    const auto s = build_wide_cnn(1.0);
    CHECK(shape_of(s, "p1_flatten") == 7744);
    CHECK(shape_of(s, "p2_flatten") == 64);
    CHECK(shape_of(s, "p3_flatten") == 64);
    CHECK(shape_of(s, "p4_flatten") == 2048);
    CHECK(shape_of(s, "p5_flatten") == 512);
    CHECK(shape_of(s, "concat") == 10432);
    for (const auto* c : layers_of(s, LayerKind::conv2d)) {
        const bool first = c->name.find("conv1") != std::string::npos;
        CHECK(c->filters == (first ? 512 : 64));
    }
    const auto dense = layers_of(s, LayerKind::dense);
    REQUIRE(dense.size() == 8);
    for (std::size_t i = 0; i < 7; ++i) CHECK(dense[i]->units == 200);
    CHECK_THROWS_AS(build_wide_cnn(1.0, 40), nn::ShapeError);
}

TEST_CASE("builders are pure and pass the shape checker") {
    for (double scale : {1.0, 0.5, 0.125, 0.01}) {
        CHECK(build_dense(scale) == build_dense(scale));
        CHECK(build_seq_cnn(scale) == build_seq_cnn(scale));
        CHECK(build_wide_cnn(scale) == build_wide_cnn(scale));
        CHECK_NOTHROW(nn::shape_plan(build_wide_cnn(scale)));
    }
    CHECK(build_network({Family::seq_cnn, 0.25}, 50) == build_seq_cnn(0.25));
    CHECK_THROWS(build_network({Family::regression, 1.0}, 50));
}

TEST_CASE("golden architecture dumps at scale 1") {
    CHECK(nn::to_text(build_dense(1.0)) == read_golden("dense.arch"));
    CHECK(nn::to_text(build_seq_cnn(1.0)) == read_golden("seq_cnn.arch"));
    CHECK(nn::to_text(build_wide_cnn(1.0)) == read_golden("wide_cnn.arch"));
}

TEST_CASE("architecture gradient checks at reduced width") {
    testing::GradCheckOptions opt;
    opt.batch = 2;
    opt.binary_input = true;
    opt.max_per_tensor = 6;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        CAPTURE(seed);
        CHECK(testing::gradient_check(build_dense(0.01, 12), seed, opt).max_rel_error <= 1e-4);
        CHECK(testing::gradient_check(build_seq_cnn(0.02, 12), seed, opt).max_rel_error <= 1e-4);
    }
}

TEST_CASE("regression examples") {
    const auto two = fit_line({0, 2}, {1, 3});
    CHECK(two.slope == doctest::Approx(1.0));
    CHECK(two.intercept == doctest::Approx(1.0));
    const auto flat = fit_line({1, 2, 3}, {4, 4, 4});
    CHECK(flat.slope == 0.0);
    CHECK(flat.intercept == 4.0);
    CHECK_THROWS_AS(fit_line({2, 2, 2}, {1, 2, 3}), RegressionError);
    CHECK_THROWS_AS(fit_line({}, {}), RegressionError);
}

TEST_CASE("regression recovers exact linear data") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const double a = rng.uniform_real(-3, 3);
        const double b = rng.uniform_real(-10, 10);
        std::vector<double> x, y;
        for (int i = 0; i < 40; ++i) {
            x.push_back(static_cast<double>(rng.uniform_int(0, 1225)));
            y.push_back(a * x.back() + b);
        }
        const auto m = fit_line(x, y);
        CHECK(std::abs(m.slope - a) <= 1e-9);
        CHECK(std::abs(m.intercept - b) <= 1e-9);
    }
}

TEST_CASE("regression on a dataset") {
    const auto ds = linear_dataset({{0, 1}, {10, 3}, {20, 5}, {30, 7}});
    const auto m = fit_regression(ds, data::Target::chromatic);
    CHECK(m.slope == doctest::Approx(0.2));
    CHECK(m.intercept == doctest::Approx(1.0));
    CHECK(predict_regression(m, ds)[3] == doctest::Approx(7.0));
    CHECK_THROWS_AS(fit_regression(linear_dataset({{5, 1}, {5, 2}}), data::Target::chromatic), RegressionError);
}

TEST_CASE("regression text round-trips exactly") {
    const RegressionModel m{0.1 + 0.2, -1.0 / 3.0};
    data::Target t = data::Target::chromatic;
    CHECK(parse_regression_text(regression_to_text(m, data::Target::clique), &t) == m);
    CHECK(t == data::Target::clique);
    CHECK_THROWS(parse_regression_text("chromnet-regression 1\nslope 1\n"));
    CHECK_THROWS(parse_regression_text("junk"));
}
