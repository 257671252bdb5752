// Serial reference vs OpenMP kernels, plus one full training step.
//   chromnet_bench [--repeat R] [--threads T]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chromnet/learner.hpp"
#include "chromnet/nn/kernels.hpp"
#include "chromnet/nn/network.hpp"
#include "chromnet/rng.hpp"

using namespace chromnet;
using namespace chromnet::nn;

namespace {

std::vector<float> random_vec(std::size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.uniform_real(-1, 1));
    return v;
}

// Best of `repeat` wall times, in milliseconds.
double best_ms(int repeat, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < repeat; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

double max_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(double(a[i]) - double(b[i])));
    return d;
}

void row(const char* name, double serial, double parallel, double diff) {
    std::printf("%-28s %10.2f %10.2f %8.2fx %10.1e\n", name, serial, parallel, serial / parallel, diff);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel benchmark: serial reference vs OpenMP"};
    int repeat = 5;
    int threads = 0;
    app.add_option("--repeat", repeat)->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "0 = OpenMP default")->check(CLI::NonNegativeNumber);
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    Rng rng(1);
    std::printf("threads %d, best of %d\n", omp_get_max_threads(), repeat);
    std::printf("%-28s %10s %10s %9s %10s\n", "kernel", "serial ms", "omp ms", "speedup", "max |diff|");

    {
        // First layer of the wide network at scale 0.125.
        const ConvGeom g{16, 1, 50, 50, 64, 3, 3, 1, 1, 48, 48};
        const auto x = random_vec(std::size_t(g.batch) * 50 * 50, rng);
        const auto w = random_vec(std::size_t(g.filters) * 9, rng);
        const auto b = random_vec(std::size_t(g.filters), rng);
        const std::size_t ysize = std::size_t(g.batch) * g.filters * 48 * 48;
        std::vector<float> ys(ysize), yp(ysize);
        const double s = best_ms(repeat, [&] { serial::conv2d_forward<float>(g, x, w, b, ys); });
        const double p = best_ms(repeat, [&] { parallel::conv2d_forward<float>(g, x, w, b, yp); });
        row("conv2d_forward 3x3/64", s, p, max_abs_diff(ys, yp));

        const auto dy = random_vec(ysize, rng);
        std::vector<float> dws(w.size()), dwp(w.size()), dbs(b.size()), dbp(b.size()), dxs(x.size()), dxp(x.size());
        const double sb = best_ms(repeat, [&] { serial::conv2d_backward<float>(g, x, w, dy, dws, dbs, dxs.data()); });
        const double pb = best_ms(repeat, [&] { parallel::conv2d_backward<float>(g, x, w, dy, dwp, dbp, dxp.data()); });
        row("conv2d_backward 3x3/64", sb, pb, std::max(max_abs_diff(dws, dwp), max_abs_diff(dxs, dxp)));
    }
    {
        const DenseGeom g{128, 1000, 1000};
        const auto x = random_vec(std::size_t(g.batch) * g.in, rng);
        const auto w = random_vec(std::size_t(g.in) * g.out, rng);
        const auto b = random_vec(std::size_t(g.out), rng);
        std::vector<float> ys(std::size_t(g.batch) * g.out), yp(ys.size());
        const double s = best_ms(repeat, [&] { serial::dense_forward<float>(g, x, w, b, ys); });
        const double p = best_ms(repeat, [&] { parallel::dense_forward<float>(g, x, w, b, yp); });
        row("dense_forward 1000x1000", s, p, max_abs_diff(ys, yp));

        const auto dy = random_vec(ys.size(), rng);
        std::vector<float> dws(w.size()), dwp(w.size()), dbs(b.size()), dbp(b.size()), dxs(x.size()), dxp(x.size());
        const double sb = best_ms(repeat, [&] { serial::dense_backward<float>(g, x, w, dy, dws, dbs, dxs.data()); });
        const double pb = best_ms(repeat, [&] { parallel::dense_backward<float>(g, x, w, dy, dwp, dbp, dxp.data()); });
        row("dense_backward 1000x1000", sb, pb, std::max(max_abs_diff(dws, dwp), max_abs_diff(dxs, dxp)));
    }
    {
        const PoolGeom g{16, 64, 48, 48, 2, 24, 24};
        const auto x = random_vec(std::size_t(g.batch) * g.channels * 48 * 48, rng);
        const std::size_t ysize = std::size_t(g.batch) * g.channels * 24 * 24;
        std::vector<float> ys(ysize), yp(ysize);
        std::vector<int> as(ysize), ap(ysize);
        const double s = best_ms(repeat, [&] { serial::maxpool_forward<float>(g, x, ys, as); });
        const double p = best_ms(repeat, [&] { parallel::maxpool_forward<float>(g, x, yp, ap); });
        row("maxpool_forward 2x2", s, p, max_abs_diff(ys, yp));
    }
    {
        Network<float> net(learn::build_wide_cnn(0.125));
        Rng init(2);
        net.init_glorot(init);
        const int batch = 16;
        std::vector<float> x(std::size_t(batch) * net.input_size());
        for (auto& v : x) v = static_cast<float>(rng.uniform_int(0, 1));
        const std::vector<float> dout(batch, 1.0f);
        std::vector<float> outs, outp;
        const double s = best_ms(repeat, [&] {
            const auto y = net.forward(x, batch, ExecPolicy::serial);
            outs.assign(y.begin(), y.end());
            net.backward(dout, ExecPolicy::serial);
        });
        const double p = best_ms(repeat, [&] {
            const auto y = net.forward(x, batch, ExecPolicy::parallel);
            outp.assign(y.begin(), y.end());
            net.backward(dout, ExecPolicy::parallel);
        });
        row("wide_cnn@0.125 fwd+bwd b16", s, p, max_abs_diff(outs, outp));
    }
    return 0;
}
