#include <algorithm>
#include <cstddef>

#include "chromnet/nn/kernels.hpp"

namespace chromnet::nn::parallel {

namespace {
using idx = std::ptrdiff_t;
}

template <class T>
void dense_forward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y) {
    const idx in = g.in;
#pragma omp parallel for collapse(2) schedule(static)
    for (idx n = 0; n < g.batch; ++n) {
        for (idx o = 0; o < g.out; ++o) {
            const T* xr = x.data() + n * in;
            const T* wr = w.data() + o * in;
            T acc = 0;
            for (idx i = 0; i < in; ++i) acc += wr[i] * xr[i];
            y[static_cast<std::size_t>(n * g.out + o)] = acc + b[static_cast<std::size_t>(o)];
        }
    }
}

template <class T>
void dense_backward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                    std::span<T> dw, std::span<T> db, T* dx) {
    const idx in = g.in;
    const idx out = g.out;
#pragma omp parallel for schedule(static)
    for (idx o = 0; o < out; ++o) {
        T* dwr = dw.data() + o * in;
        std::fill(dwr, dwr + in, T{0});
        T bias = 0;
        for (idx n = 0; n < g.batch; ++n) {
            const T gy = dy[static_cast<std::size_t>(n * out + o)];
            bias += gy;
            if (gy == T{0}) continue;
            const T* xr = x.data() + n * in;
            for (idx i = 0; i < in; ++i) dwr[i] += gy * xr[i];
        }
        db[static_cast<std::size_t>(o)] = bias;
    }
    if (!dx) return;
#pragma omp parallel for schedule(static)
    for (idx n = 0; n < g.batch; ++n) {
        T* dxr = dx + n * in;
        std::fill(dxr, dxr + in, T{0});
        for (idx o = 0; o < out; ++o) {
            const T gy = dy[static_cast<std::size_t>(n * out + o)];
            if (gy == T{0}) continue;
            const T* wr = w.data() + o * in;
            for (idx i = 0; i < in; ++i) dxr[i] += wr[i] * gy;
        }
    }
}

template <class T>
void conv2d_forward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                    std::span<T> y) {
    const idx in_plane = idx{g.in_h} * g.in_w;
    const idx out_plane = idx{g.out_h} * g.out_w;
    const idx ksize = idx{g.kh} * g.kw;
#pragma omp parallel for collapse(2) schedule(static)
    for (idx n = 0; n < g.batch; ++n) {
        for (idx f = 0; f < g.filters; ++f) {
            T* out = y.data() + (n * g.filters + f) * out_plane;
            std::fill(out, out + out_plane, b[static_cast<std::size_t>(f)]);
            for (idx c = 0; c < g.in_c; ++c) {
                const T* in = x.data() + (n * g.in_c + c) * in_plane;
                const T* wk = w.data() + (f * g.in_c + c) * ksize;
                for (idx ky = 0; ky < g.kh; ++ky) {
                    for (idx kx = 0; kx < g.kw; ++kx) {
                        const T wv = wk[ky * g.kw + kx];
                        for (idx oy = 0; oy < g.out_h; ++oy) {
                            const T* row = in + (oy * g.sh + ky) * g.in_w + kx;
                            T* orow = out + oy * g.out_w;
                            if (g.sw == 1) {
                                for (idx ox = 0; ox < g.out_w; ++ox) orow[ox] += wv * row[ox];
                            } else {
                                for (idx ox = 0; ox < g.out_w; ++ox) orow[ox] += wv * row[ox * g.sw];
                            }
                        }
                    }
                }
            }
        }
    }
}

template <class T>
void conv2d_backward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                     std::span<T> dw, std::span<T> db, T* dx) {
    const idx in_plane = idx{g.in_h} * g.in_w;
    const idx out_plane = idx{g.out_h} * g.out_w;
    const idx ksize = idx{g.kh} * g.kw;

#pragma omp parallel for collapse(2) schedule(static)
    for (idx f = 0; f < g.filters; ++f) {
        for (idx c = 0; c < g.in_c; ++c) {
            T* dwk = dw.data() + (f * g.in_c + c) * ksize;
            std::fill(dwk, dwk + ksize, T{0});
            for (idx n = 0; n < g.batch; ++n) {
                const T* go = dy.data() + (n * g.filters + f) * out_plane;
                const T* in = x.data() + (n * g.in_c + c) * in_plane;
                for (idx ky = 0; ky < g.kh; ++ky) {
                    for (idx kx = 0; kx < g.kw; ++kx) {
                        T acc = 0;
                        for (idx oy = 0; oy < g.out_h; ++oy) {
                            const T* row = in + (oy * g.sh + ky) * g.in_w + kx;
                            const T* grow = go + oy * g.out_w;
                            for (idx ox = 0; ox < g.out_w; ++ox) acc += grow[ox] * row[ox * g.sw];
                        }
                        dwk[ky * g.kw + kx] += acc;
                    }
                }
            }
        }
    }

#pragma omp parallel for schedule(static)
    for (idx f = 0; f < g.filters; ++f) {
        T acc = 0;
        for (idx n = 0; n < g.batch; ++n) {
            const T* go = dy.data() + (n * g.filters + f) * out_plane;
            for (idx p = 0; p < out_plane; ++p) acc += go[p];
        }
        db[static_cast<std::size_t>(f)] = acc;
    }

    if (!dx) return;
    // Each (sample, channel) plane of dx is owned by one thread, so the
    // scatter below needs no synchronisation.
#pragma omp parallel for collapse(2) schedule(static)
    for (idx n = 0; n < g.batch; ++n) {
        for (idx c = 0; c < g.in_c; ++c) {
            T* plane = dx + (n * g.in_c + c) * in_plane;
            std::fill(plane, plane + in_plane, T{0});
            for (idx f = 0; f < g.filters; ++f) {
                const T* go = dy.data() + (n * g.filters + f) * out_plane;
                const T* wk = w.data() + (f * g.in_c + c) * ksize;
                for (idx ky = 0; ky < g.kh; ++ky) {
                    for (idx kx = 0; kx < g.kw; ++kx) {
                        const T wv = wk[ky * g.kw + kx];
                        for (idx oy = 0; oy < g.out_h; ++oy) {
                            T* row = plane + (oy * g.sh + ky) * g.in_w + kx;
                            const T* grow = go + oy * g.out_w;
                            for (idx ox = 0; ox < g.out_w; ++ox) row[ox * g.sw] += wv * grow[ox];
                        }
                    }
                }
            }
        }
    }
}

template <class T>
void maxpool_forward(const PoolGeom& g, std::span<const T> x, std::span<T> y, std::span<int> argmax) {
    const idx in_plane = idx{g.in_h} * g.in_w;
    const idx out_plane = idx{g.out_h} * g.out_w;
#pragma omp parallel for collapse(2) schedule(static)
    for (idx n = 0; n < g.batch; ++n) {
        for (idx c = 0; c < g.channels; ++c) {
            const idx base = (n * g.channels + c) * in_plane;
            const idx obase = (n * g.channels + c) * out_plane;
            for (idx oy = 0; oy < g.out_h; ++oy) {
                for (idx ox = 0; ox < g.out_w; ++ox) {
                    idx best = base + (oy * g.pool) * g.in_w + ox * g.pool;
                    for (idx py = 0; py < g.pool; ++py) {
                        for (idx px = 0; px < g.pool; ++px) {
                            const idx at = base + (oy * g.pool + py) * g.in_w + ox * g.pool + px;
                            if (x[static_cast<std::size_t>(at)] > x[static_cast<std::size_t>(best)]) best = at;
                        }
                    }
                    const auto o = static_cast<std::size_t>(obase + oy * g.out_w + ox);
                    y[o] = x[static_cast<std::size_t>(best)];
                    argmax[o] = static_cast<int>(best);
                }
            }
        }
    }
}

template <class T>
void maxpool_backward(const PoolGeom& g, std::span<const T> dy, std::span<const int> argmax, std::span<T> dx) {
    const idx in_plane = idx{g.in_h} * g.in_w;
    const idx out_plane = idx{g.out_h} * g.out_w;
    // Windows never overlap, so planes are independent.
#pragma omp parallel for collapse(2) schedule(static)
    for (idx n = 0; n < g.batch; ++n) {
        for (idx c = 0; c < g.channels; ++c) {
            const idx base = (n * g.channels + c) * in_plane;
            std::fill(dx.begin() + base, dx.begin() + base + in_plane, T{0});
            const idx obase = (n * g.channels + c) * out_plane;
            for (idx o = obase; o < obase + out_plane; ++o)
                dx[static_cast<std::size_t>(argmax[static_cast<std::size_t>(o)])] += dy[static_cast<std::size_t>(o)];
        }
    }
}

template <class T>
void activation_forward(ActivationFn fn, T alpha, std::span<const T> x, std::span<T> y) {
    const auto n = static_cast<idx>(x.size());
    switch (fn) {
    case ActivationFn::linear: std::copy(x.begin(), x.end(), y.begin()); break;
    case ActivationFn::relu:
#pragma omp parallel for schedule(static)
        for (idx i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = std::max(x[static_cast<std::size_t>(i)], T{0});
        break;
    case ActivationFn::leaky_relu:
#pragma omp parallel for schedule(static)
        for (idx i = 0; i < n; ++i) {
            const T v = x[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(i)] = v > 0 ? v : alpha * v;
        }
        break;
    }
}

template <class T>
void activation_backward(ActivationFn fn, T alpha, std::span<const T> x, std::span<const T> dy, std::span<T> dx) {
    const auto n = static_cast<idx>(x.size());
    switch (fn) {
    case ActivationFn::linear: std::copy(dy.begin(), dy.end(), dx.begin()); break;
    case ActivationFn::relu:
#pragma omp parallel for schedule(static)
        for (idx i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            dx[k] = x[k] > 0 ? dy[k] : T{0};
        }
        break;
    case ActivationFn::leaky_relu:
#pragma omp parallel for schedule(static)
        for (idx i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            dx[k] = x[k] > 0 ? dy[k] : alpha * dy[k];
        }
        break;
    }
}

#define CHROMNET_INSTANTIATE(T)                                                                                    \
    template void dense_forward<T>(const DenseGeom&, std::span<const T>, std::span<const T>, std::span<const T>, \
                                   std::span<T>);                                                                  \
    template void dense_backward<T>(const DenseGeom&, std::span<const T>, std::span<const T>, std::span<const T>, \
                                    std::span<T>, std::span<T>, T*);                                               \
    template void conv2d_forward<T>(const ConvGeom&, std::span<const T>, std::span<const T>, std::span<const T>, \
                                    std::span<T>);                                                                 \
    template void conv2d_backward<T>(const ConvGeom&, std::span<const T>, std::span<const T>,                     \
                                     std::span<const T>, std::span<T>, std::span<T>, T*);                          \
    template void maxpool_forward<T>(const PoolGeom&, std::span<const T>, std::span<T>, std::span<int>);          \
    template void maxpool_backward<T>(const PoolGeom&, std::span<const T>, std::span<const int>, std::span<T>);   \
    template void activation_forward<T>(ActivationFn, T, std::span<const T>, std::span<T>);                       \
    template void activation_backward<T>(ActivationFn, T, std::span<const T>, std::span<const T>, std::span<T>);

CHROMNET_INSTANTIATE(float)
CHROMNET_INSTANTIATE(double)

} // namespace chromnet::nn::parallel
