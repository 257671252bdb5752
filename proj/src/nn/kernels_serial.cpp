#include <cstddef>

#include "chromnet/nn/kernels.hpp"

// Reference kernels: one loop nest per formula, no blocking, no threads.

namespace chromnet::nn::serial {

namespace {
using idx = std::ptrdiff_t;

template <class T>
T at(std::span<const T> s, idx i) {
    return s[static_cast<std::size_t>(i)];
}
} // namespace

template <class T>
void dense_forward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y) {
    for (idx n = 0; n < g.batch; ++n) {
        for (idx o = 0; o < g.out; ++o) {
            T acc = at(b, o);
            for (idx i = 0; i < g.in; ++i) acc += at(w, o * g.in + i) * at(x, n * g.in + i);
            y[static_cast<std::size_t>(n * g.out + o)] = acc;
        }
    }
}

template <class T>
void dense_backward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                    std::span<T> dw, std::span<T> db, T* dx) {
    for (idx o = 0; o < g.out; ++o) {
        for (idx i = 0; i < g.in; ++i) {
            T acc = 0;
            for (idx n = 0; n < g.batch; ++n) acc += at(dy, n * g.out + o) * at(x, n * g.in + i);
            dw[static_cast<std::size_t>(o * g.in + i)] = acc;
        }
        T acc = 0;
        for (idx n = 0; n < g.batch; ++n) acc += at(dy, n * g.out + o);
        db[static_cast<std::size_t>(o)] = acc;
    }
    if (!dx) return;
    for (idx n = 0; n < g.batch; ++n) {
        for (idx i = 0; i < g.in; ++i) {
            T acc = 0;
            for (idx o = 0; o < g.out; ++o) acc += at(w, o * g.in + i) * at(dy, n * g.out + o);
            dx[n * g.in + i] = acc;
        }
    }
}

namespace {

idx x_index(const ConvGeom& g, idx n, idx c, idx y, idx xx) { return ((n * g.in_c + c) * g.in_h + y) * g.in_w + xx; }
idx y_index(const ConvGeom& g, idx n, idx f, idx y, idx xx) {
    return ((n * g.filters + f) * g.out_h + y) * g.out_w + xx;
}
idx w_index(const ConvGeom& g, idx f, idx c, idx ky, idx kx) { return ((f * g.in_c + c) * g.kh + ky) * g.kw + kx; }

} // namespace

template <class T>
void conv2d_forward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                    std::span<T> y) {
    for (idx n = 0; n < g.batch; ++n)
        for (idx f = 0; f < g.filters; ++f)
            for (idx oy = 0; oy < g.out_h; ++oy)
                for (idx ox = 0; ox < g.out_w; ++ox) {
                    T acc = at(b, f);
                    for (idx c = 0; c < g.in_c; ++c)
                        for (idx ky = 0; ky < g.kh; ++ky)
                            for (idx kx = 0; kx < g.kw; ++kx)
                                acc += at(w, w_index(g, f, c, ky, kx)) *
                                       at(x, x_index(g, n, c, oy * g.sh + ky, ox * g.sw + kx));
                    y[static_cast<std::size_t>(y_index(g, n, f, oy, ox))] = acc;
                }
}

template <class T>
void conv2d_backward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                     std::span<T> dw, std::span<T> db, T* dx) {
    for (idx f = 0; f < g.filters; ++f) {
        for (idx c = 0; c < g.in_c; ++c)
            for (idx ky = 0; ky < g.kh; ++ky)
                for (idx kx = 0; kx < g.kw; ++kx) {
                    T acc = 0;
                    for (idx n = 0; n < g.batch; ++n)
                        for (idx oy = 0; oy < g.out_h; ++oy)
                            for (idx ox = 0; ox < g.out_w; ++ox)
                                acc += at(dy, y_index(g, n, f, oy, ox)) *
                                       at(x, x_index(g, n, c, oy * g.sh + ky, ox * g.sw + kx));
                    dw[static_cast<std::size_t>(w_index(g, f, c, ky, kx))] = acc;
                }
        T acc = 0;
        for (idx n = 0; n < g.batch; ++n)
            for (idx oy = 0; oy < g.out_h; ++oy)
                for (idx ox = 0; ox < g.out_w; ++ox) acc += at(dy, y_index(g, n, f, oy, ox));
        db[static_cast<std::size_t>(f)] = acc;
    }
    if (!dx) return;
    // Gather form: each input pixel sums over the outputs whose window covers it.
    for (idx n = 0; n < g.batch; ++n)
        for (idx c = 0; c < g.in_c; ++c)
            for (idx iy = 0; iy < g.in_h; ++iy)
                for (idx ix = 0; ix < g.in_w; ++ix) {
                    T acc = 0;
                    for (idx f = 0; f < g.filters; ++f)
                        for (idx ky = 0; ky < g.kh; ++ky)
                            for (idx kx = 0; kx < g.kw; ++kx) {
                                const idx ty = iy - ky;
                                const idx tx = ix - kx;
                                if (ty < 0 || tx < 0 || ty % g.sh || tx % g.sw) continue;
                                const idx oy = ty / g.sh;
                                const idx ox = tx / g.sw;
                                if (oy >= g.out_h || ox >= g.out_w) continue;
                                acc += at(w, w_index(g, f, c, ky, kx)) * at(dy, y_index(g, n, f, oy, ox));
                            }
                    dx[x_index(g, n, c, iy, ix)] = acc;
                }
}

template <class T>
void maxpool_forward(const PoolGeom& g, std::span<const T> x, std::span<T> y, std::span<int> argmax) {
    for (idx n = 0; n < g.batch; ++n)
        for (idx c = 0; c < g.channels; ++c)
            for (idx oy = 0; oy < g.out_h; ++oy)
                for (idx ox = 0; ox < g.out_w; ++ox) {
                    idx best = -1;
                    for (idx py = 0; py < g.pool; ++py)
                        for (idx px = 0; px < g.pool; ++px) {
                            const idx i = ((n * g.channels + c) * g.in_h + oy * g.pool + py) * g.in_w + ox * g.pool + px;
                            if (best < 0 || at(x, i) > at(x, best)) best = i;
                        }
                    const auto o = static_cast<std::size_t>(((n * g.channels + c) * g.out_h + oy) * g.out_w + ox);
                    y[o] = at(x, best);
                    argmax[o] = static_cast<int>(best);
                }
}

template <class T>
void maxpool_backward(const PoolGeom& g, std::span<const T> dy, std::span<const int> argmax, std::span<T> dx) {
    (void)g;
    for (auto& v : dx) v = 0;
    for (std::size_t o = 0; o < dy.size(); ++o) dx[static_cast<std::size_t>(argmax[o])] += dy[o];
}

template <class T>
void activation_forward(ActivationFn fn, T alpha, std::span<const T> x, std::span<T> y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T v = x[i];
        switch (fn) {
        case ActivationFn::linear: y[i] = v; break;
        case ActivationFn::relu: y[i] = v > 0 ? v : T{0}; break;
        case ActivationFn::leaky_relu: y[i] = v > 0 ? v : alpha * v; break;
        }
    }
}

template <class T>
void activation_backward(ActivationFn fn, T alpha, std::span<const T> x, std::span<const T> dy, std::span<T> dx) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        T slope = 1;
        if (fn == ActivationFn::relu && !(x[i] > 0)) slope = 0;
        if (fn == ActivationFn::leaky_relu && !(x[i] > 0)) slope = alpha;
        dx[i] = slope * dy[i];
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

} // namespace chromnet::nn::serial
