#include "chromnet/nn/network.hpp"

#include <algorithm>
#include <cmath>

namespace chromnet::nn {

template <class T>
Network<T>::Network(ModelSpec spec) : spec_(std::move(spec)), shapes_(shape_plan(spec_)) {
    const std::size_t n = spec_.nodes.size();
    param_slot_.assign(n, -1);
    consumers_.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const auto& L = spec_.nodes[i];
        for (int in : L.inputs) ++consumers_[static_cast<std::size_t>(in)];
        const Shape& in = shapes_[static_cast<std::size_t>(L.inputs.front())];
        if (L.kind == LayerKind::dense) {
            param_slot_[i] = static_cast<int>(params_.size());
            params_.emplace_back(std::vector<int>{L.units, static_cast<int>(in.size())});
            params_.emplace_back(std::vector<int>{L.units});
        } else if (L.kind == LayerKind::conv2d) {
            param_slot_[i] = static_cast<int>(params_.size());
            params_.emplace_back(std::vector<int>{L.filters, in.channels, L.kernel.h, L.kernel.w});
            params_.emplace_back(std::vector<int>{L.filters});
        }
    }
    grads_ = params_;
    act_.resize(n);
    delta_.resize(n);
    argmax_.resize(n);
}

template <class T>
void Network<T>::init_glorot(Rng& rng) {
    for (std::size_t i = 1; i < spec_.nodes.size(); ++i) {
        const int slot = param_slot_[i];
        if (slot < 0) continue;
        auto& w = params_[static_cast<std::size_t>(slot)];
        const auto& s = w.shape();
        double fan_in = 0;
        double fan_out = 0;
        if (s.size() == 2) {
            fan_in = s[1];
            fan_out = s[0];
        } else {
            const double receptive = static_cast<double>(s[2]) * s[3];
            fan_in = s[1] * receptive;
            fan_out = s[0] * receptive;
        }
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<T>(rng.uniform_real(-limit, limit));
        params_[static_cast<std::size_t>(slot) + 1].fill(T{0});
    }
}

namespace {

ConvGeom conv_geom(const LayerSpec& L, const Shape& in, const Shape& out, int batch) {
    return {batch, in.channels, in.height, in.width, L.filters, L.kernel.h, L.kernel.w,
            L.stride.h, L.stride.w, out.height, out.width};
}

PoolGeom pool_geom(const LayerSpec& L, const Shape& in, const Shape& out, int batch) {
    return {batch, in.channels, in.height, in.width, L.pool, out.height, out.width};
}

} // namespace

template <class T>
std::span<const T> Network<T>::forward(std::span<const T> input, int batch, ExecPolicy policy) {
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (input.size() != static_cast<std::size_t>(batch) * input_size()) {
        throw ShapeError(0, "input", "expected " + std::to_string(batch) + " x " + std::to_string(input_size()) +
                                         " values, got " + std::to_string(input.size()));
    }
    const bool par = policy == ExecPolicy::parallel;
    batch_ = batch;
    act_[0].assign(input.begin(), input.end());
    for (std::size_t i = 1; i < spec_.nodes.size(); ++i) {
        const auto& L = spec_.nodes[i];
        const auto in_node = static_cast<std::size_t>(L.inputs.front());
        const Shape& sin = shapes_[in_node];
        const Shape& sout = shapes_[i];
        auto& out = act_[i];
        out.resize(act_size(static_cast<int>(i)));
        const std::span<const T> x = act_[in_node];
        switch (L.kind) {
        case LayerKind::input: break;
        case LayerKind::dense: {
            const auto slot = static_cast<std::size_t>(param_slot_[i]);
            const DenseGeom g{batch, static_cast<int>(sin.size()), L.units};
            if (par) parallel::dense_forward<T>(g, x, params_[slot].span(), params_[slot + 1].span(), out);
            else serial::dense_forward<T>(g, x, params_[slot].span(), params_[slot + 1].span(), out);
            break;
        }
        case LayerKind::conv2d: {
            const auto slot = static_cast<std::size_t>(param_slot_[i]);
            const ConvGeom g = conv_geom(L, sin, sout, batch);
            if (par) parallel::conv2d_forward<T>(g, x, params_[slot].span(), params_[slot + 1].span(), out);
            else serial::conv2d_forward<T>(g, x, params_[slot].span(), params_[slot + 1].span(), out);
            break;
        }
        case LayerKind::maxpool2d: {
            const PoolGeom g = pool_geom(L, sin, sout, batch);
            argmax_[i].resize(out.size());
            if (par) parallel::maxpool_forward<T>(g, x, out, argmax_[i]);
            else serial::maxpool_forward<T>(g, x, out, argmax_[i]);
            break;
        }
        case LayerKind::flatten: std::copy(x.begin(), x.end(), out.begin()); break;
        case LayerKind::concat: {
            const std::size_t width = sout.size();
            std::size_t offset = 0;
            for (int src : L.inputs) {
                const auto& part = act_[static_cast<std::size_t>(src)];
                const std::size_t w = shapes_[static_cast<std::size_t>(src)].size();
                for (int b = 0; b < batch; ++b)
                    std::copy_n(part.begin() + static_cast<std::ptrdiff_t>(b * w), w,
                                out.begin() + static_cast<std::ptrdiff_t>(b * width + offset));
                offset += w;
            }
            break;
        }
        case LayerKind::activation: {
            const T alpha = static_cast<T>(L.alpha);
            if (par) parallel::activation_forward<T>(L.fn, alpha, x, out);
            else serial::activation_forward<T>(L.fn, alpha, x, out);
            break;
        }
        }
    }
    return act_.back();
}

template <class T>
void Network<T>::backward(std::span<const T> dout, ExecPolicy policy) {
    if (batch_ == 0) throw std::logic_error("backward called before forward");
    if (dout.size() != static_cast<std::size_t>(batch_)) throw std::invalid_argument("one output gradient per sample");
    const bool par = policy == ExecPolicy::parallel;
    const std::size_t n = spec_.nodes.size();
    for (std::size_t i = 1; i < n; ++i) {
        delta_[i].assign(act_size(static_cast<int>(i)), T{0});
    }
    std::copy(dout.begin(), dout.end(), delta_.back().begin());

    // Where a node's input gradient lands: straight into the producer's delta
    // when it is the only consumer, otherwise into scratch and then added.
    auto target_for = [&](int src) -> T* {
        if (src == 0) return nullptr;
        auto& d = delta_[static_cast<std::size_t>(src)];
        if (consumers_[static_cast<std::size_t>(src)] == 1) return d.data();
        scratch_.assign(d.size(), T{0});
        return scratch_.data();
    };
    auto commit = [&](int src, T* written) {
        if (!written || written != scratch_.data()) return;
        auto& d = delta_[static_cast<std::size_t>(src)];
        for (std::size_t k = 0; k < d.size(); ++k) d[k] += scratch_[k];
    };

    for (std::size_t i = n - 1; i >= 1; --i) {
        const auto& L = spec_.nodes[i];
        const int src = L.inputs.front();
        const auto in_node = static_cast<std::size_t>(src);
        const Shape& sin = shapes_[in_node];
        const Shape& sout = shapes_[i];
        const std::span<const T> dy = delta_[i];
        const std::span<const T> x = act_[in_node];
        switch (L.kind) {
        case LayerKind::input: break;
        case LayerKind::dense: {
            const auto slot = static_cast<std::size_t>(param_slot_[i]);
            const DenseGeom g{batch_, static_cast<int>(sin.size()), L.units};
            T* dx = target_for(src);
            if (par) parallel::dense_backward<T>(g, x, params_[slot].span(), dy, grads_[slot].span(), grads_[slot + 1].span(), dx);
            else serial::dense_backward<T>(g, x, params_[slot].span(), dy, grads_[slot].span(), grads_[slot + 1].span(), dx);
            commit(src, dx);
            break;
        }
        case LayerKind::conv2d: {
            const auto slot = static_cast<std::size_t>(param_slot_[i]);
            const ConvGeom g = conv_geom(L, sin, sout, batch_);
            T* dx = target_for(src);
            if (par) parallel::conv2d_backward<T>(g, x, params_[slot].span(), dy, grads_[slot].span(), grads_[slot + 1].span(), dx);
            else serial::conv2d_backward<T>(g, x, params_[slot].span(), dy, grads_[slot].span(), grads_[slot + 1].span(), dx);
            commit(src, dx);
            break;
        }
        case LayerKind::maxpool2d: {
            T* dx = target_for(src);
            if (!dx) break;
            const PoolGeom g = pool_geom(L, sin, sout, batch_);
            const std::span<T> dxs(dx, act_size(src));
            if (par) parallel::maxpool_backward<T>(g, dy, argmax_[i], dxs);
            else serial::maxpool_backward<T>(g, dy, argmax_[i], dxs);
            commit(src, dx);
            break;
        }
        case LayerKind::flatten: {
            T* dx = target_for(src);
            if (!dx) break;
            std::copy(dy.begin(), dy.end(), dx);
            commit(src, dx);
            break;
        }
        case LayerKind::concat: {
            const std::size_t width = sout.size();
            std::size_t offset = 0;
            for (int part : L.inputs) {
                const std::size_t w = shapes_[static_cast<std::size_t>(part)].size();
                T* dx = target_for(part);
                if (dx) {
                    for (int b = 0; b < batch_; ++b)
                        std::copy_n(dy.begin() + static_cast<std::ptrdiff_t>(b * width + offset), w, dx + b * w);
                    commit(part, dx);
                }
                offset += w;
            }
            break;
        }
        case LayerKind::activation: {
            T* dx = target_for(src);
            if (!dx) break;
            const std::span<T> dxs(dx, act_size(src));
            const T alpha = static_cast<T>(L.alpha);
            if (par) parallel::activation_backward<T>(L.fn, alpha, x, dy, dxs);
            else serial::activation_backward<T>(L.fn, alpha, x, dy, dxs);
            commit(src, dx);
            break;
        }
        }
    }
}

template <class T>
std::vector<T> Network<T>::predict(std::span<const T> inputs, std::size_t count, int batch_size, ExecPolicy policy) {
    if (inputs.size() != count * input_size()) {
        throw ShapeError(0, "input", "expected " + std::to_string(count) + " x " + std::to_string(input_size()) +
                                         " values, got " + std::to_string(inputs.size()));
    }
    std::vector<T> out;
    out.reserve(count);
    const auto step = static_cast<std::size_t>(std::max(batch_size, 1));
    for (std::size_t start = 0; start < count; start += step) {
        const std::size_t b = std::min(step, count - start);
        const auto y = forward(inputs.subspan(start * input_size(), b * input_size()), static_cast<int>(b), policy);
        out.insert(out.end(), y.begin(), y.end());
    }
    return out;
}

template <class T>
double mae_loss(std::span<const T> output, std::span<const T> target, std::span<T> dout) {
    if (output.size() != target.size() || dout.size() != output.size() || output.empty()) {
        throw std::invalid_argument("mae_loss: size mismatch");
    }
    const auto n = static_cast<double>(output.size());
    double sum = 0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double r = static_cast<double>(output[i]) - static_cast<double>(target[i]);
        sum += std::abs(r);
        dout[i] = static_cast<T>(r > 0 ? 1.0 / n : r < 0 ? -1.0 / n : 0.0);
    }
    return sum / n;
}

template class Network<float>;
template class Network<double>;
template double mae_loss<float>(std::span<const float>, std::span<const float>, std::span<float>);
template double mae_loss<double>(std::span<const double>, std::span<const double>, std::span<double>);

} // namespace chromnet::nn
