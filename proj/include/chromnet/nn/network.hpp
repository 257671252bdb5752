#pragma once

#include <span>
#include <vector>

#include "chromnet/nn/kernels.hpp"
#include "chromnet/nn/model_spec.hpp"
#include "chromnet/nn/tensor.hpp"
#include "chromnet/rng.hpp"

namespace chromnet::nn {

/// Executable model: a validated ModelSpec plus its parameters and the
/// per-node buffers of the last batch.
///
/// Parameters are ordered by node, weights before bias. Dense weights are
/// (units, in_features); conv weights are (filters, in_channels, kh, kw).
template <class T>
class Network {
public:
    explicit Network(ModelSpec spec);

    const ModelSpec& spec() const noexcept { return spec_; }
    const std::vector<Shape>& shapes() const noexcept { return shapes_; }
    std::size_t input_size() const noexcept { return shapes_.front().size(); }

    std::vector<Tensor<T>>& parameters() noexcept { return params_; }
    const std::vector<Tensor<T>>& parameters() const noexcept { return params_; }
    const std::vector<Tensor<T>>& gradients() const noexcept { return grads_; }

    /// Glorot-uniform weights, zero biases.
    void init_glorot(Rng& rng);

    /// Runs `batch` samples stored back to back in `input`; returns one
    /// output per sample. The span stays valid until the next forward.
    std::span<const T> forward(std::span<const T> input, int batch, ExecPolicy policy = ExecPolicy::parallel);

    /// Gradients of sum_b dout[b] * output[b] for the last forward batch.
    void backward(std::span<const T> dout, ExecPolicy policy = ExecPolicy::parallel);

    /// Outputs for `count` samples, run through forward in chunks of
    /// batch_size. Results do not depend on batch_size.
    std::vector<T> predict(std::span<const T> inputs, std::size_t count, int batch_size = 256,
                           ExecPolicy policy = ExecPolicy::parallel);

private:
    std::size_t act_size(int node) const {
        return static_cast<std::size_t>(batch_) * shapes_[static_cast<std::size_t>(node)].size();
    }

    ModelSpec spec_;
    std::vector<Shape> shapes_;
    std::vector<int> param_slot_; ///< per node: index of its weight tensor, or -1
    std::vector<int> consumers_;
    std::vector<Tensor<T>> params_;
    std::vector<Tensor<T>> grads_;
    std::vector<std::vector<T>> act_;
    std::vector<std::vector<T>> delta_;
    std::vector<std::vector<int>> argmax_;
    std::vector<T> scratch_;
    int batch_ = 0;
};

/// Mean absolute error of a batch, writing d(loss)/d(output) into dout.
/// The subgradient at a zero residual is 0.
template <class T>
double mae_loss(std::span<const T> output, std::span<const T> target, std::span<T> dout);

extern template class Network<float>;
extern template class Network<double>;

} // namespace chromnet::nn
