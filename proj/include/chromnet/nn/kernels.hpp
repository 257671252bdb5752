#pragma once

#include <span>

#include "chromnet/nn/model_spec.hpp"

// Layer kernels over batched, channels-first activations.
//
// Two implementations share these signatures:
//   chromnet::nn::parallel  OpenMP kernels used for training and inference.
//   chromnet::nn::serial    straightforward loops that follow the textbook
//                           formulas; kept as the reference for tests and the
//                           benchmark.
//
// Every parallel kernel assigns each output element (and each weight
// gradient) to exactly one thread and sums in a fixed order, so results do
// not depend on the thread count or on scheduling.
//
// Backward kernels overwrite their outputs. Weight and bias gradients are
// summed over the batch. A null dx skips the input gradient.

namespace chromnet::nn {

struct DenseGeom {
    int batch = 1;
    int in = 1;
    int out = 1;
};

struct ConvGeom {
    int batch = 1;
    int in_c = 1, in_h = 1, in_w = 1;
    int filters = 1;
    int kh = 1, kw = 1;
    int sh = 1, sw = 1;
    int out_h = 1, out_w = 1;
};

struct PoolGeom {
    int batch = 1;
    int channels = 1;
    int in_h = 1, in_w = 1;
    int pool = 1;
    int out_h = 1, out_w = 1;
};

namespace parallel {

template <class T>
void dense_forward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y);
template <class T>
void dense_backward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                    std::span<T> dw, std::span<T> db, T* dx);
template <class T>
void conv2d_forward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                    std::span<T> y);
template <class T>
void conv2d_backward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                     std::span<T> dw, std::span<T> db, T* dx);
/// argmax holds the flat input offset of each window maximum (first on ties).
template <class T>
void maxpool_forward(const PoolGeom& g, std::span<const T> x, std::span<T> y, std::span<int> argmax);
template <class T>
void maxpool_backward(const PoolGeom& g, std::span<const T> dy, std::span<const int> argmax, std::span<T> dx);
template <class T>
void activation_forward(ActivationFn fn, T alpha, std::span<const T> x, std::span<T> y);
/// Slope taken at the pre-activation x; x == 0 uses the negative-side slope.
template <class T>
void activation_backward(ActivationFn fn, T alpha, std::span<const T> x, std::span<const T> dy, std::span<T> dx);

} // namespace parallel

namespace serial {

template <class T>
void dense_forward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                   std::span<T> y);
template <class T>
void dense_backward(const DenseGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                    std::span<T> dw, std::span<T> db, T* dx);
template <class T>
void conv2d_forward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> b,
                    std::span<T> y);
template <class T>
void conv2d_backward(const ConvGeom& g, std::span<const T> x, std::span<const T> w, std::span<const T> dy,
                     std::span<T> dw, std::span<T> db, T* dx);
/// argmax holds the flat input offset of each window maximum (first on ties).
template <class T>
void maxpool_forward(const PoolGeom& g, std::span<const T> x, std::span<T> y, std::span<int> argmax);
template <class T>
void maxpool_backward(const PoolGeom& g, std::span<const T> dy, std::span<const int> argmax, std::span<T> dx);
template <class T>
void activation_forward(ActivationFn fn, T alpha, std::span<const T> x, std::span<T> y);
/// Slope taken at the pre-activation x; x == 0 uses the negative-side slope.
template <class T>
void activation_backward(ActivationFn fn, T alpha, std::span<const T> x, std::span<const T> dy, std::span<T> dx);

} // namespace serial

enum class ExecPolicy { parallel, serial };

} // namespace chromnet::nn
