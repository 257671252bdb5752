#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chromnet/dataset.hpp"
#include "chromnet/nn/network.hpp"

namespace chromnet::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

/// Adam with bias-corrected moments:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <class T>
class Adam {
public:
    Adam(AdamConfig cfg, const std::vector<Tensor<T>>& params);
    void step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads);
    long steps() const noexcept { return t_; }

private:
    AdamConfig cfg_;
    std::vector<Tensor<T>> m_;
    std::vector<Tensor<T>> v_;
    long t_ = 0;
};

/// Minimum-tracking early stopping. An epoch improves only if its value is
/// strictly below the best so far.
class EarlyStopping {
public:
    explicit EarlyStopping(int patience);

    /// Records an epoch's validation value; true when it is a new best.
    bool observe(int epoch, double value);
    bool should_stop() const noexcept { return stale_ >= patience_; }
    int best_epoch() const noexcept { return best_epoch_; }
    double best_value() const noexcept { return best_; }

private:
    int patience_;
    int stale_ = 0;
    int best_epoch_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

/// Inputs as adjacency matrices, one row of order*order values per graph.
template <class T>
struct Samples {
    std::size_t feature_count = 0;
    std::vector<T> inputs;
    std::vector<T> targets;

    std::size_t size() const noexcept { return targets.size(); }
};

template <class T>
Samples<T> make_samples(const data::Dataset& ds, data::Target target);

template <class T>
std::vector<T> graph_inputs(const std::vector<Graph>& graphs);

struct TrainConfig {
    AdamConfig adam{};
    int batch_size = 128;
    int max_epochs = 100;
    int patience = 10;
    std::uint64_t seed = 0;
    ExecPolicy policy = ExecPolicy::parallel;
    /// Called after every epoch; used for progress output.
    std::function<void(int epoch, double train_mae, double valid_mae)> on_epoch;
};

struct EpochRecord {
    int epoch = 0;
    double train_mae = 0; ///< mean minibatch loss over the epoch
    double valid_mae = 0;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    int best_epoch = 0;
    double best_valid_mae = 0;
};

class NumericError : public std::runtime_error {
public:
    NumericError(int epoch, int batch)
        : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch)),
          epoch_(epoch), batch_(batch) {}
    int epoch() const noexcept { return epoch_; }
    int batch() const noexcept { return batch_; }

private:
    int epoch_;
    int batch_;
};

/// Minibatch Adam on MAE from Glorot-initialised weights (seeded by
/// cfg.seed). Validation MAE is measured after every epoch; training stops
/// once it has not improved for cfg.patience epochs, and the weights of the
/// best validation epoch are restored.
template <class T>
TrainResult train(Network<T>& net, const Samples<T>& train_set, const Samples<T>& valid_set, const TrainConfig& cfg);

template <class T>
double evaluate_mae(Network<T>& net, const Samples<T>& set, int batch_size = 256,
                    ExecPolicy policy = ExecPolicy::parallel);

} // namespace chromnet::nn
