#include "chromnet/nn/trainer.hpp"

#include <cmath>
#include <numeric>

namespace chromnet::nn {

template <class T>
Adam<T>::Adam(AdamConfig cfg, const std::vector<Tensor<T>>& params) : cfg_(cfg), m_(params), v_(params) {
    if (!(cfg.learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
    for (auto& t : m_) t.fill(T{0});
    for (auto& t : v_) t.fill(T{0});
}

template <class T>
void Adam<T>::step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& w = params[p];
        const auto& g = grads[p];
        auto& m = m_[p];
        auto& v = v_[p];
        for (std::size_t k = 0; k < w.size(); ++k) {
            m[k] = b1 * m[k] + (T{1} - b1) * g[k];
            v[k] = b2 * v[k] + (T{1} - b2) * g[k] * g[k];
            const double mhat = static_cast<double>(m[k]) / c1;
            const double vhat = static_cast<double>(v[k]) / c2;
            w[k] -= static_cast<T>(cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon));
        }
    }
}

EarlyStopping::EarlyStopping(int patience) : patience_(patience) {
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

bool EarlyStopping::observe(int epoch, double value) {
    if (value < best_) {
        best_ = value;
        best_epoch_ = epoch;
        stale_ = 0;
        return true;
    }
    ++stale_;
    return false;
}

template <class T>
Samples<T> make_samples(const data::Dataset& ds, data::Target target) {
    Samples<T> s;
    s.feature_count = static_cast<std::size_t>(ds.order) * static_cast<std::size_t>(ds.order);
    s.inputs.reserve(ds.size() * s.feature_count);
    s.targets.reserve(ds.size());
    for (const auto& r : ds.records) {
        if (!r.labeled()) throw std::invalid_argument("dataset contains unlabelled records");
        for (auto a : r.graph.adjacency()) s.inputs.push_back(static_cast<T>(a));
        s.targets.push_back(static_cast<T>(r.label(target)));
    }
    return s;
}

template <class T>
std::vector<T> graph_inputs(const std::vector<Graph>& graphs) {
    std::vector<T> out;
    for (const auto& g : graphs)
        for (auto a : g.adjacency()) out.push_back(static_cast<T>(a));
    return out;
}

template <class T>
double evaluate_mae(Network<T>& net, const Samples<T>& set, int batch_size, ExecPolicy policy) {
    if (set.size() == 0) throw std::invalid_argument("cannot evaluate on an empty set");
    const auto pred = net.predict(set.inputs, set.size(), batch_size, policy);
    double sum = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        sum += std::abs(static_cast<double>(pred[i]) - static_cast<double>(set.targets[i]));
    return sum / static_cast<double>(pred.size());
}

template <class T>
TrainResult train(Network<T>& net, const Samples<T>& train_set, const Samples<T>& valid_set, const TrainConfig& cfg) {
    if (train_set.size() == 0 || valid_set.size() == 0) throw std::invalid_argument("training needs non-empty train and valid sets");
    if (train_set.feature_count != net.input_size() || valid_set.feature_count != net.input_size()) {
        throw ShapeError(0, "input", "sample width " + std::to_string(train_set.feature_count) +
                                         " does not match model input " + std::to_string(net.input_size()));
    }
    if (cfg.batch_size < 1 || cfg.max_epochs < 1) throw std::invalid_argument("batch size and epochs must be >= 1");

    Rng init_rng(mix_seed({cfg.seed, 0x1}));
    net.init_glorot(init_rng);
    Rng order_rng(mix_seed({cfg.seed, 0x2}));

    Adam<T> adam(cfg.adam, net.parameters());
    EarlyStopping stopper(cfg.patience);
    std::vector<Tensor<T>> best = net.parameters();

    const std::size_t n = train_set.size();
    const std::size_t width = train_set.feature_count;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<T> batch_in;
    std::vector<T> batch_target;
    std::vector<T> dout;

    TrainResult result;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        order_rng.shuffle(std::span(order));
        double loss_sum = 0;
        int batch_no = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size), ++batch_no) {
            const std::size_t b = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
            batch_in.resize(b * width);
            batch_target.resize(b);
            dout.resize(b);
            for (std::size_t k = 0; k < b; ++k) {
                const std::size_t src = order[start + k];
                std::copy_n(train_set.inputs.begin() + static_cast<std::ptrdiff_t>(src * width), width,
                            batch_in.begin() + static_cast<std::ptrdiff_t>(k * width));
                batch_target[k] = train_set.targets[src];
            }
            const auto out = net.forward(batch_in, static_cast<int>(b), cfg.policy);
            const double loss = mae_loss<T>(out, batch_target, dout);
            if (!std::isfinite(loss)) throw NumericError(epoch, batch_no);
            loss_sum += loss * static_cast<double>(b);
            net.backward(dout, cfg.policy);
            adam.step(net.parameters(), net.gradients());
        }
        const double train_mae = loss_sum / static_cast<double>(n);
        const double valid_mae = evaluate_mae(net, valid_set, 256, cfg.policy);
        if (!std::isfinite(valid_mae)) throw NumericError(epoch, batch_no);
        result.history.push_back({epoch, train_mae, valid_mae});
        if (cfg.on_epoch) cfg.on_epoch(epoch, train_mae, valid_mae);
        if (stopper.observe(epoch, valid_mae)) best = net.parameters();
        if (stopper.should_stop()) break;
    }
    net.parameters() = best;
    result.best_epoch = stopper.best_epoch();
    result.best_valid_mae = stopper.best_value();
    return result;
}

template class Adam<float>;
template class Adam<double>;
template Samples<float> make_samples<float>(const data::Dataset&, data::Target);
template Samples<double> make_samples<double>(const data::Dataset&, data::Target);
template std::vector<float> graph_inputs<float>(const std::vector<Graph>&);
template std::vector<double> graph_inputs<double>(const std::vector<Graph>&);
template double evaluate_mae<float>(Network<float>&, const Samples<float>&, int, ExecPolicy);
template double evaluate_mae<double>(Network<double>&, const Samples<double>&, int, ExecPolicy);
template TrainResult train<float>(Network<float>&, const Samples<float>&, const Samples<float>&, const TrainConfig&);
template TrainResult train<double>(Network<double>&, const Samples<double>&, const Samples<double>&,
                                   const TrainConfig&);

} // namespace chromnet::nn
