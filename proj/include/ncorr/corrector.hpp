#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ncorr/errors.hpp"
#include "ncorr/integrator.hpp"
#include "ncorr/rng.hpp"
#include "ncorr/trajectory.hpp"

namespace ncorr {

enum class ChannelKind { Position, Velocity, Acceleration, Elevation };

inline std::string to_string(ChannelKind k) {
    switch (k) {
    case ChannelKind::Position: return "position";
    case ChannelKind::Velocity: return "velocity";
    case ChannelKind::Acceleration: return "acceleration";
    case ChannelKind::Elevation: return "elevation";
    }
    return "?";
}

inline ChannelKind channel_kind_from_string(const std::string& s) {
    if (s == "position") return ChannelKind::Position;
    if (s == "velocity") return ChannelKind::Velocity;
    if (s == "acceleration") return ChannelKind::Acceleration;
    if (s == "elevation") return ChannelKind::Elevation;
    throw DataError("unknown channel kind '" + s + "'");
}

/// One input feature channel: a state quantity of one DOF, or the wave
/// elevation (dof ignored).
struct Channel {
    ChannelKind kind = ChannelKind::Position;
    int dof = 0;

    bool operator==(const Channel&) const = default;
};

/// Input stencil: the k most recent samples of each channel, flattened
/// channel-major, predict the force correction one step ahead.
struct StencilSpec {
    int k = 5;
    std::vector<Channel> channels;
    double dt = 0.1;

    int n_channels() const { return static_cast<int>(channels.size()); }
    int input_dim() const { return k * n_channels(); }

    void validate() const {
        if (k < 1) throw ConfigError("stencil: k must be >= 1");
        if (channels.empty()) throw ConfigError("stencil: channel list empty");
        for (std::size_t i = 0; i < channels.size(); ++i)
            for (std::size_t j = i + 1; j < channels.size(); ++j)
                if (channels[i] == channels[j])
                    throw ConfigError("stencil: duplicate channel");
    }
};

/// Stencil for a 1-DOF trajectory: (z, z', z'', eta).
inline StencilSpec single_dof_stencil(int k, double dt) {
    return StencilSpec{k,
                       {{ChannelKind::Position, 0},
                        {ChannelKind::Velocity, 0},
                        {ChannelKind::Acceleration, 0},
                        {ChannelKind::Elevation, 0}},
                       dt};
}

inline double channel_sample(const StateTrajectory& traj, const Channel& ch,
                             Eigen::Index n) {
    switch (ch.kind) {
    case ChannelKind::Position: return traj.pos(n, ch.dof);
    case ChannelKind::Velocity: return traj.vel(n, ch.dof);
    case ChannelKind::Acceleration: return traj.acc(n, ch.dof);
    case ChannelKind::Elevation: return traj.eta(n);
    }
    return 0.0;
}

/// Flattened feature window ending at sample n: for each channel, samples
/// n-k+1 .. n in time order.
inline Eigen::VectorXd extract_window(const StateTrajectory& traj,
                                      const StencilSpec& spec, Eigen::Index n) {
    if (n - spec.k + 1 < 0 || n >= traj.n_samples())
        throw DataError("extract_window: window out of range");
    Eigen::VectorXd w(spec.input_dim());
    Eigen::Index c = 0;
    for (const auto& ch : spec.channels)
        for (int j = spec.k - 1; j >= 0; --j)
            w(c++) = channel_sample(traj, ch, n - j);
    return w;
}

/// Training pairs: stencil windows against next-step force corrections.
struct Dataset {
    Eigen::MatrixXd inputs;  // n_rows x input_dim
    Eigen::MatrixXd targets; // n_rows x n_out
    StencilSpec stencil;

    Eigen::Index n_rows() const { return inputs.rows(); }
};

/// Pair the k most recent samples of each channel ending at sample n with
/// the target delta_{n+1}. Samples before the trajectory's transient cutoff
/// are excluded. Targets run from delta_{k+1} within the usable window.
template <typename Derived>
Dataset build_dataset(const StateTrajectory& traj,
                      const Eigen::MatrixBase<Derived>& delta_expr,
                      const StencilSpec& spec) {
    const Eigen::MatrixXd delta = delta_expr;
    spec.validate();
    if (delta.rows() != traj.n_samples())
        throw DataError("build_dataset: delta/trajectory length mismatch");
    const Eigen::Index n0 = traj.first_retained();
    const Eigen::Index first = n0 + spec.k; // first window end index
    const Eigen::Index last = traj.n_samples() - 2;
    if (last < first)
        throw DataError("build_dataset: trajectory shorter than k + 2 usable samples");
    const Eigen::Index rows = last - first + 1;
    Dataset ds;
    ds.stencil = spec;
    ds.inputs.resize(rows, spec.input_dim());
    ds.targets.resize(rows, delta.cols());
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index n = first + r;
        ds.inputs.row(r) = extract_window(traj, spec, n).transpose();
        ds.targets.row(r) = delta.row(n + 1);
    }
    return ds;
}

/// Per-channel (or per-target) z-score statistics. Constant channels get a
/// unit deviation so the transform stays invertible.
struct Normalization {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
};

struct TrainConfig {
    int epochs = 2000;
    int batch_size = 32;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    double validation_fraction = 0.1;
    int patience = 100; // early-stop after this many epochs without improvement
    double weight_decay = 0.0; // decoupled L2 on weights (not biases)
    // optional plateau schedule (off at 1.0): scale the step size by lr_decay
    // after lr_patience stale epochs
    double lr_decay = 1.0;
    int lr_patience = 25;
    double lr_min = 1e-5;

    void validate() const {
        if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
        if (learning_rate <= 0.0) throw ConfigError("train: learning_rate must be > 0");
        if (validation_fraction < 0.0 || validation_fraction >= 1.0)
            throw ConfigError("train: validation_fraction must be in [0, 1)");
        if (lr_decay <= 0.0 || lr_decay > 1.0)
            throw ConfigError("train: lr_decay must be in (0, 1]");
    }
};

struct TrainInfo {
    std::vector<double> epoch_train_mse; // normalized-space MSE per epoch
    std::vector<double> epoch_val_mse;
    int best_epoch = 0;
    double final_val_mse = 0.0;
    TrainConfig config;
};

/// Feed-forward ReLU network predicting the next-step force correction from
/// a normalized stencil window. Immutable once trained; inference is pure.
struct CorrectorNet {
    StencilSpec stencil;
    std::vector<int> layer_sizes;          // input, hidden..., output
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;
    Normalization feature_norm; // per channel
    Normalization target_norm;  // per output
    TrainInfo info;

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
};

namespace detail {

inline Eigen::VectorXd normalize_window(const CorrectorNet& net,
                                        const Eigen::VectorXd& window) {
    Eigen::VectorXd x(window.size());
    const int k = net.stencil.k;
    for (int c = 0; c < net.stencil.n_channels(); ++c)
        for (int j = 0; j < k; ++j)
            x(c * k + j) = (window(c * k + j) - net.feature_norm.mean(c)) /
                           net.feature_norm.std(c);
    return x;
}

/// Forward pass through all layers; activations[0] is the input.
inline Eigen::MatrixXd forward(const std::vector<Eigen::MatrixXd>& weights,
                               const std::vector<Eigen::VectorXd>& biases,
                               const Eigen::MatrixXd& input_cols,
                               std::vector<Eigen::MatrixXd>* activations = nullptr) {
    Eigen::MatrixXd a = input_cols;
    if (activations) activations->push_back(a);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Eigen::MatrixXd z = (weights[l] * a).colwise() + biases[l];
        if (l + 1 < weights.size()) z = z.cwiseMax(0.0); // ReLU on hidden layers
        a = std::move(z);
        if (activations) activations->push_back(a);
    }
    return a;
}

/// Mean-squared-error gradient over a column batch. Returns the loss and
/// fills per-layer weight/bias gradients.
inline double mse_gradients(const std::vector<Eigen::MatrixXd>& weights,
                            const std::vector<Eigen::VectorXd>& biases,
                            const Eigen::MatrixXd& x_cols,
                            const Eigen::MatrixXd& t_cols,
                            std::vector<Eigen::MatrixXd>& grad_w,
                            std::vector<Eigen::VectorXd>& grad_b) {
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(weights.size() + 1);
    const Eigen::MatrixXd out = forward(weights, biases, x_cols, &acts);
    const double denom = static_cast<double>(out.size());
    const Eigen::MatrixXd diff = out - t_cols;
    const double loss = diff.squaredNorm() / denom;

    Eigen::MatrixXd dz = 2.0 * diff / denom;
    for (long l = static_cast<long>(weights.size()) - 1; l >= 0; --l) {
        grad_w[l] = dz * acts[l].transpose();
        grad_b[l] = dz.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd da = weights[l].transpose() * dz;
            // ReLU mask from the stored hidden activation
            dz = da.cwiseProduct(
                (acts[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return loss;
}

inline double mse(const std::vector<Eigen::MatrixXd>& weights,
                  const std::vector<Eigen::VectorXd>& biases,
                  const Eigen::MatrixXd& x_cols, const Eigen::MatrixXd& t_cols) {
    const Eigen::MatrixXd out = forward(weights, biases, x_cols);
    return (out - t_cols).squaredNorm() / static_cast<double>(out.size());
}

} // namespace detail

/// Normalized forward pass: normalize, layers, denormalize.
inline Eigen::VectorXd infer(const CorrectorNet& net, const Eigen::VectorXd& window) {
    if (window.size() != net.input_dim())
        throw ConfigError("infer: window dimension mismatch (got " +
                          std::to_string(window.size()) + ", expected " +
                          std::to_string(net.input_dim()) + ")");
    const Eigen::VectorXd x = detail::normalize_window(net, window);
    const Eigen::VectorXd y = detail::forward(net.weights, net.biases, x);
    return (y.array() * net.target_norm.std.array() + net.target_norm.mean.array())
        .matrix();
}

/// Train a ReLU MLP on z-score-normalized data with Adam and early stopping
/// on a validation split. Deterministic for a fixed config seed.
inline CorrectorNet train(const Dataset& dataset, const std::vector<int>& hidden,
                          const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.n_rows() < 1) throw TrainingError("train: empty dataset");
    for (const int h : hidden)
        if (h < 1) throw TrainingError("train: hidden sizes must be >= 1");

    const int n_ch = dataset.stencil.n_channels();
    const int k = dataset.stencil.k;
    const auto n_out = dataset.targets.cols();

    CorrectorNet net;
    net.stencil = dataset.stencil;
    net.layer_sizes.push_back(dataset.stencil.input_dim());
    for (const int h : hidden) net.layer_sizes.push_back(h);
    net.layer_sizes.push_back(static_cast<int>(n_out));

    // Per-channel statistics pooled over the channel's k lags.
    net.feature_norm.mean.resize(n_ch);
    net.feature_norm.std.resize(n_ch);
    for (int c = 0; c < n_ch; ++c) {
        const auto block = dataset.inputs.middleCols(c * k, k);
        const double mean = block.mean();
        const double sd = std::sqrt((block.array() - mean).square().mean());
        net.feature_norm.mean(c) = mean;
        net.feature_norm.std(c) = sd > 1e-12 * (1.0 + std::abs(mean)) ? sd : 1.0;
    }
    net.target_norm.mean.resize(n_out);
    net.target_norm.std.resize(n_out);
    for (Eigen::Index o = 0; o < n_out; ++o) {
        const double mean = dataset.targets.col(o).mean();
        const double sd =
            std::sqrt((dataset.targets.col(o).array() - mean).square().mean());
        net.target_norm.mean(o) = mean;
        net.target_norm.std(o) = sd > 1e-12 * (1.0 + std::abs(mean)) ? sd : 1.0;
    }

    // Normalized copies, one column per row of the dataset.
    const auto n_rows = dataset.n_rows();
    Eigen::MatrixXd xn(dataset.stencil.input_dim(), n_rows);
    for (Eigen::Index r = 0; r < n_rows; ++r)
        for (int c = 0; c < n_ch; ++c)
            for (int j = 0; j < k; ++j)
                xn(c * k + j, r) = (dataset.inputs(r, c * k + j) -
                                    net.feature_norm.mean(c)) /
                                   net.feature_norm.std(c);
    Eigen::MatrixXd tn(n_out, n_rows);
    for (Eigen::Index r = 0; r < n_rows; ++r)
        for (Eigen::Index o = 0; o < n_out; ++o)
            tn(o, r) = (dataset.targets(r, o) - net.target_norm.mean(o)) /
                       net.target_norm.std(o);

    Rng rng(cfg.seed);

    // He-style uniform init scaled by fan-in; biases zero.
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        const int fan_in = net.layer_sizes[l];
        const int fan_out = net.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / fan_in);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                w(i, j) = rng.uniform(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }

    // Train/validation split.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_rows));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    rng.shuffle(order);
    const auto n_val = static_cast<Eigen::Index>(
        std::floor(cfg.validation_fraction * static_cast<double>(n_rows)));
    const Eigen::Index n_train = n_rows - n_val;
    if (n_train < 1) throw TrainingError("train: no training rows after split");

    auto gather = [&](Eigen::Index begin, Eigen::Index count,
                      const Eigen::MatrixXd& src) {
        Eigen::MatrixXd out(src.rows(), count);
        for (Eigen::Index i = 0; i < count; ++i)
            out.col(i) = src.col(order[static_cast<std::size_t>(begin + i)]);
        return out;
    };
    const Eigen::MatrixXd x_train = gather(0, n_train, xn);
    const Eigen::MatrixXd t_train = gather(0, n_train, tn);
    const Eigen::MatrixXd x_val = gather(n_train, n_val, xn);
    const Eigen::MatrixXd t_val = gather(n_train, n_val, tn);

    // Adam state.
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<Eigen::MatrixXd> m_w, v_w, grad_w(net.weights.size());
    std::vector<Eigen::VectorXd> m_b, v_b, grad_b(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        m_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        v_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        m_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        v_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }

    std::vector<Eigen::Index> batch_order(static_cast<std::size_t>(n_train));
    std::iota(batch_order.begin(), batch_order.end(), Eigen::Index{0});

    std::vector<Eigen::MatrixXd> best_w = net.weights;
    std::vector<Eigen::VectorXd> best_b = net.biases;
    double best_score = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int since_best = 0;
    int since_lr_drop = 0;
    double lr = cfg.learning_rate;
    long adam_step = 0;

    net.info.config = cfg;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(batch_order);
        double epoch_loss = 0.0;
        Eigen::Index covered = 0;
        for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
            const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n_train - start);
            Eigen::MatrixXd xb(x_train.rows(), bs), tb(t_train.rows(), bs);
            for (Eigen::Index i = 0; i < bs; ++i) {
                xb.col(i) = x_train.col(batch_order[static_cast<std::size_t>(start + i)]);
                tb.col(i) = t_train.col(batch_order[static_cast<std::size_t>(start + i)]);
            }
            const double loss =
                detail::mse_gradients(net.weights, net.biases, xb, tb, grad_w, grad_b);
            if (!std::isfinite(loss))
                throw TrainingError("train: non-finite loss at epoch " +
                                        std::to_string(epoch), epoch);
            epoch_loss += loss * static_cast<double>(bs);
            covered += bs;

            ++adam_step;
            const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(adam_step));
            const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(adam_step));
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                m_w[l] = beta1 * m_w[l] + (1.0 - beta1) * grad_w[l];
                v_w[l] = beta2 * v_w[l] +
                         (1.0 - beta2) * grad_w[l].cwiseProduct(grad_w[l]);
                net.weights[l].array() -= lr * (m_w[l].array() / corr1) /
                                          ((v_w[l].array() / corr2).sqrt() + eps);
                if (cfg.weight_decay > 0.0)
                    net.weights[l] *= 1.0 - lr * cfg.weight_decay;
                m_b[l] = beta1 * m_b[l] + (1.0 - beta1) * grad_b[l];
                v_b[l] = beta2 * v_b[l] +
                         (1.0 - beta2) * grad_b[l].cwiseProduct(grad_b[l]);
                net.biases[l].array() -= lr * (m_b[l].array() / corr1) /
                                         ((v_b[l].array() / corr2).sqrt() + eps);
            }
        }
        epoch_loss /= static_cast<double>(covered);
        net.info.epoch_train_mse.push_back(epoch_loss);

        const double score = n_val > 0
                                 ? detail::mse(net.weights, net.biases, x_val, t_val)
                                 : epoch_loss;
        if (n_val > 0) net.info.epoch_val_mse.push_back(score);

        if (score < best_score) {
            best_score = score;
            best_epoch = epoch;
            best_w = net.weights;
            best_b = net.biases;
            since_best = 0;
            since_lr_drop = 0;
        } else {
            if (++since_best > cfg.patience) break;
            if (cfg.lr_decay < 1.0 && ++since_lr_drop > cfg.lr_patience &&
                lr > cfg.lr_min) {
                lr = std::max(cfg.lr_min, lr * cfg.lr_decay);
                since_lr_drop = 0;
            }
        }
    }

    net.weights = best_w;
    net.biases = best_b;
    net.info.best_epoch = best_epoch;
    net.info.final_val_mse = best_score;
    return net;
}

// --- integration with the simulation loop ---------------------------------

/// One trained net applied to one or more force/moment rows; the net's
/// output dimension must equal the number of target DOFs.
struct CorrectorBinding {
    const CorrectorNet* net = nullptr;
    std::vector<Eigen::Index> target_dofs;
};

/// Build the per-step force-correction provider for simulate(). Each net is
/// evaluated exactly once per step once k samples of history exist; earlier
/// steps use delta* = 0. invocation_count (optional) receives the total
/// number of net evaluations.
inline DeltaFn make_delta_provider(std::vector<CorrectorBinding> bindings,
                                   Eigen::Index n_dof,
                                   std::shared_ptr<long> invocation_count = nullptr) {
    for (const auto& b : bindings) {
        if (b.net == nullptr) throw ConfigError("delta provider: null net");
        if (static_cast<int>(b.target_dofs.size()) != b.net->output_dim())
            throw ConfigError("delta provider: target dof count != net output dim");
        for (const auto d : b.target_dofs)
            if (d < 0 || d >= n_dof)
                throw ConfigError("delta provider: target dof out of range");
    }
    return [bindings = std::move(bindings), n_dof,
            invocation_count](const StateTrajectory& traj,
                              Eigen::Index n) -> Eigen::VectorXd {
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(n_dof);
        for (const auto& b : bindings) {
            if (n < b.net->stencil.k) continue; // warm-up window, delta* = 0
            const Eigen::VectorXd out =
                infer(*b.net, extract_window(traj, b.net->stencil, n));
            for (std::size_t i = 0; i < b.target_dofs.size(); ++i)
                delta(b.target_dofs[i]) += out(static_cast<Eigen::Index>(i));
            if (invocation_count) ++(*invocation_count);
        }
        return delta;
    };
}

// --- serialization ----------------------------------------------------------

constexpr int kModelFormatVersion = 1;

inline nlohmann::json to_json(const StencilSpec& spec) {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& ch : spec.channels)
        channels.push_back({{"kind", to_string(ch.kind)}, {"dof", ch.dof}});
    return {{"k", spec.k}, {"dt", spec.dt}, {"channels", channels}};
}

inline StencilSpec stencil_from_json(const nlohmann::json& j) {
    StencilSpec spec;
    spec.k = j.at("k").get<int>();
    spec.dt = j.at("dt").get<double>();
    for (const auto& c : j.at("channels"))
        spec.channels.push_back(
            {channel_kind_from_string(c.at("kind").get<std::string>()),
             c.at("dof").get<int>()});
    spec.validate();
    return spec;
}

inline nlohmann::json to_json(const CorrectorNet& net) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["stencil"] = to_json(net.stencil);
    j["layer_sizes"] = net.layer_sizes;
    auto weights = nlohmann::json::array();
    for (const auto& w : net.weights) {
        std::vector<double> flat(static_cast<std::size_t>(w.size()));
        // row-major flattening
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                flat[static_cast<std::size_t>(r * w.cols() + c)] = w(r, c);
        weights.push_back(flat);
    }
    j["weights"] = std::move(weights);
    auto biases = nlohmann::json::array();
    for (const auto& b : net.biases)
        biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    j["biases"] = std::move(biases);
    j["feature_norm"] = {
        {"mean", std::vector<double>(net.feature_norm.mean.data(),
                                     net.feature_norm.mean.data() +
                                         net.feature_norm.mean.size())},
        {"std", std::vector<double>(net.feature_norm.std.data(),
                                    net.feature_norm.std.data() +
                                        net.feature_norm.std.size())}};
    j["target_norm"] = {
        {"mean", std::vector<double>(net.target_norm.mean.data(),
                                     net.target_norm.mean.data() +
                                         net.target_norm.mean.size())},
        {"std", std::vector<double>(net.target_norm.std.data(),
                                    net.target_norm.std.data() +
                                        net.target_norm.std.size())}};
    j["train_metadata"] = {
        {"epochs_run", net.info.epoch_train_mse.size()},
        {"best_epoch", net.info.best_epoch},
        {"final_val_mse", net.info.final_val_mse},
        {"learning_rate", net.info.config.learning_rate},
        {"batch_size", net.info.config.batch_size},
        {"seed", net.info.config.seed},
        {"validation_fraction", net.info.config.validation_fraction},
        {"patience", net.info.config.patience}};
    return j;
}

inline CorrectorNet corrector_from_json(const nlohmann::json& j) {
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kModelFormatVersion)
        throw DataError("corrector model: unsupported format version");
    CorrectorNet net;
    net.stencil = stencil_from_json(j.at("stencil"));
    net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (net.layer_sizes.size() < 2)
        throw DataError("corrector model: need at least input and output layers");
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != net.layer_sizes.size() - 1 ||
        biases.size() != weights.size())
        throw DataError("corrector model: layer count mismatch");
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        const int rows = net.layer_sizes[l + 1];
        const int cols = net.layer_sizes[l];
        const auto flat = weights[l].get<std::vector<double>>();
        if (flat.size() != static_cast<std::size_t>(rows) * cols)
            throw DataError("corrector model: weight shape mismatch");
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                w(r, c) = flat[static_cast<std::size_t>(r) * cols + c];
        net.weights.push_back(std::move(w));
        const auto bv = biases[l].get<std::vector<double>>();
        if (bv.size() != static_cast<std::size_t>(rows))
            throw DataError("corrector model: bias shape mismatch");
        net.biases.push_back(
            Eigen::Map<const Eigen::VectorXd>(bv.data(), rows));
    }
    auto load_norm = [](const nlohmann::json& n) {
        Normalization norm;
        const auto mean = n.at("mean").get<std::vector<double>>();
        const auto sd = n.at("std").get<std::vector<double>>();
        norm.mean = Eigen::Map<const Eigen::VectorXd>(
            mean.data(), static_cast<Eigen::Index>(mean.size()));
        norm.std = Eigen::Map<const Eigen::VectorXd>(
            sd.data(), static_cast<Eigen::Index>(sd.size()));
        for (Eigen::Index i = 0; i < norm.std.size(); ++i)
            if (!(norm.std(i) > 0.0))
                throw DataError("corrector model: non-positive normalization std");
        return norm;
    };
    net.feature_norm = load_norm(j.at("feature_norm"));
    net.target_norm = load_norm(j.at("target_norm"));
    if (net.feature_norm.mean.size() != net.stencil.n_channels())
        throw DataError("corrector model: feature norm / channel mismatch");
    if (net.stencil.input_dim() != net.layer_sizes.front())
        throw DataError("corrector model: stencil / input layer mismatch");
    return net;
}

inline void save_model(const std::filesystem::path& path, const CorrectorNet& net) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << to_json(net).dump(2) << "\n";
}

inline CorrectorNet load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    nlohmann::json j;
    in >> j;
    return corrector_from_json(j);
}

} // namespace ncorr
