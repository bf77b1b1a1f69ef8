#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncorr/errors.hpp"
#include "ncorr/integrator.hpp"
#include "ncorr/trajectory.hpp"
#include "ncorr/wave.hpp"

namespace ncorr {

/// Coefficients of the forced Duffing equation
///   m z'' = sum_i beta (zeta_i - alpha z) cos(w_i t + phi_i)
///           - c1 z - c3 z^3 - b1 z' - b2 |z'| z'
struct DuffingParams {
    double mass = 1.0;
    double c1 = 1.0;    // linear restoring
    double c3 = 0.01;   // cubic restoring
    double b1 = 0.1;    // linear damping
    double b2 = 0.0;    // quadratic damping
    double beta = 1.0;  // excitation force per unit wave amplitude
    double alpha = 0.0; // excitation-nonlinearity coefficient

    void validate() const {
        if (mass <= 0.0) throw ConfigError("duffing: mass must be > 0");
        if (c1 <= 0.0) throw ConfigError("duffing: c1 must be > 0");
        if (b1 < 0.0) throw ConfigError("duffing: b1 must be >= 0");
    }
};

/// Low-fidelity forcing model selector. Ordered from most physics retained
/// (A: linear excitation, restoring, damping) to none (E: f = 0).
enum class ForcingModel { A, B, C, D, E };

inline bool retains_linear_excitation(ForcingModel m) {
    return m == ForcingModel::A || m == ForcingModel::D;
}
inline bool retains_linear_damping(ForcingModel m) {
    return m == ForcingModel::A || m == ForcingModel::B;
}
inline bool retains_linear_restoring(ForcingModel m) {
    return m != ForcingModel::E;
}

inline std::string to_string(ForcingModel m) {
    switch (m) {
    case ForcingModel::A: return "A";
    case ForcingModel::B: return "B";
    case ForcingModel::C: return "C";
    case ForcingModel::D: return "D";
    case ForcingModel::E: return "E";
    }
    return "?";
}

inline ForcingModel forcing_model_from_string(const std::string& s) {
    if (s == "A") return ForcingModel::A;
    if (s == "B") return ForcingModel::B;
    if (s == "C") return ForcingModel::C;
    if (s == "D") return ForcingModel::D;
    if (s == "E") return ForcingModel::E;
    throw ConfigError("unknown forcing model '" + s + "'");
}

constexpr std::array<ForcingModel, 5> all_forcing_models{
    ForcingModel::A, ForcingModel::B, ForcingModel::C, ForcingModel::D,
    ForcingModel::E};

inline nlohmann::json to_json(const DuffingParams& p) {
    return {{"m", p.mass}, {"c1", p.c1},     {"c3", p.c3},      {"b1", p.b1},
            {"b2", p.b2},  {"beta", p.beta}, {"alpha", p.alpha}};
}

inline DuffingParams duffing_params_from_json(const nlohmann::json& j) {
    DuffingParams p;
    p.mass = j.value("m", p.mass);
    p.c1 = j.value("c1", p.c1);
    p.c3 = j.value("c3", p.c3);
    p.b1 = j.value("b1", p.b1);
    p.b2 = j.value("b2", p.b2);
    p.beta = j.value("beta", p.beta);
    p.alpha = j.value("alpha", p.alpha);
    p.validate();
    return p;
}

/// f^(l) for the selected model at one instant. The linear excitation is the
/// unscaled harmonic sum, i.e. the wave elevation itself.
inline double low_fidelity_force(ForcingModel model, const DuffingParams& p,
                                 double z, double zdot,
                                 const WaveRealization& waves, double t) {
    double f = 0.0;
    if (retains_linear_excitation(model)) f += elevation(waves, t);
    if (retains_linear_restoring(model)) f -= p.c1 * z;
    if (retains_linear_damping(model)) f -= p.b1 * zdot;
    return f;
}

namespace detail {

/// Uniformly sampled signal with exact-grid lookup. The integrator only
/// evaluates forcing on its own time grid; anything else is a logic error.
class SampledSignal {
public:
    SampledSignal() = default;
    SampledSignal(double t0, double dt, std::vector<double> values)
        : t0_(t0), dt_(dt), values_(std::move(values)) {}

    double at(double t) const {
        const double x = (t - t0_) / dt_;
        const long i = std::lround(x);
        if (i < 0 || i >= static_cast<long>(values_.size()) ||
            std::abs(x - static_cast<double>(i)) > 1e-6)
            throw SolverError("sampled signal queried off its time grid");
        return values_[static_cast<std::size_t>(i)];
    }

private:
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> values_;
};

inline SampledSignal sample_elevation(const WaveRealization& waves, double t0,
                                      double dt, std::size_t n) {
    return {t0, dt, elevation_series(waves, t0, dt, n)};
}

inline SampledSignal sample_cos_sum(const WaveRealization& waves, double t0,
                                    double dt, std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = unit_cos_sum(waves, t0 + i * dt);
    return {t0, dt, std::move(s)};
}

} // namespace detail

/// High-fidelity Duffing system in first-order form: the linear restoring and
/// damping sit in the system matrices, everything else in the force provider.
inline FirstOrderSystem make_duffing_system(const DuffingParams& p,
                                            const WaveRealization& waves,
                                            double t0, double dt,
                                            std::size_t n_samples) {
    p.validate();
    auto eta = detail::sample_elevation(waves, t0, dt, n_samples);
    detail::SampledSignal carrier;
    if (p.alpha != 0.0)
        carrier = detail::sample_cos_sum(waves, t0, dt, n_samples);
    const double beta = p.beta, alpha = p.alpha, c3 = p.c3, b2 = p.b2;
    ForceFn force = [eta, carrier, beta, alpha, c3, b2](
                        double t, const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const double z = v(0), zdot = v(1);
        double f = beta * eta.at(t) - c3 * z * z * z - b2 * std::abs(zdot) * zdot;
        if (alpha != 0.0) f -= beta * alpha * z * carrier.at(t);
        return Eigen::VectorXd::Constant(1, f);
    };
    return FirstOrderSystem(Eigen::MatrixXd::Constant(1, 1, p.mass),
                            Eigen::MatrixXd::Constant(1, 1, p.b1),
                            Eigen::MatrixXd::Constant(1, 1, p.c1),
                            std::move(force));
}

/// Low-fidelity system for one forcing model; the hybrid equation
/// m z'' = f^(l) + delta is closed by the delta provider passed to simulate().
inline FirstOrderSystem make_forcing_system(ForcingModel model,
                                            const DuffingParams& p,
                                            const WaveRealization& waves,
                                            double t0, double dt,
                                            std::size_t n_samples) {
    p.validate();
    ForceFn force = nullptr;
    if (retains_linear_excitation(model)) {
        auto eta = detail::sample_elevation(waves, t0, dt, n_samples);
        force = [eta](double t, const Eigen::VectorXd&) {
            return Eigen::VectorXd::Constant(1, eta.at(t));
        };
    }
    const double b = retains_linear_damping(model) ? p.b1 : 0.0;
    const double c = retains_linear_restoring(model) ? p.c1 : 0.0;
    return FirstOrderSystem(Eigen::MatrixXd::Constant(1, 1, p.mass),
                            Eigen::MatrixXd::Constant(1, 1, b),
                            Eigen::MatrixXd::Constant(1, 1, c),
                            std::move(force));
}

/// Solve the full nonlinear Duffing equation from rest over the given
/// duration. Returns the trajectory sampled at dt with the wave elevation.
inline StateTrajectory solve_high_fidelity(const DuffingParams& p,
                                           const WaveRealization& waves,
                                           double duration,
                                           const IntegratorConfig& cfg,
                                           double transient_cutoff = 0.0) {
    if (cfg.dt <= 0.0) throw ConfigError("solve_high_fidelity: dt must be > 0");
    if (duration < cfg.dt)
        throw ConfigError("solve_high_fidelity: duration must be >= dt");
    const auto n_steps = static_cast<Eigen::Index>(std::llround(duration / cfg.dt));
    const auto n_samples = static_cast<std::size_t>(n_steps + 1);
    const auto sys = make_duffing_system(p, waves, 0.0, cfg.dt, n_samples);
    const Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(
        elevation_series(waves, 0.0, cfg.dt, n_samples).data(),
        static_cast<Eigen::Index>(n_samples));
    SimulateOptions opts;
    opts.transient_cutoff = transient_cutoff;
    return simulate(sys, Eigen::VectorXd::Zero(2), eta, cfg, opts);
}

/// Force correction delta_n = m z''_n - f^(l)(z_n, z'_n, t_n) for every
/// sample; the linear excitation is taken from the trajectory's elevation.
inline Eigen::VectorXd extract_delta(ForcingModel model, const DuffingParams& p,
                                     const StateTrajectory& traj) {
    if (traj.n_dof() != 1)
        throw DataError("extract_delta: expected a 1-DOF trajectory");
    if (traj.eta.size() != traj.n_samples())
        throw DataError("extract_delta: elevation/trajectory length mismatch");
    const auto n = traj.n_samples();
    Eigen::VectorXd delta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double fl = 0.0;
        if (retains_linear_excitation(model)) fl += traj.eta(i);
        if (retains_linear_restoring(model)) fl -= p.c1 * traj.pos(i, 0);
        if (retains_linear_damping(model)) fl -= p.b1 * traj.vel(i, 0);
        delta(i) = p.mass * traj.acc(i, 0) - fl;
    }
    return delta;
}

} // namespace ncorr
