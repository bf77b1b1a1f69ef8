#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ncorr/errors.hpp"
#include "ncorr/trajectory.hpp"

namespace ncorr {

struct IntegratorConfig {
    double dt = 0.1;
    double newton_tol = 1e-10;  // ||alpha||_2 <= tol * (1 + ||v||_2)
    int newton_max_iters = 25;
    double jacobian_perturbation = 1e-6; // per-column step 1e-6 * (1 + |v_j|)
    double pitch_guard = 1e-3;  // [rad] distance from +/-pi/2 treated as singular
};

// --- Euler-angle kinematics ----------------------------------------------

namespace detail {
inline void check_pitch(double theta, double guard) {
    const double wrapped = std::remainder(theta, 2.0 * M_PI);
    if (std::abs(std::abs(wrapped) - M_PI / 2.0) < guard)
        throw KinematicsError("pitch within singularity guard of +/-pi/2");
}
} // namespace detail

/// Body-to-earth rotation (ZYX convention): maps ship-fixed translational
/// velocities to earth-fixed position rates.
inline Eigen::Matrix3d body_to_earth_rotation(double phi, double theta, double psi) {
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(psi), sp = std::sin(psi);
    Eigen::Matrix3d t1;
    t1 << cp * ct, cp * st * sf - sp * cf, sf * sp + cf * cp * st,
          ct * sp, cf * cp + sf * sp * st, -cp * sf + cf * sp * st,
          -st,     ct * sf,                cf * ct;
    return t1;
}

/// Angular-velocity to Euler-angle-rate transform. Singular at theta = +/-pi/2.
inline Eigen::Matrix3d euler_rate_transform(double phi, double theta, double psi,
                                            double guard = 1e-3) {
    (void)psi; // yaw does not appear in the rate transform
    detail::check_pitch(theta, guard);
    const double cf = std::cos(phi), sf = std::sin(phi);
    const double ct = std::cos(theta), tt = std::tan(theta);
    Eigen::Matrix3d t2;
    t2 << 1.0, sf * tt, cf * tt,
          0.0, cf,      -sf,
          0.0, sf / ct, cf / ct;
    return t2;
}

/// 6x6 block-diagonal transform from ship-fixed velocities to earth-fixed
/// position and Euler-angle rates.
inline Eigen::Matrix<double, 6, 6> euler_transform(double phi, double theta,
                                                   double psi, double guard = 1e-3) {
    Eigen::Matrix<double, 6, 6> t = Eigen::Matrix<double, 6, 6>::Zero();
    t.topLeftCorner<3, 3>() = body_to_earth_rotation(phi, theta, psi);
    t.bottomRightCorner<3, 3>() = euler_rate_transform(phi, theta, psi, guard);
    return t;
}

// --- first-order system ---------------------------------------------------

/// External force on the velocity equations; may depend on the full state
/// (nonlinear restoring/damping terms are folded in here).
using ForceFn = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& v)>;

/// Generic right-hand side v' = rhs(t, v).
using OdeRhs = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& v)>;

/// First-order form of a linear-plus-forcing equation of motion.
///
/// State v = {positions; velocities}, each of length n_dof. The velocity
/// block solves (M+A) vel' = -C pos - B vel + force(t, v) + delta, and the
/// position block integrates the (possibly Euler-transformed) velocities.
/// With euler_kinematics set, n_dof must be 6, positions are
/// {x_e, y_e, z_e, phi, theta, psi}, and the kinematic block is rebuilt from
/// the current Euler angles on every evaluation.
class FirstOrderSystem {
public:
    FirstOrderSystem(Eigen::MatrixXd inertia, Eigen::MatrixXd damping,
                     Eigen::MatrixXd stiffness, ForceFn force = nullptr,
                     bool euler_kinematics = false)
        : inertia_(std::move(inertia)), damping_(std::move(damping)),
          stiffness_(std::move(stiffness)), force_(std::move(force)),
          euler_kinematics_(euler_kinematics) {
        const auto n = inertia_.rows();
        if (inertia_.cols() != n || damping_.rows() != n || damping_.cols() != n ||
            stiffness_.rows() != n || stiffness_.cols() != n)
            throw ConfigError("system matrices must be square and equally sized");
        if (euler_kinematics_ && n != 6)
            throw ConfigError("euler kinematics require a 6-DOF system");
        Eigen::FullPivLU<Eigen::MatrixXd> check(inertia_);
        if (!check.isInvertible())
            throw ConfigError("inertia matrix (M+A) is singular");
        inertia_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(inertia_);
    }

    Eigen::Index n_dof() const { return inertia_.rows(); }
    Eigen::Index state_dim() const { return 2 * n_dof(); }
    const Eigen::MatrixXd& inertia() const { return inertia_; }
    const Eigen::MatrixXd& damping() const { return damping_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    bool euler_kinematics() const { return euler_kinematics_; }

    double pitch_guard = 1e-3;

    /// Constrain the listed DOFs: their velocities are held at the initial
    /// value and the remaining equations solve the reduced inertia system
    /// (M+A)_UU w_U = f_U, i.e. the constrained rows carry whatever
    /// constraint force keeps them fixed.
    void set_fixed_velocity_dofs(std::vector<Eigen::Index> dofs) {
        fixed_dofs_ = std::move(dofs);
        free_dofs_.clear();
        for (Eigen::Index d = 0; d < n_dof(); ++d) {
            bool fixed = false;
            for (const auto c : fixed_dofs_)
                if (c == d) fixed = true;
            if (!fixed) free_dofs_.push_back(d);
        }
        if (free_dofs_.empty())
            throw ConfigError("all velocity DOFs constrained");
        const auto nu = static_cast<Eigen::Index>(free_dofs_.size());
        Eigen::MatrixXd reduced(nu, nu);
        for (Eigen::Index i = 0; i < nu; ++i)
            for (Eigen::Index j = 0; j < nu; ++j)
                reduced(i, j) = inertia_(free_dofs_[i], free_dofs_[j]);
        Eigen::FullPivLU<Eigen::MatrixXd> check(reduced);
        if (!check.isInvertible())
            throw ConfigError("reduced inertia matrix is singular");
        reduced_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(reduced);
    }

    const std::vector<Eigen::Index>& fixed_velocity_dofs() const {
        return fixed_dofs_;
    }

    Eigen::VectorXd rhs(double t, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& delta) const {
        const auto n = n_dof();
        if (v.size() != 2 * n) throw ConfigError("state dimension mismatch");
        Eigen::VectorXd vdot(2 * n);
        if (euler_kinematics_) {
            vdot.head(n) = euler_transform(v(3), v(4), v(5), pitch_guard) * v.tail(n);
        } else {
            vdot.head(n) = v.tail(n);
        }
        Eigen::VectorXd f = -stiffness_ * v.head(n) - damping_ * v.tail(n) + delta;
        if (force_) f += force_(t, v);
        if (fixed_dofs_.empty()) {
            vdot.tail(n) = inertia_lu_.solve(f);
        } else {
            const auto nu = static_cast<Eigen::Index>(free_dofs_.size());
            Eigen::VectorXd f_free(nu);
            for (Eigen::Index i = 0; i < nu; ++i) f_free(i) = f(free_dofs_[i]);
            const Eigen::VectorXd w = reduced_lu_.solve(f_free);
            vdot.tail(n).setZero();
            for (Eigen::Index i = 0; i < nu; ++i) vdot(n + free_dofs_[i]) = w(i);
        }
        return vdot;
    }

    /// Rhs with no force correction.
    Eigen::VectorXd rhs(double t, const Eigen::VectorXd& v) const {
        return rhs(t, v, Eigen::VectorXd::Zero(n_dof()));
    }

    /// Continuous coefficient matrix Q = I^-1 G evaluated at the given Euler
    /// angles (identity kinematics if not applicable): [[0, T], [-Minv C, -Minv B]].
    Eigen::MatrixXd coefficient_matrix(double phi = 0.0, double theta = 0.0,
                                       double psi = 0.0) const {
        const auto n = n_dof();
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        if (euler_kinematics_) {
            q.topRightCorner(n, n) = euler_transform(phi, theta, psi, pitch_guard);
        } else {
            q.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
        }
        q.bottomLeftCorner(n, n) = -inertia_lu_.solve(stiffness_);
        q.bottomRightCorner(n, n) = -inertia_lu_.solve(damping_);
        return q;
    }

private:
    Eigen::MatrixXd inertia_;
    Eigen::MatrixXd damping_;
    Eigen::MatrixXd stiffness_;
    ForceFn force_;
    bool euler_kinematics_ = false;
    Eigen::PartialPivLU<Eigen::MatrixXd> inertia_lu_;
    std::vector<Eigen::Index> fixed_dofs_;
    std::vector<Eigen::Index> free_dofs_;
    Eigen::PartialPivLU<Eigen::MatrixXd> reduced_lu_;
};

// --- Newton root finding ---------------------------------------------------

struct NewtonResult {
    Eigen::VectorXd root;
    int iterations = 0;
};

/// Solve H(v) = 0 by Newton iteration with a column-wise forward-difference
/// Jacobian. Converged when the update norm ||alpha||_2 drops below
/// newton_tol * (1 + ||v||_2).
inline NewtonResult newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const Eigen::VectorXd& guess, const IntegratorConfig& cfg) {
    Eigen::VectorXd v = guess;
    Eigen::VectorXd r = residual(v);
    if (!r.allFinite())
        throw SolverError("newton_solve: residual not finite at initial guess");
    if (r.lpNorm<Eigen::Infinity>() == 0.0) return {v, 0};

    const auto dim = v.size();
    Eigen::MatrixXd jac(dim, dim);
    for (int iter = 1; iter <= cfg.newton_max_iters; ++iter) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double h = cfg.jacobian_perturbation * (1.0 + std::abs(v(j)));
            Eigen::VectorXd vp = v;
            vp(j) += h;
            jac.col(j) = (residual(vp) - r) / h;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible())
            throw SolverError("newton_solve: singular jacobian");
        const Eigen::VectorXd alpha = lu.solve(-r);
        v += alpha;
        if (alpha.norm() <= cfg.newton_tol * (1.0 + v.norm()))
            return {v, iter};
        r = residual(v);
        if (!r.allFinite())
            throw SolverError("newton_solve: residual not finite");
    }
    throw SolverError("newton_solve: no convergence in " +
                      std::to_string(cfg.newton_max_iters) +
                      " iterations (residual norm " + std::to_string(r.norm()) + ")");
}

// --- BDF time stepping ------------------------------------------------------

/// One backward-Euler step from (t_n, v_n); startup for BDF2.
inline Eigen::VectorXd step_bdf1(const OdeRhs& rhs, const Eigen::VectorXd& v_n,
                                 double t_n, const IntegratorConfig& cfg) {
    const double t_next = t_n + cfg.dt;
    auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
        return (w - v_n) / cfg.dt - rhs(t_next, w);
    };
    return newton_solve(residual, v_n, cfg).root;
}

/// One BDF2 step: (3 v_{n+1} - 4 v_n + v_{n-1}) / (2 dt) = rhs(t_{n+1}, v_{n+1}).
inline Eigen::VectorXd step_bdf2(const OdeRhs& rhs, const Eigen::VectorXd& v_n,
                                 const Eigen::VectorXd& v_nm1, double t_n,
                                 const IntegratorConfig& cfg) {
    const double t_next = t_n + cfg.dt;
    auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
        return (3.0 * w - 4.0 * v_n + v_nm1) / (2.0 * cfg.dt) - rhs(t_next, w);
    };
    const Eigen::VectorXd guess = 2.0 * v_n - v_nm1;
    return newton_solve(residual, guess, cfg).root;
}

// --- simulation loop --------------------------------------------------------

/// Force-correction provider: given the trajectory filled up to sample n,
/// return the delta vector (length n_dof) applied while solving for sample
/// n+1. Evaluated exactly once per step, before the Newton iteration.
using DeltaFn =
    std::function<Eigen::VectorXd(const StateTrajectory& so_far, Eigen::Index n)>;

struct SimulateOptions {
    double t0 = 0.0;
    double transient_cutoff = 0.0;
};

/// Integrate the system over eta_series.size()-1 steps of cfg.dt (one BDF1
/// startup step, BDF2 after). Accelerations are stored from the force
/// balance at each converged state with the same delta that was applied.
inline StateTrajectory simulate(const FirstOrderSystem& sys,
                                const Eigen::VectorXd& v_initial,
                                const Eigen::VectorXd& eta_series,
                                const IntegratorConfig& cfg,
                                const SimulateOptions& opts = {},
                                const DeltaFn& delta_fn = nullptr) {
    const auto n = sys.n_dof();
    if (v_initial.size() != 2 * n)
        throw ConfigError("simulate: initial state dimension mismatch");
    if (eta_series.size() < 2)
        throw ConfigError("simulate: need at least one step");
    const Eigen::Index n_steps = eta_series.size() - 1;

    StateTrajectory traj;
    traj.dt = cfg.dt;
    traj.t0 = opts.t0;
    traj.transient_cutoff = opts.transient_cutoff;
    traj.pos.resize(n_steps + 1, n);
    traj.vel.resize(n_steps + 1, n);
    traj.acc.resize(n_steps + 1, n);
    traj.delta_applied = Eigen::MatrixXd::Zero(n_steps + 1, n);
    traj.eta = eta_series;

    const Eigen::VectorXd zero_delta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v_prev = v_initial;
    Eigen::VectorXd v_prev2;

    traj.pos.row(0) = v_initial.head(n).transpose();
    traj.vel.row(0) = v_initial.tail(n).transpose();
    traj.acc.row(0) = sys.rhs(opts.t0, v_initial, zero_delta).tail(n).transpose();

    for (Eigen::Index step = 0; step < n_steps; ++step) {
        const double t_n = opts.t0 + step * cfg.dt;
        Eigen::VectorXd delta = zero_delta;
        if (delta_fn) {
            delta = delta_fn(traj, step);
            if (delta.size() != n)
                throw ConfigError("simulate: delta provider dimension mismatch");
        }
        const OdeRhs rhs = [&](double t, const Eigen::VectorXd& w) {
            return sys.rhs(t, w, delta);
        };
        Eigen::VectorXd v_next;
        try {
            v_next = step == 0 ? step_bdf1(rhs, v_prev, t_n, cfg)
                               : step_bdf2(rhs, v_prev, v_prev2, t_n, cfg);
        } catch (const KinematicsError& e) {
            throw KinematicsError(std::string(e.what()) + " at step " +
                                      std::to_string(step + 1),
                                  step + 1, t_n + cfg.dt);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " at step " +
                                  std::to_string(step + 1) + " (t = " +
                                  std::to_string(t_n + cfg.dt) + ")",
                              step + 1, t_n + cfg.dt);
        }
        // Constrained velocities are a fixed point of the zeroed-rhs BDF
        // recurrence; pin them exactly rather than accumulating rounding.
        for (const auto d : sys.fixed_velocity_dofs()) v_next(n + d) = v_prev(n + d);
        const Eigen::VectorXd vdot = sys.rhs(t_n + cfg.dt, v_next, delta);
        traj.pos.row(step + 1) = v_next.head(n).transpose();
        traj.vel.row(step + 1) = v_next.tail(n).transpose();
        traj.acc.row(step + 1) = vdot.tail(n).transpose();
        traj.delta_applied.row(step + 1) = delta.transpose();
        v_prev2 = v_prev;
        v_prev = v_next;
    }
    return traj;
}

} // namespace ncorr
