#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ncorr/integrator.hpp"
#include "ncorr/rng.hpp"

using namespace ncorr;

namespace {
Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }
} // namespace

TEST_CASE("backward Euler startup step") {
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    const OdeRhs decay = [](double, const Eigen::VectorXd& v) {
        return Eigen::VectorXd(-v);
    };
    // implicit Euler closed form: v1 = v0 / (1 + dt)
    const auto v1 = step_bdf1(decay, scalar(1.0), 0.0, cfg);
    CHECK(v1(0) == Catch::Approx(1.0 / 1.1).epsilon(1e-12));

    const OdeRhs zero = [](double, const Eigen::VectorXd& v) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(v.size()));
    };
    const auto unchanged = step_bdf1(zero, scalar(0.7), 0.0, cfg);
    CHECK(unchanged(0) == 0.7);

    // local truncation order: error against exp(-dt) shrinks ~4x with dt/2
    auto local_error = [&](double dt) {
        IntegratorConfig c;
        c.dt = dt;
        const auto v = step_bdf1(decay, scalar(1.0), 0.0, c);
        return std::abs(v(0) - std::exp(-dt));
    };
    const double ratio = local_error(0.1) / local_error(0.05);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("BDF2 step reproduces the hand-derived linear recurrence") {
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    const OdeRhs decay = [](double, const Eigen::VectorXd& v) {
        return Eigen::VectorXd(-v);
    };
    double v_nm1 = 1.0;
    double v_n = 1.0 / 1.1; // one implicit Euler step
    for (int n = 1; n < 20; ++n) {
        const auto next = step_bdf2(decay, scalar(v_n), scalar(v_nm1),
                                    n * cfg.dt, cfg);
        const double expected = (4.0 * v_n - v_nm1) / (3.0 + 2.0 * cfg.dt);
        CHECK(next(0) == Catch::Approx(expected).epsilon(1e-12));
        v_nm1 = v_n;
        v_n = next(0);
    }
}

TEST_CASE("newton solver") {
    IntegratorConfig cfg;

    SECTION("scalar quadratic") {
        const auto res = newton_solve(
            [](const Eigen::VectorXd& v) {
                return Eigen::VectorXd(scalar(v(0) * v(0) - 4.0));
            },
            scalar(3.0), cfg);
        CHECK(res.root(0) == Catch::Approx(2.0).epsilon(1e-10));
    }

    SECTION("well-conditioned linear system converges in <= 2 iterations") {
        Eigen::MatrixXd a(3, 3);
        a << 4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 5.0;
        const Eigen::VectorXd b = Eigen::Vector3d(1.0, -2.0, 0.5);
        const auto res = newton_solve(
            [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v - b); },
            Eigen::VectorXd::Zero(3), cfg);
        CHECK(res.iterations <= 2);
        CHECK((a * res.root - b).norm() < 1e-8);
    }

    SECTION("root at the guess returns immediately") {
        const auto res = newton_solve(
            [](const Eigen::VectorXd& v) {
                return Eigen::VectorXd(scalar(v(0) - 2.0));
            },
            scalar(2.0), cfg);
        CHECK(res.iterations == 0);
        CHECK(res.root(0) == 2.0);
    }

    SECTION("singular jacobian raises a solver error") {
        CHECK_THROWS_AS(newton_solve(
                            [](const Eigen::VectorXd&) {
                                return Eigen::VectorXd(scalar(1.0));
                            },
                            scalar(0.0), cfg),
                        SolverError);
    }

    SECTION("iteration cap raises a solver error") {
        IntegratorConfig tight;
        tight.newton_max_iters = 3;
        // no real root; Newton cannot converge
        CHECK_THROWS_AS(newton_solve(
                            [](const Eigen::VectorXd& v) {
                                return Eigen::VectorXd(scalar(v(0) * v(0) + 1.0));
                            },
                            scalar(1.0), tight),
                        SolverError);
    }
}

TEST_CASE("euler transforms") {
    SECTION("zero angles give the identity") {
        const auto t = euler_transform(0.0, 0.0, 0.0);
        CHECK((t - Eigen::Matrix<double, 6, 6>::Identity()).norm() < 1e-15);
    }

    SECTION("yaw of pi/2 maps ship-x to earth-y") {
        const Eigen::Matrix3d t1 = body_to_earth_rotation(0.0, 0.0, M_PI / 2.0);
        const Eigen::Vector3d mapped = t1 * Eigen::Vector3d(1.0, 0.0, 0.0);
        CHECK(mapped(0) == Catch::Approx(0.0).margin(1e-15));
        CHECK(mapped(1) == Catch::Approx(1.0).epsilon(1e-15));
        CHECK(mapped(2) == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("rotation block is orthonormal for random angles") {
        Rng rng(7);
        for (int i = 0; i < 1000; ++i) {
            const double phi = rng.uniform(-M_PI, M_PI);
            const double theta = rng.uniform(-M_PI / 2 + 2e-3, M_PI / 2 - 2e-3);
            const double psi = rng.uniform(-M_PI, M_PI);
            const Eigen::Matrix3d t1 = body_to_earth_rotation(phi, theta, psi);
            CHECK((t1.transpose() * t1 - Eigen::Matrix3d::Identity())
                      .lpNorm<Eigen::Infinity>() < 1e-12);
        }
    }

    SECTION("pitch singularity guard") {
        CHECK_THROWS_AS(euler_rate_transform(0.0, M_PI / 2.0 - 1e-4, 0.0),
                        KinematicsError);
        CHECK_THROWS_AS(euler_transform(0.1, -M_PI / 2.0 + 5e-4, 0.2),
                        KinematicsError);
        CHECK_NOTHROW(euler_transform(0.1, M_PI / 2.0 - 2e-3, 0.2));
    }
}

TEST_CASE("first-order system structure") {
    // 1-DOF oscillator: Q = [[0, 1], [-c/(m+a), -b/(m+a)]]
    const double m = 2.0, b = 0.3, c = 1.7;
    FirstOrderSystem sys(Eigen::MatrixXd::Constant(1, 1, m),
                         Eigen::MatrixXd::Constant(1, 1, b),
                         Eigen::MatrixXd::Constant(1, 1, c));
    const Eigen::MatrixXd q = sys.coefficient_matrix();
    CHECK(q(0, 0) == 0.0);
    CHECK(q(0, 1) == 1.0);
    CHECK(q(1, 0) == Catch::Approx(-c / m).epsilon(1e-14));
    CHECK(q(1, 1) == Catch::Approx(-b / m).epsilon(1e-14));

    CHECK_THROWS_AS(FirstOrderSystem(Eigen::MatrixXd::Zero(1, 1),
                                     Eigen::MatrixXd::Zero(1, 1),
                                     Eigen::MatrixXd::Zero(1, 1)),
                    ConfigError);
}

TEST_CASE("simulate: fixed point and energy behavior") {
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    FirstOrderSystem sys(Eigen::MatrixXd::Constant(1, 1, 1.0),
                         Eigen::MatrixXd::Constant(1, 1, 0.0),
                         Eigen::MatrixXd::Constant(1, 1, 1.0));

    SECTION("zero forcing and zero state stays zero") {
        const auto traj = simulate(sys, Eigen::VectorXd::Zero(2),
                                   Eigen::VectorXd::Zero(101), cfg);
        CHECK(traj.pos.cwiseAbs().maxCoeff() == 0.0);
        CHECK(traj.vel.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("undamped oscillation: energy monotone, < 1% loss per period") {
        // T_n = 2 pi, dt = 0.01 T_n
        IntegratorConfig fine;
        fine.dt = 0.01 * 2.0 * M_PI;
        Eigen::VectorXd v0(2);
        v0 << 1.0, 0.0;
        const int steps_per_period = 100;
        const auto traj = simulate(sys, v0,
                                   Eigen::VectorXd::Zero(5 * steps_per_period + 1),
                                   fine);
        double prev = 1e9;
        for (Eigen::Index n = 0; n < traj.n_samples(); ++n) {
            const double e = 0.5 * traj.vel(n, 0) * traj.vel(n, 0) +
                             0.5 * traj.pos(n, 0) * traj.pos(n, 0);
            CHECK(e <= prev * (1.0 + 1e-12));
            prev = e;
        }
        // less than 1% loss over each full period
        for (int p = 0; p + 1 < 5; ++p) {
            const auto e = [&](int period) {
                const Eigen::Index n = period * steps_per_period;
                return 0.5 * traj.vel(n, 0) * traj.vel(n, 0) +
                       0.5 * traj.pos(n, 0) * traj.pos(n, 0);
            };
            CHECK(e(p + 1) > 0.99 * e(p));
        }
    }
}

TEST_CASE("BDF2 global order on a driven linear oscillator") {
    // m z'' + b z' + c z = cos(w t), steady state amplitude/phase known.
    const double m = 1.0, b = 0.4, c = 1.0, w = 0.8;
    auto run = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        ForceFn force = [w](double t, const Eigen::VectorXd&) {
            return Eigen::VectorXd(Eigen::VectorXd::Constant(1, std::cos(w * t)));
        };
        FirstOrderSystem sys(Eigen::MatrixXd::Constant(1, 1, m),
                             Eigen::MatrixXd::Constant(1, 1, b),
                             Eigen::MatrixXd::Constant(1, 1, c), force);
        const double duration = 150.0;
        const auto n = static_cast<Eigen::Index>(duration / dt);
        const auto traj =
            simulate(sys, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(n + 1), cfg);
        // L2 error against the analytic steady state over the last 50 s
        const double denom_re = c - m * w * w;
        const double denom_im = b * w;
        const double amp = 1.0 / std::hypot(denom_re, denom_im);
        const double phase = std::atan2(-denom_im, denom_re);
        double acc = 0.0;
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < traj.n_samples(); ++i) {
            if (traj.time(i) < duration - 50.0) continue;
            const double exact = amp * std::cos(w * traj.time(i) + phase);
            acc += (traj.pos(i, 0) - exact) * (traj.pos(i, 0) - exact);
            ++count;
        }
        return std::sqrt(acc / static_cast<double>(count));
    };
    const double e1 = run(0.1);
    const double e2 = run(0.05);
    CHECK(e1 / e2 > 3.4);
    CHECK(e1 / e2 < 4.6);
}

TEST_CASE("simulate annotates solver failures with the step index") {
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    cfg.newton_max_iters = 2;
    // force blows up after t = 0.25: residual becomes non-finite
    ForceFn force = [](double t, const Eigen::VectorXd&) {
        return Eigen::VectorXd(
            Eigen::VectorXd::Constant(1, t > 0.25 ? std::nan("") : 0.0));
    };
    FirstOrderSystem sys(Eigen::MatrixXd::Constant(1, 1, 1.0),
                         Eigen::MatrixXd::Constant(1, 1, 0.0),
                         Eigen::MatrixXd::Constant(1, 1, 1.0), force);
    Eigen::VectorXd v0(2);
    v0 << 1.0, 0.0;
    try {
        simulate(sys, v0, Eigen::VectorXd::Zero(11), cfg);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.step() == 3); // first step whose target time exceeds 0.25
    }
}
