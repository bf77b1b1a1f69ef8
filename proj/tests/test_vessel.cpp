#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "ncorr/corrector.hpp"
#include "ncorr/metrics.hpp"
#include "ncorr/vessel.hpp"
#include "oscillation.hpp"

using namespace ncorr;

namespace {

ExcitationModel calm_sea(const VesselModel& vessel) {
    ExcitationModel model;
    model.speed_ms = vessel.speed_ms;
    return model;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace

TEST_CASE("vessel assembly from the particulars") {
    const auto vessel = assemble_vessel(fds_particulars());

    CHECK(vessel.mass(2, 2) == Catch::Approx(1.6076e6));
    CHECK(vessel.mass(4, 4) == Catch::Approx(1.0048e9).epsilon(1e-4));
    CHECK(vessel.speed_ms == Catch::Approx(18.21).epsilon(1e-3));

    // B33 = 0.1 * 2 * sqrt(C33 (M33 + A33))
    const double b33 = 0.2 * std::sqrt(1.01e7 * (1.6076e6 + 4.3e6));
    CHECK(vessel.damping(2, 2) == Catch::Approx(b33).epsilon(1e-12));
    CHECK(vessel.damping(2, 2) == Catch::Approx(1.545e6).epsilon(1e-3));
    // damping only on the restored diagonal
    CHECK(vessel.damping(0, 0) == 0.0);
    CHECK(vessel.damping(1, 1) == 0.0);
    CHECK(vessel.damping(5, 5) == 0.0);
    CHECK(vessel.damping(3, 3) > 0.0);
    CHECK(vessel.damping(4, 4) > 0.0);

    SECTION("alpha = 0 zeroes the damping") {
        const auto undamped = assemble_vessel(fds_particulars(), 0.0);
        CHECK(undamped.damping.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("non-positive stiffness on a damped DOF is rejected") {
        auto c = fds_hydrostatic_stiffness();
        c(3, 3) = 0.0;
        CHECK_THROWS_AS(assemble_vessel(fds_particulars(), 0.1, fds_added_mass(), c),
                        ConfigError);
    }
}

TEST_CASE("head-seas wave excitation") {
    const auto vessel = assemble_vessel(fds_particulars());

    SECTION("zero-amplitude realization forces nothing") {
        WaveRealization flat;
        flat.components = {{0.7, 0.0, 0.1}};
        flat.duration = 100.0;
        const auto model = make_head_seas_excitation(flat, vessel);
        const auto f = wave_excitation(model, 3.0);
        CHECK(f.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("single component oscillates at the encounter frequency") {
        const double omega = 0.7;
        const double omega_e = omega + omega * omega * vessel.speed_ms / kGravity;
        WaveRealization one;
        one.components = {{omega, 1.0, 0.0}};
        one.duration = 100.0;
        const auto model = make_head_seas_excitation(one, vessel);
        REQUIRE(model.components.size() == 1);
        CHECK(model.components[0].omega_e == Catch::Approx(omega_e).epsilon(1e-12));

        // heave force: flat C33 transfer in phase with the elevation
        const double c33 = vessel.stiffness(2, 2);
        for (const double t : {0.0, 1.3, 4.9}) {
            const auto f = wave_excitation(model, t);
            CHECK(f(kHeave) == Catch::Approx(c33 * std::cos(omega_e * t)).margin(1e-6));
            CHECK(f(kSway) == 0.0);
            CHECK(f(kRoll) == 0.0);
            CHECK(f(kYaw) == 0.0);
        }
        CHECK(encounter_elevation(model, 2.0) ==
              Catch::Approx(std::cos(omega_e * 2.0)).margin(1e-12));
    }

    SECTION("forcing is linear in the component amplitudes") {
        const auto waves =
            sample_realization(jonswap(4.0, 8.5, 1.0), 60.0, 3);
        auto doubled = waves;
        for (auto& c : doubled.components) c.amplitude *= 2.0;
        const auto m1 = make_head_seas_excitation(waves, vessel);
        const auto m2 = make_head_seas_excitation(doubled, vessel);
        for (const double t : {0.0, 7.7, 31.2}) {
            const auto f1 = wave_excitation(m1, t);
            const auto f2 = wave_excitation(m2, t);
            CHECK((f2 - 2.0 * f1).cwiseAbs().maxCoeff() < 1e-9 * f1.norm());
        }
    }

    SECTION("non-head heading is rejected") {
        auto beam = vessel;
        beam.heading_deg = 90.0;
        WaveRealization one;
        one.components = {{0.7, 1.0, 0.0}};
        CHECK_THROWS_AS(make_head_seas_excitation(one, beam), ConfigError);
    }
}

TEST_CASE("restrained heave decay matches the linear oracle values") {
    const auto vessel = assemble_vessel(fds_particulars());
    IntegratorConfig cfg;
    cfg.dt = 0.02;

    // standard decay procedure: release heave, restrain the other DOFs
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(12);
    v0(kHeave) = 1.0;
    auto tables = std::make_shared<SampledExcitation>(
        sample_excitation(calm_sea(vessel), 0.0, cfg.dt, 2001));
    auto sys = make_vessel_system(vessel, tables);
    sys.set_fixed_velocity_dofs({kSurge, kSway, kRoll, kPitch, kYaw});
    const auto traj = simulate(sys, v0, tables->eta, cfg);

    const Eigen::VectorXd heave = traj.pos.col(kHeave);
    const double omega_n = std::sqrt(1.01e7 / (1.6076e6 + 4.3e6));
    CHECK(omega_n == Catch::Approx(1.307).epsilon(2e-3));
    const double measured = testing::crossing_frequency(heave, cfg.dt);
    CHECK(measured == Catch::Approx(omega_n).epsilon(0.02));

    const auto peaks = testing::peak_values(heave);
    REQUIRE(peaks.size() >= 6);
    const double decrement = testing::log_decrement(peaks, 5);
    const double expected = 2.0 * M_PI * 0.1 / std::sqrt(1.0 - 0.01);
    CHECK(decrement == Catch::Approx(expected).epsilon(0.05));
}

TEST_CASE("head-seas runs keep the lateral plane quiet and surge pinned") {
    const auto vessel = assemble_vessel(fds_particulars());
    const auto waves = sample_realization(jonswap(4.0, 8.5, 1.0), 120.0, 8);
    const auto excitation = make_head_seas_excitation(waves, vessel);
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    const auto traj = simulate_vessel(vessel, excitation, 120.0, cfg);

    const double heave_rms = std::sqrt(traj.pos.col(kHeave).squaredNorm() /
                                       static_cast<double>(traj.n_samples()));
    CHECK(heave_rms > 0.01);
    for (const int dof : {kSway, kRoll, kYaw}) {
        CHECK(traj.pos.col(dof).cwiseAbs().maxCoeff() < 1e-10 * heave_rms);
        CHECK(traj.vel.col(dof).cwiseAbs().maxCoeff() < 1e-10 * heave_rms);
    }

    // fixed-surge constraint is exact at every step
    for (Eigen::Index n = 0; n < traj.n_samples(); ++n)
        CHECK(std::abs(traj.vel(n, kSurge) - vessel.speed_ms) < 1e-12);
}

TEST_CASE("synthetic high-fidelity oracle") {
    const auto vessel = assemble_vessel(fds_particulars());
    const auto waves = sample_realization(jonswap(4.0, 8.5, 1.0), 150.0, 13);
    const auto excitation = make_head_seas_excitation(waves, vessel);
    IntegratorConfig cfg;
    cfg.dt = 0.1;

    SECTION("zero gains degenerate to the linear solution") {
        const auto linear = simulate_vessel(vessel, excitation, 100.0, cfg);
        const auto oracle =
            synthetic_high_fidelity(vessel, excitation, {}, 100.0, cfg);
        const double rms = std::sqrt(linear.pos.col(kHeave).squaredNorm() /
                                     static_cast<double>(linear.n_samples()));
        CHECK((oracle.pos - linear.pos).cwiseAbs().maxCoeff() < 1e-10 * rms);
    }

    SECTION("extracted correction cancels a pure cubic heave gain") {
        OracleNonlinearity nl;
        nl.heave_cubic = 2.5e5;
        const auto oracle =
            synthetic_high_fidelity(vessel, excitation, nl, 150.0, cfg);
        const Eigen::MatrixXd delta = extract_delta(vessel, excitation, oracle);
        double worst = 0.0;
        for (Eigen::Index n = 0; n < oracle.n_samples(); ++n) {
            const double z = oracle.pos(n, kHeave);
            worst = std::max(worst,
                             std::abs(delta(n, kHeave) + nl.heave_cubic * z * z * z));
        }
        CHECK(worst < 1e-6 * delta.col(kHeave).cwiseAbs().maxCoeff());
        // pitch channel sees only the coupling, which the linear model carries
        CHECK(delta.col(kPitch).cwiseAbs().maxCoeff() <
              1e-6 * delta.col(kHeave).cwiseAbs().maxCoeff());
    }

    SECTION("default gains leave a visible footprint in the acceleration pdf") {
        const auto nl = default_oracle_nonlinearity(vessel);
        const auto linear = simulate_vessel(vessel, excitation, 150.0, cfg, 50.0);
        const auto oracle =
            synthetic_high_fidelity(vessel, excitation, nl, 150.0, cfg, 50.0);
        const auto rep = compute_metrics(
            to_vec(retained(linear, linear.acc, kHeave)),
            to_vec(retained(oracle, oracle.acc, kHeave)), 50.0);
        CHECK(rep.jsd > 0.001);
    }
}

TEST_CASE("vessel serialization round trips") {
    const auto vessel = assemble_vessel(fds_particulars());
    const auto j = to_json(vessel);
    const auto back = vessel_from_json(j);
    CHECK((back.mass - vessel.mass).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.added - vessel.added).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.damping - vessel.damping).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.stiffness - vessel.stiffness).cwiseAbs().maxCoeff() == 0.0);

    const auto jp = to_json(fds_particulars());
    const auto pb = particulars_from_json(jp);
    CHECK(pb.mass == fds_particulars().mass);
    CHECK(pb.kyy == fds_particulars().kyy);

    // plain-CSV matrix import
    const auto path = std::filesystem::temp_directory_path() / "ncorr_mat_test.csv";
    {
        std::ofstream out(path);
        out << std::setprecision(17);
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) out << (c ? "," : "") << vessel.added(r, c);
            out << "\n";
        }
    }
    const auto m = matrix_from_csv(path);
    CHECK((m - vessel.added).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
}
