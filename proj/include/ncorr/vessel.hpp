#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ncorr/csv.hpp"
#include "ncorr/errors.hpp"
#include "ncorr/integrator.hpp"
#include "ncorr/trajectory.hpp"
#include "ncorr/wave.hpp"

namespace ncorr {

constexpr double kGravity = 9.81;        // [m/s^2]
constexpr double kKnotsToMs = 0.514444;  // international knot

/// DOF ordering used throughout: 0 surge, 1 sway, 2 heave, 3 roll, 4 pitch,
/// 5 yaw. Positions are earth-fixed (x, y, z, phi, theta, psi); velocities
/// and accelerations are ship-fixed.
enum VesselDof : int {
    kSurge = 0,
    kSway = 1,
    kHeave = 2,
    kRoll = 3,
    kPitch = 4,
    kYaw = 5,
};

/// Main particulars of the modeled hull. Radii of gyration for roll/yaw are
/// not published for this vessel; defaults use the customary estimates
/// kxx = 0.35 B and kzz = kyy (those DOFs stay unexcited in head seas).
struct VesselParticulars {
    double lpp = 100.0;          // length between perpendiculars [m]
    double lwl = 99.982;         // waterline length [m]
    double beam = 12.502;        // moulded breadth [m]
    double draft_fp = 3.125;     // [m]
    double draft_ap = 3.125;     // [m]
    double volume = 1568.4;      // displaced volume [m^3]
    double mass = 1.6076e6;      // displacement mass [kg]
    double kyy = 25.0;           // pitch radius of gyration [m]
    double kxx = 0.35 * 12.502;  // roll radius of gyration [m]
    double kzz = 25.0;           // yaw radius of gyration [m]
    double speed_knots = 35.4;
    double heading_deg = 180.0;  // head seas

    double speed_ms() const { return speed_knots * kKnotsToMs; }
};

/// Fast-displacement-ship particulars used by all built-in studies.
inline VesselParticulars fds_particulars() { return {}; }

/// Infinite-frequency added mass [SI].
inline Eigen::Matrix<double, 6, 6> fds_added_mass() {
    Eigen::Matrix<double, 6, 6> a;
    a << 6.9e3, 0, 1.2e4, 0, 3.3e6, 0,
         0, 6.0e6, 0, -4.7e5, 0, 6.5e6,
         1.1e4, 0, 4.3e6, 0, 3.2e7, 0,
         0, -4.4e5, 0, 7.7e6, 0, 3.6e7,
         3.3e6, 0, 3.2e7, 0, 2.2e9, 0,
         0, 6.5e6, 0, 3.6e7, 0, 4.3e8;
    return a;
}

/// Linear hydrostatic stiffness: heave/roll/pitch rows only [SI].
inline Eigen::Matrix<double, 6, 6> fds_hydrostatic_stiffness() {
    Eigen::Matrix<double, 6, 6> c = Eigen::Matrix<double, 6, 6>::Zero();
    c(2, 2) = 1.01e7;
    c(2, 4) = 3.65e7;
    c(3, 3) = 4.49e7;
    c(4, 2) = 3.65e7;
    c(4, 4) = 6.25e9;
    return c;
}

struct VesselModel {
    Eigen::Matrix<double, 6, 6> mass;      // physical mass/inertia
    Eigen::Matrix<double, 6, 6> added;     // infinite-frequency added mass
    Eigen::Matrix<double, 6, 6> damping;   // critical-damping-fraction fill
    Eigen::Matrix<double, 6, 6> stiffness;
    double speed_ms = 0.0;
    double heading_deg = 180.0;
    double damping_fraction = 0.1;

    Eigen::Matrix<double, 6, 6> inertia() const { return mass + added; }
};

/// Assemble the vessel matrices: diagonal physical mass from the particulars,
/// added mass and stiffness as given, and B_ii = alpha 2 sqrt(C_ii (M+A)_ii)
/// on the restored DOFs (heave, roll, pitch).
inline VesselModel assemble_vessel(
    const VesselParticulars& p, double alpha = 0.1,
    const Eigen::Matrix<double, 6, 6>& added = fds_added_mass(),
    const Eigen::Matrix<double, 6, 6>& stiffness = fds_hydrostatic_stiffness()) {
    if (p.mass <= 0.0) throw ConfigError("vessel: displacement mass must be > 0");
    if (p.kyy <= 0.0) throw ConfigError("vessel: kyy must be > 0");
    VesselModel m;
    m.mass = Eigen::Matrix<double, 6, 6>::Zero();
    m.mass(0, 0) = m.mass(1, 1) = m.mass(2, 2) = p.mass;
    m.mass(3, 3) = p.mass * p.kxx * p.kxx;
    m.mass(4, 4) = p.mass * p.kyy * p.kyy;
    m.mass(5, 5) = p.mass * p.kzz * p.kzz;
    m.added = added;
    m.stiffness = stiffness;
    m.damping = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 2; i <= 4; ++i) {
        if (stiffness(i, i) <= 0.0)
            throw ConfigError("vessel: non-positive stiffness on a damped DOF");
        m.damping(i, i) =
            alpha * 2.0 * std::sqrt(stiffness(i, i) * (m.mass(i, i) + added(i, i)));
    }
    m.speed_ms = p.speed_ms();
    m.heading_deg = p.heading_deg;
    m.damping_fraction = alpha;
    return m;
}

/// Head-seas encounter frequency for a ship advancing at speed u.
inline double encounter_frequency(double omega, double speed_ms) {
    return omega + omega * omega * speed_ms / kGravity;
}

/// Per-frequency excitation transfer curves (amplitude and phase of force
/// or moment per unit wave amplitude). A configurable stand-in for the
/// hydrodynamic code that produced the reference data.
struct ExcitationCurves {
    std::function<double(double omega)> heave_amp;
    std::function<double(double omega)> heave_phase;
    std::function<double(double omega)> pitch_amp;
    std::function<double(double omega)> pitch_phase;
    std::function<double(double omega)> surge_amp;
    std::function<double(double omega)> surge_phase;
};

/// Flat-coefficient defaults: heave force C33 per metre of elevation, pitch
/// moment from the wave slope (k zeta, in quadrature) acting through half of
/// C55, no surge excitation.
inline ExcitationCurves default_excitation_curves(const VesselModel& vessel) {
    const double c33 = vessel.stiffness(2, 2);
    const double c55 = vessel.stiffness(4, 4);
    return {
        [c33](double) { return c33; },
        [](double) { return 0.0; },
        [c55](double omega) { return 0.5 * c55 * omega * omega / kGravity; },
        [](double) { return M_PI / 2.0; },
        [](double) { return 0.0; },
        [](double) { return 0.0; },
    };
}

struct ExcitationComponent {
    double omega;      // absolute wave frequency [rad/s]
    double omega_e;    // encounter frequency [rad/s]
    double amplitude;  // wave component amplitude [m]
    double phase;      // wave component phase [rad]
    double heave_amp, heave_phase;
    double pitch_amp, pitch_phase;
    double surge_amp, surge_phase;
};

/// Linear head-seas wave excitation: per-component harmonic forces at the
/// encounter frequencies. Sway, roll and yaw are never excited.
struct ExcitationModel {
    std::vector<ExcitationComponent> components;
    double speed_ms = 0.0;
};

inline ExcitationModel make_head_seas_excitation(const WaveRealization& waves,
                                                 const VesselModel& vessel,
                                                 const ExcitationCurves& curves) {
    if (std::abs(vessel.heading_deg - 180.0) > 1e-9)
        throw ConfigError("excitation model supports head seas (heading 180 deg) only");
    ExcitationModel model;
    model.speed_ms = vessel.speed_ms;
    model.components.reserve(waves.components.size());
    for (const auto& c : waves.components) {
        ExcitationComponent e;
        e.omega = c.omega;
        e.omega_e = encounter_frequency(c.omega, vessel.speed_ms);
        e.amplitude = c.amplitude;
        e.phase = c.phase;
        e.heave_amp = curves.heave_amp ? curves.heave_amp(c.omega) : 0.0;
        e.heave_phase = curves.heave_phase ? curves.heave_phase(c.omega) : 0.0;
        e.pitch_amp = curves.pitch_amp ? curves.pitch_amp(c.omega) : 0.0;
        e.pitch_phase = curves.pitch_phase ? curves.pitch_phase(c.omega) : 0.0;
        e.surge_amp = curves.surge_amp ? curves.surge_amp(c.omega) : 0.0;
        e.surge_phase = curves.surge_phase ? curves.surge_phase(c.omega) : 0.0;
        model.components.push_back(e);
    }
    return model;
}

inline ExcitationModel make_head_seas_excitation(const WaveRealization& waves,
                                                 const VesselModel& vessel) {
    return make_head_seas_excitation(waves, vessel,
                                     default_excitation_curves(vessel));
}

/// 6-vector of excitation forces/moments at time t.
inline Eigen::Matrix<double, 6, 1> wave_excitation(const ExcitationModel& model,
                                                   double t) {
    Eigen::Matrix<double, 6, 1> f = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& c : model.components) {
        const double arg = c.omega_e * t + c.phase;
        f(kSurge) += c.amplitude * c.surge_amp * std::cos(arg + c.surge_phase);
        f(kHeave) += c.amplitude * c.heave_amp * std::cos(arg + c.heave_phase);
        f(kPitch) += c.amplitude * c.pitch_amp * std::cos(arg + c.pitch_phase);
    }
    return f;
}

/// Incident wave elevation seen from the advancing ship.
inline double encounter_elevation(const ExcitationModel& model, double t) {
    double eta = 0.0;
    for (const auto& c : model.components)
        eta += c.amplitude * std::cos(c.omega_e * t + c.phase);
    return eta;
}

/// Excitation and elevation pre-sampled on the integration grid.
struct SampledExcitation {
    double t0 = 0.0;
    double dt = 0.1;
    Eigen::MatrixXd force; // n_samples x 6
    Eigen::VectorXd eta;   // n_samples

    Eigen::Index index_of(double t) const {
        const double x = (t - t0) / dt;
        const auto i = static_cast<Eigen::Index>(std::llround(x));
        if (i < 0 || i >= force.rows() || std::abs(x - static_cast<double>(i)) > 1e-6)
            throw SolverError("excitation queried off its time grid");
        return i;
    }
};

inline SampledExcitation sample_excitation(const ExcitationModel& model,
                                           double t0, double dt,
                                           Eigen::Index n_samples) {
    SampledExcitation s;
    s.t0 = t0;
    s.dt = dt;
    s.force.resize(n_samples, 6);
    s.eta.resize(n_samples);
    for (Eigen::Index i = 0; i < n_samples; ++i) {
        const double t = t0 + i * dt;
        s.force.row(i) = wave_excitation(model, t).transpose();
        s.eta(i) = encounter_elevation(model, t);
    }
    return s;
}

/// State-dependent forces the synthetic high-fidelity oracle adds on top of
/// the linear model: cubic restoring and quadratic damping in heave and
/// pitch. All gains are in force/moment units per the respective power.
struct OracleNonlinearity {
    double heave_cubic = 0.0;  // [N/m^3] on earth-fixed heave
    double pitch_cubic = 0.0;  // [N m/rad^3] on pitch Euler angle
    double heave_quad_damping = 0.0; // [N s^2/m^2] on ship-fixed heave velocity
    double pitch_quad_damping = 0.0; // [N m s^2/rad^2] on pitch rate

    bool any() const {
        return heave_cubic != 0.0 || pitch_cubic != 0.0 ||
               heave_quad_damping != 0.0 || pitch_quad_damping != 0.0;
    }
};

/// Defaults sized so the cubic force reaches ~10% of the linear restoring at
/// a reference response (2 m heave, 0.15 rad pitch) and quadratic damping
/// reaches ~half the linear damping at 2 m/s / 0.2 rad/s rates.
inline OracleNonlinearity default_oracle_nonlinearity(const VesselModel& vessel) {
    OracleNonlinearity nl;
    nl.heave_cubic = 0.1 * vessel.stiffness(2, 2) / (2.0 * 2.0);
    nl.pitch_cubic = 0.1 * vessel.stiffness(4, 4) / (0.15 * 0.15);
    nl.heave_quad_damping = 0.25 * vessel.damping(2, 2);
    nl.pitch_quad_damping = 2.5 * vessel.damping(4, 4);
    return nl;
}

inline nlohmann::json to_json(const OracleNonlinearity& nl) {
    return {{"heave_cubic", nl.heave_cubic},
            {"pitch_cubic", nl.pitch_cubic},
            {"heave_quad_damping", nl.heave_quad_damping},
            {"pitch_quad_damping", nl.pitch_quad_damping}};
}

inline OracleNonlinearity nonlinearity_from_json(const nlohmann::json& j) {
    OracleNonlinearity nl;
    nl.heave_cubic = j.value("heave_cubic", 0.0);
    nl.pitch_cubic = j.value("pitch_cubic", 0.0);
    nl.heave_quad_damping = j.value("heave_quad_damping", 0.0);
    nl.pitch_quad_damping = j.value("pitch_quad_damping", 0.0);
    return nl;
}

inline Eigen::Matrix<double, 6, 1> oracle_force(const OracleNonlinearity& nl,
                                                const Eigen::VectorXd& v) {
    Eigen::Matrix<double, 6, 1> f = Eigen::Matrix<double, 6, 1>::Zero();
    const double z = v(kHeave), theta = v(kPitch);
    const double w = v(6 + kHeave), q = v(6 + kPitch);
    f(kHeave) = -nl.heave_cubic * z * z * z - nl.heave_quad_damping * std::abs(w) * w;
    f(kPitch) = -nl.pitch_cubic * theta * theta * theta -
                nl.pitch_quad_damping * std::abs(q) * q;
    return f;
}

/// First-order vessel system: Euler kinematics, fixed surge velocity, linear
/// matrices plus the sampled excitation (and oracle nonlinearities if given).
inline FirstOrderSystem make_vessel_system(
    const VesselModel& vessel, std::shared_ptr<const SampledExcitation> excitation,
    const OracleNonlinearity& nl = {}) {
    ForceFn force = [excitation, nl](double t,
                                     const Eigen::VectorXd& v) -> Eigen::VectorXd {
        Eigen::Matrix<double, 6, 1> f =
            excitation->force.row(excitation->index_of(t)).transpose();
        if (nl.any()) f += oracle_force(nl, v);
        return f;
    };
    FirstOrderSystem sys(vessel.inertia(), vessel.damping, vessel.stiffness,
                         std::move(force), /*euler_kinematics=*/true);
    sys.set_fixed_velocity_dofs({kSurge});
    return sys;
}

/// Initial state: at rest at the origin, surge velocity at service speed.
inline Eigen::VectorXd vessel_initial_state(const VesselModel& vessel) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(12);
    v(6 + kSurge) = vessel.speed_ms;
    return v;
}

/// Integrate the vessel under the given excitation. With nonlinearity gains
/// this is the synthetic high-fidelity oracle; with none (and no corrector)
/// it is the linear low-fidelity benchmark; with a corrector it is the
/// hybrid prediction.
inline StateTrajectory simulate_vessel(const VesselModel& vessel,
                                       const ExcitationModel& excitation,
                                       double duration,
                                       const IntegratorConfig& cfg,
                                       double transient_cutoff = 0.0,
                                       const OracleNonlinearity& nl = {},
                                       const DeltaFn& delta_fn = nullptr) {
    if (cfg.dt <= 0.0) throw ConfigError("simulate_vessel: dt must be > 0");
    const auto n_steps = static_cast<Eigen::Index>(std::llround(duration / cfg.dt));
    if (n_steps < 1) throw ConfigError("simulate_vessel: duration must be >= dt");
    auto tables = std::make_shared<SampledExcitation>(
        sample_excitation(excitation, 0.0, cfg.dt, n_steps + 1));
    const auto sys = make_vessel_system(vessel, tables, nl);
    SimulateOptions opts;
    opts.transient_cutoff = transient_cutoff;
    return simulate(sys, vessel_initial_state(vessel), tables->eta, cfg, opts,
                    delta_fn);
}

/// Synthetic high-fidelity reference: the linear model plus known nonlinear
/// forces, integrated with no force correction. Stands in for the
/// proprietary reference solver in all 6-DOF studies.
inline StateTrajectory synthetic_high_fidelity(const VesselModel& vessel,
                                               const ExcitationModel& excitation,
                                               const OracleNonlinearity& nl,
                                               double duration,
                                               const IntegratorConfig& cfg,
                                               double transient_cutoff = 0.0) {
    return simulate_vessel(vessel, excitation, duration, cfg, transient_cutoff, nl);
}

/// Per-sample force correction against the linear model:
/// delta_n = (M+A) acc_n + B vel_n + C pos_n - f_w(t_n), one column per DOF.
inline Eigen::MatrixXd extract_delta(const VesselModel& vessel,
                                     const ExcitationModel& excitation,
                                     const StateTrajectory& traj) {
    if (traj.n_dof() != 6) throw DataError("extract_delta: expected 6-DOF trajectory");
    const auto n = traj.n_samples();
    const SampledExcitation tables =
        sample_excitation(excitation, traj.t0, traj.dt, n);
    Eigen::MatrixXd delta(n, 6);
    const Eigen::Matrix<double, 6, 6> inertia = vessel.inertia();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Matrix<double, 6, 1> lhs =
            inertia * traj.acc.row(i).transpose() +
            vessel.damping * traj.vel.row(i).transpose() +
            vessel.stiffness * traj.pos.row(i).transpose();
        delta.row(i) = (lhs - tables.force.row(i).transpose()).transpose();
    }
    return delta;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::json to_json(const VesselParticulars& p) {
    return {{"Lpp", p.lpp},       {"Lwl", p.lwl},
            {"B", p.beam},        {"Tf", p.draft_fp},
            {"Ta", p.draft_ap},   {"volume", p.volume},
            {"mass", p.mass},     {"Kyy", p.kyy},
            {"Kxx", p.kxx},       {"Kzz", p.kzz},
            {"speed_knots", p.speed_knots},
            {"heading_deg", p.heading_deg}};
}

inline VesselParticulars particulars_from_json(const nlohmann::json& j) {
    VesselParticulars p;
    p.lpp = j.value("Lpp", p.lpp);
    p.lwl = j.value("Lwl", p.lwl);
    p.beam = j.value("B", p.beam);
    p.draft_fp = j.value("Tf", p.draft_fp);
    p.draft_ap = j.value("Ta", p.draft_ap);
    p.volume = j.value("volume", p.volume);
    p.mass = j.value("mass", p.mass);
    p.kyy = j.value("Kyy", p.kyy);
    p.kxx = j.value("Kxx", 0.35 * p.beam);
    p.kzz = j.value("Kzz", p.kyy);
    p.speed_knots = j.value("speed_knots", p.speed_knots);
    p.heading_deg = j.value("heading_deg", p.heading_deg);
    return p;
}

namespace detail {
inline nlohmann::json matrix_to_json(const Eigen::Matrix<double, 6, 6>& m) {
    auto rows = nlohmann::json::array();
    for (int r = 0; r < 6; ++r) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < 6; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::Matrix<double, 6, 6> matrix_from_json(const nlohmann::json& j) {
    Eigen::Matrix<double, 6, 6> m;
    if (j.size() != 6) throw DataError("vessel matrix: expected 6 rows");
    for (int r = 0; r < 6; ++r) {
        if (j[r].size() != 6) throw DataError("vessel matrix: expected 6 columns");
        for (int c = 0; c < 6; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}
} // namespace detail

inline nlohmann::json to_json(const VesselModel& v) {
    return {{"M", detail::matrix_to_json(v.mass)},
            {"A", detail::matrix_to_json(v.added)},
            {"B", detail::matrix_to_json(v.damping)},
            {"C", detail::matrix_to_json(v.stiffness)},
            {"speed_ms", v.speed_ms},
            {"heading_deg", v.heading_deg},
            {"damping_fraction", v.damping_fraction}};
}

inline VesselModel vessel_from_json(const nlohmann::json& j) {
    VesselModel v;
    v.mass = detail::matrix_from_json(j.at("M"));
    v.added = detail::matrix_from_json(j.at("A"));
    v.damping = detail::matrix_from_json(j.at("B"));
    v.stiffness = detail::matrix_from_json(j.at("C"));
    v.speed_ms = j.at("speed_ms").get<double>();
    v.heading_deg = j.value("heading_deg", 180.0);
    v.damping_fraction = j.value("damping_fraction", 0.1);
    return v;
}

/// 6x6 matrix from a plain CSV (no header, 6 rows of 6 values), for
/// importing coefficients from external hydrodynamic codes.
inline Eigen::Matrix<double, 6, 6> matrix_from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    Eigen::Matrix<double, 6, 6> m;
    std::string line;
    int r = 0;
    while (std::getline(in, line) && r < 6) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int c = 0;
        while (std::getline(ss, cell, ',') && c < 6) m(r, c++) = std::stod(cell);
        if (c != 6) throw DataError("matrix csv: expected 6 columns");
        ++r;
    }
    if (r != 6) throw DataError("matrix csv: expected 6 rows");
    return m;
}

} // namespace ncorr
