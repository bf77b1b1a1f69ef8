#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "ncorr/csv.hpp"
#include "ncorr/duffing.hpp"
#include "ncorr/errors.hpp"

namespace ncorr {

enum class FixedPointKind {
    SpiralSink,
    Center,
    DegenerateLine,
    SpiralSource,
    NodeSink,
    NodeSource,
};

inline std::string to_string(FixedPointKind k) {
    switch (k) {
    case FixedPointKind::SpiralSink: return "spiral_sink";
    case FixedPointKind::Center: return "center";
    case FixedPointKind::DegenerateLine: return "degenerate_line";
    case FixedPointKind::SpiralSource: return "spiral_source";
    case FixedPointKind::NodeSink: return "node_sink";
    case FixedPointKind::NodeSource: return "node_source";
    }
    return "?";
}

struct EigenReport {
    ForcingModel model = ForcingModel::A;
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    FixedPointKind classification = FixedPointKind::Center;
    double critical_damping = 0.0; // b_c = 2 sqrt(c1 (m + a1)); 0 when no restoring
};

/// The 2x2 first-order coefficient matrix of the low-fidelity 1-DOF system
/// with the model's retained linear terms.
inline Eigen::Matrix2d low_fidelity_coefficient_matrix(ForcingModel model,
                                                       const DuffingParams& p,
                                                       double added_mass) {
    const double denom = p.mass + added_mass;
    if (denom <= 0.0) throw ConfigError("eigenvalues: m + a1 must be > 0");
    const double c = retains_linear_restoring(model) ? p.c1 : 0.0;
    const double b = retains_linear_damping(model) ? p.b1 : 0.0;
    Eigen::Matrix2d q;
    q << 0.0, 1.0, -c / denom, -b / denom;
    return q;
}

/// Classify the origin fixed point from the eigenvalues of a 2x2 matrix.
inline FixedPointKind classify_fixed_point(std::complex<double> l1,
                                           std::complex<double> l2) {
    const double scale = std::max({std::abs(l1), std::abs(l2), 1.0});
    const double eps = 1e-9 * scale;
    if (std::abs(l1) <= eps && std::abs(l2) <= eps)
        return FixedPointKind::DegenerateLine;
    if (std::abs(l1.imag()) > eps || std::abs(l2.imag()) > eps) {
        const double re = 0.5 * (l1.real() + l2.real());
        if (re < -eps) return FixedPointKind::SpiralSink;
        if (re > eps) return FixedPointKind::SpiralSource;
        return FixedPointKind::Center;
    }
    if (l1.real() < eps && l2.real() < eps) return FixedPointKind::NodeSink;
    if (l1.real() > -eps && l2.real() > -eps) return FixedPointKind::NodeSource;
    // Opposite-sign real eigenvalues cannot occur for these systems
    // (det Q = c1/(m+a1) >= 0); report the degenerate case.
    return FixedPointKind::DegenerateLine;
}

/// Numerically computed spectrum of the model's coefficient matrix with the
/// fixed-point classification and critical damping coefficient.
inline EigenReport eigenvalues(ForcingModel model, const DuffingParams& p,
                               double added_mass) {
    const Eigen::Matrix2d q = low_fidelity_coefficient_matrix(model, p, added_mass);
    Eigen::EigenSolver<Eigen::Matrix2d> solver(q);
    EigenReport rep;
    rep.model = model;
    rep.lambda1 = solver.eigenvalues()(0);
    rep.lambda2 = solver.eigenvalues()(1);
    // Deterministic ordering: by real part, then imaginary part.
    if (rep.lambda2.real() < rep.lambda1.real() ||
        (rep.lambda2.real() == rep.lambda1.real() &&
         rep.lambda2.imag() < rep.lambda1.imag()))
        std::swap(rep.lambda1, rep.lambda2);
    rep.classification = classify_fixed_point(rep.lambda1, rep.lambda2);
    rep.critical_damping = retains_linear_restoring(model)
                               ? 2.0 * std::sqrt(p.c1 * (p.mass + added_mass))
                               : 0.0;
    return rep;
}

struct PhaseSample {
    double v1, v2;   // displacement, velocity
    double dv1, dv2; // their rates with f_w = delta = 0
};

struct PhaseGrid {
    double v1_min = -1.0, v1_max = 1.0;
    double v2_min = -1.0, v2_max = 1.0;
    int n1 = 21, n2 = 21;
};

/// Sample the unforced low-fidelity vector field on a rectangular grid.
inline std::vector<PhaseSample> phase_field(ForcingModel model,
                                            const DuffingParams& p,
                                            double added_mass,
                                            const PhaseGrid& grid) {
    if (grid.n1 < 2 || grid.n2 < 2 || !(grid.v1_max > grid.v1_min) ||
        !(grid.v2_max > grid.v2_min))
        throw ConfigError("phase_field: degenerate grid");
    const Eigen::Matrix2d q = low_fidelity_coefficient_matrix(model, p, added_mass);
    std::vector<PhaseSample> samples;
    samples.reserve(static_cast<std::size_t>(grid.n1) * grid.n2);
    for (int i = 0; i < grid.n1; ++i) {
        const double v1 = grid.v1_min +
                          (grid.v1_max - grid.v1_min) * i / (grid.n1 - 1);
        for (int j = 0; j < grid.n2; ++j) {
            const double v2 = grid.v2_min +
                              (grid.v2_max - grid.v2_min) * j / (grid.n2 - 1);
            const Eigen::Vector2d rate = q * Eigen::Vector2d(v1, v2);
            samples.push_back({v1, v2, rate(0), rate(1)});
        }
    }
    return samples;
}

inline nlohmann::json to_json(const EigenReport& rep) {
    return {{"model", to_string(rep.model)},
            {"lambda1", {rep.lambda1.real(), rep.lambda1.imag()}},
            {"lambda2", {rep.lambda2.real(), rep.lambda2.imag()}},
            {"classification", to_string(rep.classification)},
            {"critical_damping", rep.critical_damping}};
}

inline void write_phase_field_csv(const std::filesystem::path& path,
                                  const std::vector<PhaseSample>& samples) {
    CsvWriter csv(path, {"v1", "v2", "dv1", "dv2"});
    for (const auto& s : samples)
        csv.row(std::vector<double>{s.v1, s.v2, s.dv1, s.dv2});
}

} // namespace ncorr
