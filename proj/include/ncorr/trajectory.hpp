#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ncorr/csv.hpp"
#include "ncorr/errors.hpp"

namespace ncorr {

/// Uniformly sampled state time series. One column per degree of freedom;
/// positions are earth-fixed (Euler angles for rotational DOFs), velocities
/// and accelerations are in the solve frame (ship-fixed for the vessel).
/// Accelerations are stored as solved from the force balance at each step,
/// not re-differenced.
struct StateTrajectory {
    double dt = 0.0;
    double t0 = 0.0;
    double transient_cutoff = 0.0; // samples with t < cutoff excluded from fits/metrics

    Eigen::MatrixXd pos;  // n_samples x n_dof
    Eigen::MatrixXd vel;
    Eigen::MatrixXd acc;
    Eigen::VectorXd eta;           // wave elevation at each sample
    Eigen::MatrixXd delta_applied; // force correction applied per step (zeros if none)

    Eigen::Index n_samples() const { return pos.rows(); }
    Eigen::Index n_dof() const { return pos.cols(); }
    double time(Eigen::Index n) const { return t0 + n * dt; }

    /// First sample index at or after the transient cutoff.
    Eigen::Index first_retained() const {
        if (transient_cutoff <= t0) return 0;
        const auto n = static_cast<Eigen::Index>(
            std::ceil((transient_cutoff - t0) / dt - 1e-9));
        return std::min(n, n_samples());
    }
};

/// Column vector of one scalar channel over the retained window.
inline Eigen::VectorXd retained(const StateTrajectory& traj,
                                const Eigen::MatrixXd& m, Eigen::Index dof) {
    const auto n0 = traj.first_retained();
    return m.col(dof).segment(n0, traj.n_samples() - n0);
}

inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const StateTrajectory& traj) {
    std::vector<std::string> header{"t", "eta"};
    const int nd = static_cast<int>(traj.n_dof());
    for (int d = 0; d < nd; ++d) header.push_back("pos" + std::to_string(d));
    for (int d = 0; d < nd; ++d) header.push_back("vel" + std::to_string(d));
    for (int d = 0; d < nd; ++d) header.push_back("acc" + std::to_string(d));
    for (int d = 0; d < nd; ++d) header.push_back("delta" + std::to_string(d));
    CsvWriter csv(path, header);
    std::vector<double> row(header.size());
    for (Eigen::Index n = 0; n < traj.n_samples(); ++n) {
        std::size_t c = 0;
        row[c++] = traj.time(n);
        row[c++] = traj.eta.size() > n ? traj.eta(n) : 0.0;
        for (int d = 0; d < nd; ++d) row[c++] = traj.pos(n, d);
        for (int d = 0; d < nd; ++d) row[c++] = traj.vel(n, d);
        for (int d = 0; d < nd; ++d) row[c++] = traj.acc(n, d);
        for (int d = 0; d < nd; ++d) row[c++] = traj.delta_applied(n, d);
        csv.row(row);
    }
}

inline StateTrajectory read_trajectory_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    // Column layout: t, eta, pos*, vel*, acc*, delta*.
    if (table.header.size() < 6 || (table.header.size() - 2) % 4 != 0)
        throw DataError("trajectory csv: unexpected column count");
    const int nd = static_cast<int>((table.header.size() - 2) / 4);
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    if (n < 2) throw DataError("trajectory csv: need >= 2 rows");

    StateTrajectory traj;
    traj.pos.resize(n, nd);
    traj.vel.resize(n, nd);
    traj.acc.resize(n, nd);
    traj.delta_applied.resize(n, nd);
    traj.eta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& cells = table.rows[static_cast<std::size_t>(i)];
        if (cells.size() != table.header.size())
            throw DataError("trajectory csv: ragged row");
        std::size_t c = 0;
        const double t = std::stod(cells[c++]);
        if (i == 0) traj.t0 = t;
        if (i == 1) traj.dt = t - traj.t0;
        traj.eta(i) = std::stod(cells[c++]);
        for (int d = 0; d < nd; ++d) traj.pos(i, d) = std::stod(cells[c++]);
        for (int d = 0; d < nd; ++d) traj.vel(i, d) = std::stod(cells[c++]);
        for (int d = 0; d < nd; ++d) traj.acc(i, d) = std::stod(cells[c++]);
        for (int d = 0; d < nd; ++d) traj.delta_applied(i, d) = std::stod(cells[c++]);
    }
    return traj;
}

} // namespace ncorr
