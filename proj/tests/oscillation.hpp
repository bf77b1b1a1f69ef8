#pragma once

// Test-side helpers for analyzing decay and steady-state oscillations,
// independent of the library's solver path.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace ncorr::testing {

/// Times of upward zero crossings of a uniformly sampled signal, refined by
/// linear interpolation between the bracketing samples.
inline std::vector<double> upcrossing_times(const Eigen::VectorXd& y, double dt,
                                            double t0 = 0.0) {
    std::vector<double> times;
    for (Eigen::Index n = 0; n + 1 < y.size(); ++n) {
        if (y(n) < 0.0 && y(n + 1) >= 0.0) {
            const double frac = -y(n) / (y(n + 1) - y(n));
            times.push_back(t0 + (static_cast<double>(n) + frac) * dt);
        }
    }
    return times;
}

/// Mean angular frequency from consecutive up-crossing intervals.
inline double crossing_frequency(const Eigen::VectorXd& y, double dt) {
    const auto times = upcrossing_times(y, dt);
    if (times.size() < 2) return 0.0;
    const double period = (times.back() - times.front()) /
                          static_cast<double>(times.size() - 1);
    return 2.0 * M_PI / period;
}

/// Values of successive local maxima (sample-wise peaks).
inline std::vector<double> peak_values(const Eigen::VectorXd& y) {
    std::vector<double> peaks;
    for (Eigen::Index n = 1; n + 1 < y.size(); ++n) {
        if (y(n) > y(n - 1) && y(n) >= y(n + 1) && y(n) > 0.0)
            peaks.push_back(y(n));
    }
    return peaks;
}

/// Mean logarithmic decrement over the first `count` peak pairs.
inline double log_decrement(const std::vector<double>& peaks, std::size_t count) {
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < peaks.size() && used < count; ++i, ++used)
        acc += std::log(peaks[i] / peaks[i + 1]);
    return used > 0 ? acc / static_cast<double>(used) : 0.0;
}

} // namespace ncorr::testing
