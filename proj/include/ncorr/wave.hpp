#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncorr/csv.hpp"
#include "ncorr/errors.hpp"
#include "ncorr/rng.hpp"

namespace ncorr {

enum class SpectrumKind { BretschneiderForm, Jonswap };

/// Parametric wave energy spectrum.
///
/// BretschneiderForm is S(w) = Hs^2 (5/3) wp^4 w^-5 exp(-5/4 (wp/w)^4),
/// whose zeroth moment is Hs^2/3 (not the conventional Hs^2/16, so the
/// realized significant height differs from the Hs parameter).
/// Jonswap is the standard peak-enhanced shape scaled so that its zeroth
/// moment equals Hs^2/16.
struct SpectrumSpec {
    SpectrumKind kind = SpectrumKind::BretschneiderForm;
    double hs = 1.0;        // significant wave height parameter [m]
    double omega_p = 1.0;   // peak angular frequency [rad/s]
    double gamma = 1.0;     // peak-shape factor (Jonswap only)
    double jonswap_scale = 0.0; // cached normalization, set by jonswap()

    double peak_period() const { return 2.0 * M_PI / omega_p; }
};

namespace detail {

/// Unnormalized JONSWAP shape: w^-5 exp(-1.25 (wp/w)^4) gamma^r with the
/// usual sigma = 0.07 / 0.09 split around the peak.
inline double jonswap_shape(double omega, double omega_p, double gamma) {
    const double sigma = omega <= omega_p ? 0.07 : 0.09;
    const double d = (omega - omega_p) / (sigma * omega_p);
    const double r = std::exp(-0.5 * d * d);
    const double ratio = omega_p / omega;
    const double r4 = ratio * ratio * ratio * ratio;
    return std::pow(omega, -5.0) * std::exp(-1.25 * r4) * std::pow(gamma, r);
}

inline double jonswap_shape_moment0(double omega_p, double gamma) {
    // Trapezoid over [wp/8, 25 wp]; the shape is ~0 outside this band.
    const int n = 20000;
    const double lo = omega_p / 8.0;
    const double hi = 25.0 * omega_p;
    const double h = (hi - lo) / n;
    double sum = 0.5 * (jonswap_shape(lo, omega_p, gamma) +
                        jonswap_shape(hi, omega_p, gamma));
    for (int i = 1; i < n; ++i)
        sum += jonswap_shape(lo + i * h, omega_p, gamma);
    return sum * h;
}

} // namespace detail

inline SpectrumSpec bretschneider_form(double hs, double omega_p) {
    if (hs < 0.0) throw ConfigError("Hs must be >= 0");
    if (omega_p <= 0.0) throw ConfigError("omega_p must be > 0");
    return SpectrumSpec{SpectrumKind::BretschneiderForm, hs, omega_p, 1.0, 0.0};
}

inline SpectrumSpec jonswap(double hs, double tp, double gamma = 1.0) {
    if (hs < 0.0) throw ConfigError("Hs must be >= 0");
    if (tp <= 0.0) throw ConfigError("Tp must be > 0");
    if (gamma < 1.0) throw ConfigError("gamma must be >= 1");
    SpectrumSpec spec;
    spec.kind = SpectrumKind::Jonswap;
    spec.hs = hs;
    spec.omega_p = 2.0 * M_PI / tp;
    spec.gamma = gamma;
    // Scale so the zeroth moment is Hs^2/16.
    const double m0_shape = detail::jonswap_shape_moment0(spec.omega_p, gamma);
    spec.jonswap_scale = (hs * hs / 16.0) / m0_shape;
    return spec;
}

/// Spectral density S(omega) [m^2 s].
inline double spectral_density(const SpectrumSpec& spec, double omega) {
    if (omega <= 0.0) throw ConfigError("spectral_density: omega must be > 0");
    switch (spec.kind) {
    case SpectrumKind::BretschneiderForm: {
        const double r = spec.omega_p / omega;
        const double r4 = r * r * r * r;
        return spec.hs * spec.hs * (5.0 / 3.0) * r4 / omega *
               std::exp(-1.25 * r4);
    }
    case SpectrumKind::Jonswap:
        return spec.jonswap_scale *
               detail::jonswap_shape(omega, spec.omega_p, spec.gamma);
    }
    return 0.0;
}

/// Spectral moment m_r = integral of w^r S(w) dw by trapezoid quadrature
/// over (0, hi].
inline double spectral_moment(const SpectrumSpec& spec, int order,
                              double omega_hi, int n = 200000) {
    const double lo = omega_hi / n; // S -> 0 as omega -> 0+, skip the origin
    const double h = (omega_hi - lo) / n;
    auto f = [&](double w) { return std::pow(w, order) * spectral_density(spec, w); };
    double sum = 0.5 * (f(lo) + f(omega_hi));
    for (int i = 1; i < n; ++i) sum += f(lo + i * h);
    return sum * h;
}

inline double spectral_moment0(const SpectrumSpec& spec, double omega_hi,
                               int n = 200000) {
    return spectral_moment(spec, 0, omega_hi, n);
}

/// Mean zero-up-crossing period Tz = 2 pi sqrt(m0 / m2); sets the record
/// length needed for a requested crossing count.
inline double mean_upcrossing_period(const SpectrumSpec& spec) {
    const double hi = 20.0 * spec.omega_p;
    const double m0 = spectral_moment(spec, 0, hi, 20000);
    const double m2 = spectral_moment(spec, 2, hi, 20000);
    if (m0 <= 0.0 || m2 <= 0.0)
        throw ConfigError("mean_upcrossing_period: degenerate spectrum");
    return 2.0 * M_PI * std::sqrt(m0 / m2);
}

struct WaveComponent {
    double omega;     // [rad/s]
    double amplitude; // [m]
    double phase;     // [rad]
};

/// Discrete harmonic realization of a spectrum. Component frequencies are
/// consecutive integer multiples of delta_omega = 2*pi/duration, so the
/// elevation is exactly periodic with the requested duration.
struct WaveRealization {
    SpectrumSpec spec;
    std::vector<WaveComponent> components;
    double delta_omega = 0.0;
    double duration = 0.0; // repeat period [s]
    std::uint64_t seed = 0;

    double repeat_period() const { return duration; }

    /// Sum of zeta_i^2 / 2, the variance of the elevation process.
    double variance() const {
        double v = 0.0;
        for (const auto& c : components) v += 0.5 * c.amplitude * c.amplitude;
        return v;
    }
};

/// Sample a spectrum into harmonic components over [0.2 wp, 8 wp]
/// (>= 99.9% of variance for the supported shapes) with phases drawn
/// uniformly from [-2pi, 2pi]. Deterministic in (spec, duration, seed).
inline WaveRealization sample_realization(const SpectrumSpec& spec,
                                          double duration,
                                          std::uint64_t seed) {
    if (duration <= 0.0) throw ConfigError("sample_realization: duration must be > 0");
    WaveRealization real;
    real.spec = spec;
    real.duration = duration;
    real.seed = seed;
    real.delta_omega = 2.0 * M_PI / duration;

    const double lo = 0.2 * spec.omega_p;
    const double hi = 8.0 * spec.omega_p;
    const long i_lo = std::max(1L, static_cast<long>(std::ceil(lo / real.delta_omega)));
    const long i_hi = static_cast<long>(std::floor(hi / real.delta_omega));

    Rng rng(seed);
    real.components.reserve(static_cast<std::size_t>(std::max(0L, i_hi - i_lo + 1)));
    for (long i = i_lo; i <= i_hi; ++i) {
        const double omega = i * real.delta_omega;
        const double amp =
            std::sqrt(2.0 * spectral_density(spec, omega) * real.delta_omega);
        const double phase = rng.uniform(-2.0 * M_PI, 2.0 * M_PI);
        real.components.push_back({omega, amp, phase});
    }
    return real;
}

/// eta(t) = sum_i zeta_i cos(omega_i t + phi_i)
inline double elevation(const WaveRealization& real, double t) {
    double eta = 0.0;
    for (const auto& c : real.components)
        eta += c.amplitude * std::cos(c.omega * t + c.phase);
    return eta;
}

/// sum_i cos(omega_i t + phi_i), the unit-amplitude carrier sum that
/// multiplies the state in the nonlinear excitation term.
inline double unit_cos_sum(const WaveRealization& real, double t) {
    double s = 0.0;
    for (const auto& c : real.components) s += std::cos(c.omega * t + c.phase);
    return s;
}

inline std::vector<double> elevation_series(const WaveRealization& real,
                                            double t0, double dt, std::size_t n) {
    std::vector<double> eta(n);
    for (std::size_t i = 0; i < n; ++i) eta[i] = elevation(real, t0 + i * dt);
    return eta;
}

/// Count upward zero crossings: eta_n < 0 and eta_{n+1} >= 0.
inline std::size_t count_zero_upcrossings(std::span<const double> eta) {
    if (eta.size() < 2) throw DataError("count_zero_upcrossings: need >= 2 samples");
    std::size_t count = 0;
    for (std::size_t n = 0; n + 1 < eta.size(); ++n)
        if (eta[n] < 0.0 && eta[n + 1] >= 0.0) ++count;
    return count;
}

// --- serialization -------------------------------------------------------

inline nlohmann::json to_json(const SpectrumSpec& spec) {
    nlohmann::json j;
    j["kind"] = spec.kind == SpectrumKind::Jonswap ? "jonswap" : "bretschneider";
    j["Hs"] = spec.hs;
    if (spec.kind == SpectrumKind::Jonswap)
        j["Tp"] = spec.peak_period();
    else
        j["omega_p"] = spec.omega_p;
    j["gamma"] = spec.gamma;
    return j;
}

inline SpectrumSpec spectrum_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const double hs = j.at("Hs").get<double>();
    double omega_p = 0.0;
    if (j.contains("omega_p"))
        omega_p = j.at("omega_p").get<double>();
    else if (j.contains("Tp"))
        omega_p = 2.0 * M_PI / j.at("Tp").get<double>();
    else
        throw DataError("spectrum json: need omega_p or Tp");
    if (kind == "bretschneider") {
        return bretschneider_form(hs, omega_p);
    } else if (kind == "jonswap") {
        return jonswap(hs, 2.0 * M_PI / omega_p,
                       j.value("gamma", 1.0));
    }
    throw DataError("spectrum json: unknown kind '" + kind + "'");
}

inline nlohmann::json to_json(const WaveRealization& real) {
    nlohmann::json j = to_json(real.spec);
    j["duration"] = real.duration;
    j["seed"] = real.seed;
    auto comps = nlohmann::json::array();
    for (const auto& c : real.components)
        comps.push_back({c.omega, c.amplitude, c.phase});
    j["components"] = std::move(comps);
    return j;
}

inline WaveRealization realization_from_json(const nlohmann::json& j) {
    WaveRealization real;
    real.spec = spectrum_from_json(j);
    real.duration = j.at("duration").get<double>();
    real.seed = j.at("seed").get<std::uint64_t>();
    real.delta_omega = 2.0 * M_PI / real.duration;
    for (const auto& c : j.at("components")) {
        if (!c.is_array() || c.size() != 3)
            throw DataError("realization json: component must be [omega, zeta, phi]");
        real.components.push_back({c[0].get<double>(), c[1].get<double>(),
                                   c[2].get<double>()});
    }
    return real;
}

/// Two-column CSV (t, eta) with header row.
inline void write_elevation_csv(const std::filesystem::path& path,
                                const WaveRealization& real,
                                double dt, std::size_t n_samples) {
    CsvWriter csv(path, {"t", "eta"});
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = i * dt;
        csv.row(std::vector<double>{t, elevation(real, t)});
    }
}

} // namespace ncorr
