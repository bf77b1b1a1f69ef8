#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncorr/csv.hpp"
#include "ncorr/errors.hpp"

namespace ncorr {

/// sqrt(sum (pred - ref)^2 / N)
inline double l2_error(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size() || pred.empty())
        throw DataError("l2_error: series must be non-empty and equal length");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - ref[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

/// max |pred - ref|
inline double linf_error(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size() || pred.empty())
        throw DataError("linf_error: series must be non-empty and equal length");
    double m = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        m = std::max(m, std::abs(pred[i] - ref[i]));
    return m;
}

/// Normalized histogram on a uniform grid. Samples outside the support are
/// clipped into the end bins.
struct Pdf {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> probabilities;
    std::size_t sample_count = 0;

    std::size_t bin_count() const { return probabilities.size(); }
    double bin_width() const {
        return (hi - lo) / static_cast<double>(bin_count());
    }
    bool same_grid(const Pdf& other) const {
        return lo == other.lo && hi == other.hi &&
               bin_count() == other.bin_count();
    }
};

inline Pdf estimate_pdf(std::span<const double> series, std::size_t bin_count,
                        double lo, double hi) {
    if (series.empty()) throw DataError("estimate_pdf: empty series");
    if (bin_count < 2) throw ConfigError("estimate_pdf: need >= 2 bins");
    if (!(hi > lo)) throw ConfigError("estimate_pdf: support must satisfy hi > lo");
    Pdf pdf;
    pdf.lo = lo;
    pdf.hi = hi;
    pdf.probabilities.assign(bin_count, 0.0);
    pdf.sample_count = series.size();
    const double width = (hi - lo) / static_cast<double>(bin_count);
    const auto last = static_cast<long>(bin_count) - 1;
    for (const double x : series) {
        long b = static_cast<long>(std::floor((x - lo) / width));
        b = std::clamp(b, 0L, last);
        pdf.probabilities[static_cast<std::size_t>(b)] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(series.size());
    for (double& p : pdf.probabilities) p *= inv;
    return pdf;
}

inline double series_mean(std::span<const double> s) {
    double m = 0.0;
    for (const double x : s) m += x;
    return m / static_cast<double>(s.size());
}

inline double series_std(std::span<const double> s) {
    const double m = series_mean(s);
    double acc = 0.0;
    for (const double x : s) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(s.size()));
}

/// Default histogram support: reference mean +/- 5 reference standard
/// deviations (degenerate reference gets a unit half-width).
inline std::pair<double, double> default_support(std::span<const double> ref) {
    const double m = series_mean(ref);
    double half = 5.0 * series_std(ref);
    if (half <= 0.0) half = 1.0;
    return {m - half, m + half};
}

/// Jensen-Shannon divergence with natural log: JSD = D(P||M)/2 + D(Q||M)/2,
/// M = (P+Q)/2. Zero-mass bins contribute nothing to their own KL sum.
inline double jsd(const Pdf& p, const Pdf& q) {
    if (!p.same_grid(q)) throw DataError("jsd: pdfs on different bin grids");
    auto kl_to_mixture = [&](const std::vector<double>& k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] <= 0.0) continue;
            const double m = 0.5 * (p.probabilities[i] + q.probabilities[i]);
            acc += k[i] * std::log(k[i] / m);
        }
        return acc;
    };
    return 0.5 * kl_to_mixture(p.probabilities) + 0.5 * kl_to_mixture(q.probabilities);
}

struct MetricsReport {
    double l2 = 0.0;
    double linf = 0.0;
    double jsd = 0.0;
    std::size_t bin_count = 0;
    double support_lo = 0.0;
    double support_hi = 0.0;
    double transient_cutoff = 0.0;
    std::size_t sample_count = 0;
};

constexpr std::size_t kDefaultPdfBins = 101;

/// Full prediction/reference comparison over one windowed series pair.
/// The histogram grid spans +/- 5 sigma of the reference and is shared.
inline MetricsReport compute_metrics(std::span<const double> pred,
                                     std::span<const double> ref,
                                     double transient_cutoff = 0.0,
                                     std::size_t bin_count = kDefaultPdfBins) {
    MetricsReport rep;
    rep.l2 = l2_error(pred, ref);
    rep.linf = linf_error(pred, ref);
    const auto [lo, hi] = default_support(ref);
    rep.support_lo = lo;
    rep.support_hi = hi;
    rep.bin_count = bin_count;
    rep.transient_cutoff = transient_cutoff;
    rep.sample_count = ref.size();
    rep.jsd = jsd(estimate_pdf(pred, bin_count, lo, hi),
                  estimate_pdf(ref, bin_count, lo, hi));
    return rep;
}

/// One result row of the metrics CSV interface.
struct MetricsRow {
    double hs = 0.0;
    double tp_or_wp = 0.0;
    std::string model_id;
    std::string dof;
    std::string quantity;
    MetricsReport report;
};

inline const std::vector<std::string>& metrics_csv_header() {
    static const std::vector<std::string> header{
        "Hs", "Tp_or_wp", "model_id", "dof", "quantity",
        "l2", "linf", "jsd", "n_samples"};
    return header;
}

inline void append_metrics_row(CsvWriter& csv, const MetricsRow& row) {
    csv.row(std::vector<std::string>{
        format_double(row.hs), format_double(row.tp_or_wp), row.model_id,
        row.dof, row.quantity, format_double(row.report.l2),
        format_double(row.report.linf), format_double(row.report.jsd),
        std::to_string(row.report.sample_count)});
}

} // namespace ncorr
