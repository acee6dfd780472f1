#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"
#include "chaoscast/lyapunov.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

/// eps(t) = ||pred(t) - truth(t)||_2 / sqrt(mean_t ||truth(t)||_2^2), the mean
/// taken over the compared span. An empty prediction yields an empty curve.
inline std::vector<double> normalized_error(const TimeSeries& truth, const TimeSeries& pred) {
    if (truth.q() != pred.q()) throw DimensionError("normalized_error: dimension mismatch");
    if (std::abs(truth.dt - pred.dt) > 1e-12 * std::max(truth.dt, pred.dt))
        throw DimensionError("normalized_error: dt mismatch");
    const Index n = pred.data.cols();
    if (n > truth.data.cols()) throw DimensionError("normalized_error: prediction longer than truth");
    if (n == 0) return {};

    const double mean_sq =
        truth.data.leftCols(n).squaredNorm() / static_cast<double>(n);
    const double scale = std::sqrt(mean_sq);
    std::vector<double> curve(static_cast<std::size_t>(n));
    for (Index t = 0; t < n; ++t) {
        const double err = (pred.data.col(t) - truth.data.col(t)).norm();
        curve[static_cast<std::size_t>(t)] = scale > 0.0 ? err / scale : err;
    }
    return curve;
}

struct ValidTimeReport {
    double threshold = 0.0;
    Index valid_steps = 0;
    double valid_seconds = 0.0;
    double valid_lyapunov_times = 0.0; // 0 unless a Lyapunov estimate was supplied
    std::vector<double> error_curve;
};

/// First-crossing rule on a precomputed error curve.
inline ValidTimeReport valid_time_from_curve(std::vector<double> curve, double dt, double theta,
                                             const std::optional<LyapunovEstimate>& lyap = {}) {
    if (!(theta > 0.0)) throw ConfigError("valid_time: theta must be > 0");
    ValidTimeReport report;
    report.threshold = theta;
    Index steps = static_cast<Index>(curve.size());
    for (std::size_t t = 0; t < curve.size(); ++t) {
        if (curve[t] >= theta) {
            steps = static_cast<Index>(t);
            break;
        }
    }
    report.valid_steps = steps;
    report.valid_seconds = dt * static_cast<double>(steps);
    if (lyap) report.valid_lyapunov_times = report.valid_seconds * lyap->lambda_max;
    report.error_curve = std::move(curve);
    return report;
}

/// Duration until the normalized error first reaches theta.
inline ValidTimeReport valid_time(const TimeSeries& truth, const TimeSeries& pred, double theta,
                                  const std::optional<LyapunovEstimate>& lyap = {}) {
    return valid_time_from_curve(normalized_error(truth, pred), truth.dt, theta, lyap);
}

/// Elementwise truth - pred, for heatmap export.
inline TimeSeries difference_field(const TimeSeries& truth, const TimeSeries& pred) {
    if (truth.q() != pred.q() || truth.data.cols() != pred.data.cols())
        throw DimensionError("difference_field: shape mismatch");
    if (std::abs(truth.dt - pred.dt) > 1e-12 * std::max(truth.dt, pred.dt))
        throw DimensionError("difference_field: dt mismatch");
    return TimeSeries{truth.data - pred.data, truth.dt, truth.origin_time};
}

} // namespace chaoscast
