#pragma once

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"

namespace chaoscast {

using Index = Eigen::Index;

/// Divergence guard shared by generators and closed-loop prediction.
inline constexpr double kBlowUpGuard = 1e6;

/// A Q-dimensional state sequence sampled at a fixed step.
/// Column t holds the state at time origin_time + t * dt.
struct TimeSeries {
    Eigen::MatrixXd data; // Q rows x T columns
    double dt = 0.0;
    double origin_time = 0.0;

    Index q() const { return data.rows(); }
    Index steps() const { return data.cols(); }

    double time_at(Index col) const { return origin_time + dt * static_cast<double>(col); }

    /// Enforce Q >= 1, T >= 1, dt > 0 and finiteness of every entry.
    void validate() const {
        if (data.rows() < 1 || data.cols() < 1)
            throw ConfigError("TimeSeries: need at least 1 row and 1 column");
        if (!(dt > 0.0))
            throw ConfigError("TimeSeries: dt must be positive");
        if (!data.allFinite())
            throw BlowUpError("TimeSeries: non-finite entries");
    }

    /// Columns [first, first + count).
    TimeSeries slice(Index first, Index count) const {
        if (first < 0 || count < 1 || first + count > data.cols())
            throw SeriesTooShortError("TimeSeries::slice: range out of bounds");
        return TimeSeries{data.middleCols(first, count), dt, time_at(first)};
    }
};

} // namespace chaoscast
