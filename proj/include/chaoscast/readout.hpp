#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"
#include "chaoscast/esn.hpp"
#include "chaoscast/features.hpp"
#include "chaoscast/ridge.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

/// Per-dimension z-score learned on training data.
struct Normalization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Normalization fit(const Eigen::MatrixXd& data) {
        Normalization n;
        n.mean = data.rowwise().mean();
        Eigen::MatrixXd centered = data.colwise() - n.mean;
        n.scale = (centered.array().square().rowwise().mean()).sqrt();
        for (Index i = 0; i < n.scale.size(); ++i)
            if (n.scale[i] < 1e-12) n.scale[i] = 1.0;
        return n;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& data) const {
        return (data.colwise() - mean).array().colwise() / scale.array();
    }
    Eigen::VectorXd invert(const Eigen::VectorXd& v) const {
        return (v.array() * scale.array()).matrix() + mean;
    }
};

/// Trained linear readout bound to the feature map it was fit on.
/// For ESN models the feature map has family esn_state and `esn` holds the
/// configuration the reservoir is rebuilt from.
struct ReadoutModel {
    Eigen::MatrixXd w_out; // q_out x total_dim
    double lambda = 0.0;
    FeatureMap feature_map;
    std::optional<EsnConfig> esn;
    TargetMode target_mode = TargetMode::next_state;
    std::optional<Normalization> norm;
    Index esn_washout = 0; // washout applied when the model was trained

    Index q_out() const { return w_out.rows(); }
    bool is_esn() const { return esn.has_value(); }
};

struct TrainSummary {
    Index n_samples = 0;
    double fit_rmse = 0.0;           // per-entry RMSE over training targets
    double normal_eq_residual = 0.0; // relative
    double wall_clock_train = 0.0;   // seconds spent in the ridge solve
    double wall_clock_featurize = 0.0;
    std::vector<std::string> warnings;
};

struct TrainResult {
    ReadoutModel model;
    TrainSummary summary;
};

struct TrainOptions {
    bool normalize = false;
    Index chunk_columns = 1024; // streaming accumulation granularity
};

namespace detail {
using Clock = std::chrono::steady_clock;
inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
} // namespace detail

/// Fit W_out on a series: featurize in streaming chunks, accumulate the
/// normal equations, and solve. Targets follow target_mode (next_state:
/// Y(t) = u(t+1); delta: Y(t) = u(t+1) - u(t)).
inline TrainResult train(const TimeSeries& series, const FeatureMap& map, double lambda,
                         TargetMode target_mode = TargetMode::next_state,
                         const TrainOptions& options = {}) {
    series.validate();
    if (series.q() != map.config.q)
        throw DimensionError("train: series dimension != feature config q");

    TrainResult result;
    result.model.lambda = lambda;
    result.model.feature_map = map;
    result.model.target_mode = target_mode;

    Eigen::MatrixXd data = series.data;
    if (options.normalize) {
        result.model.norm = Normalization::fit(series.data);
        data = result.model.norm->apply(series.data);
    }

    const Index depth = map.required_depth;
    const Index n = series.steps() - 1 - depth;
    if (n < 1)
        throw SeriesTooShortError("train: series yields no samples (need > " +
                                  std::to_string(depth + 1) + " columns)");
    if (n < map.total_dim / 10)
        result.summary.warnings.push_back("only " + std::to_string(n) + " samples for " +
                                          std::to_string(map.total_dim) + " features");

    GramAccumulator acc(map.total_dim, series.q());
    const Index chunk = std::max<Index>(1, options.chunk_columns);
    Eigen::MatrixXd feat_chunk(map.total_dim, chunk);
    Eigen::MatrixXd target_chunk(series.q(), chunk);
    for (Index begin = 0; begin < n; begin += chunk) {
        const Index count = std::min(chunk, n - begin);
        auto t0 = detail::Clock::now();
        for (Index c = 0; c < count; ++c) {
            const Index t = depth + begin + c;
            DelayWindow window(data, t);
            assemble_into(window, map, feat_chunk.col(c));
            if (target_mode == TargetMode::next_state)
                target_chunk.col(c) = data.col(t + 1);
            else
                target_chunk.col(c) = data.col(t + 1) - data.col(t);
        }
        result.summary.wall_clock_featurize += detail::seconds_since(t0);
        t0 = detail::Clock::now();
        acc.add(feat_chunk.leftCols(count), target_chunk.leftCols(count));
        result.summary.wall_clock_train += detail::seconds_since(t0);
    }

    const auto t0 = detail::Clock::now();
    RidgeSolution solution = acc.solve(lambda);
    result.summary.wall_clock_train += detail::seconds_since(t0);

    result.summary.n_samples = n;
    result.summary.normal_eq_residual = solution.normal_eq_residual;
    result.summary.fit_rmse =
        std::sqrt(acc.fit_sq_error(solution.w) /
                  static_cast<double>(n * series.q()));
    result.model.w_out = std::move(solution.w);
    return result;
}

/// Closed-loop continuation from the tail of `warmup`.
struct ClosedLoopResult {
    TimeSeries series;
    bool truncated = false; // hit the blow-up guard before n_steps
};

inline ClosedLoopResult predict_closed_loop(const ReadoutModel& model, const TimeSeries& warmup,
                                            Index n_steps) {
    if (model.is_esn()) throw ConfigError("predict_closed_loop: use esn_predict for ESN models");
    warmup.validate();
    if (n_steps < 1) throw ConfigError("predict_closed_loop: n_steps must be >= 1");
    const FeatureMap& map = model.feature_map;
    if (warmup.q() != map.config.q) throw DimensionError("predict_closed_loop: dimension mismatch");
    const Index depth = map.required_depth;
    if (warmup.steps() < depth + 1)
        throw InsufficientHistoryError("predict_closed_loop: warmup shorter than window depth " +
                                       std::to_string(depth + 1));

    Eigen::MatrixXd window = warmup.data.rightCols(depth + 1);
    if (model.norm) window = model.norm->apply(window);

    ClosedLoopResult result;
    result.series.dt = warmup.dt;
    result.series.origin_time = warmup.time_at(warmup.steps() - 1) + warmup.dt;
    result.series.data.resize(warmup.q(), n_steps);

    Eigen::VectorXd features(map.total_dim);
    Index produced = 0;
    for (Index step = 0; step < n_steps; ++step) {
        DelayWindow view(window, depth);
        assemble_into(view, map, features);
        Eigen::VectorXd next = model.w_out * features;
        if (model.target_mode == TargetMode::delta) next += window.col(depth);
        const Eigen::VectorXd raw = model.norm ? model.norm->invert(next) : next;
        if (!raw.allFinite() || raw.cwiseAbs().maxCoeff() > kBlowUpGuard) {
            result.truncated = true;
            break;
        }
        result.series.data.col(produced++) = raw;
        if (depth > 0)
            window.leftCols(depth) = window.rightCols(depth).eval();
        window.col(depth) = next;
    }
    // A fully truncated result keeps zero columns; callers check `truncated`.
    result.series.data.conservativeResize(Eigen::NoChange, produced);
    return result;
}

/// Drive the reservoir over the series, discard `washout` initial state/target
/// pairs, and ridge-solve W_out on the node states.
inline TrainResult esn_train(const TimeSeries& series, const EsnConfig& config, double lambda,
                             Index washout, TargetMode target_mode = TargetMode::next_state,
                             const TrainOptions& options = {}) {
    series.validate();
    config.validate();
    if (washout < 0) throw ConfigError("esn_train: washout must be >= 0");
    const Index n_pairs = series.steps() - 1;
    if (washout >= n_pairs)
        throw SeriesTooShortError("esn_train: washout " + std::to_string(washout) +
                                  " >= training pairs " + std::to_string(n_pairs));

    TrainResult result;
    result.model.lambda = lambda;
    result.model.target_mode = target_mode;
    result.model.esn = config;
    result.model.esn_washout = washout;
    FeatureConfig fc;
    fc.family = FeatureFamily::esn_state;
    fc.q = config.n_nodes;
    result.model.feature_map = plan_features(fc);

    Eigen::MatrixXd data = series.data;
    if (options.normalize) {
        result.model.norm = Normalization::fit(series.data);
        data = result.model.norm->apply(series.data);
    }

    const EsnReservoir reservoir = EsnReservoir::build(config, series.q());
    const Index n = n_pairs - washout;
    if (n < config.n_nodes / 10)
        result.summary.warnings.push_back("only " + std::to_string(n) + " samples for " +
                                          std::to_string(config.n_nodes) + " nodes");

    auto t0 = detail::Clock::now();
    Eigen::MatrixXd states(config.n_nodes, n);
    Eigen::MatrixXd targets(series.q(), n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(config.n_nodes);
    for (Index t = 0; t < n_pairs; ++t) {
        s = reservoir.step(s, data.col(t));
        if (t < washout) continue;
        states.col(t - washout) = s;
        if (target_mode == TargetMode::next_state)
            targets.col(t - washout) = data.col(t + 1);
        else
            targets.col(t - washout) = data.col(t + 1) - data.col(t);
    }
    result.summary.wall_clock_featurize = detail::seconds_since(t0);

    t0 = detail::Clock::now();
    GramAccumulator acc(config.n_nodes, series.q());
    acc.add(states, targets);
    RidgeSolution solution = acc.solve(lambda);
    result.summary.wall_clock_train = detail::seconds_since(t0);

    result.summary.n_samples = n;
    result.summary.normal_eq_residual = solution.normal_eq_residual;
    result.summary.fit_rmse =
        std::sqrt(acc.fit_sq_error(solution.w) / static_cast<double>(n * series.q()));
    result.model.w_out = std::move(solution.w);
    return result;
}

/// Closed-loop ESN prediction: the reservoir is rebuilt from the stored
/// config, driven over the warmup series from a zero state, then fed its own
/// output.
inline ClosedLoopResult esn_predict(const ReadoutModel& model, const TimeSeries& warmup,
                                    Index n_steps) {
    if (!model.is_esn()) throw ConfigError("esn_predict: model is not an ESN");
    warmup.validate();
    if (n_steps < 1) throw ConfigError("esn_predict: n_steps must be >= 1");

    const EsnReservoir reservoir = EsnReservoir::build(*model.esn, warmup.q());
    Eigen::MatrixXd data = model.norm ? model.norm->apply(warmup.data) : warmup.data;

    Eigen::VectorXd s = Eigen::VectorXd::Zero(reservoir.n_nodes());
    for (Index t = 0; t < data.cols(); ++t) s = reservoir.step(s, data.col(t));
    Eigen::VectorXd last_input = data.col(data.cols() - 1);

    ClosedLoopResult result;
    result.series.dt = warmup.dt;
    result.series.origin_time = warmup.time_at(warmup.steps() - 1) + warmup.dt;
    result.series.data.resize(warmup.q(), n_steps);

    Index produced = 0;
    for (Index step = 0; step < n_steps; ++step) {
        Eigen::VectorXd next = model.w_out * s;
        if (model.target_mode == TargetMode::delta) next += last_input;
        const Eigen::VectorXd raw = model.norm ? model.norm->invert(next) : next;
        if (!raw.allFinite() || raw.cwiseAbs().maxCoeff() > kBlowUpGuard) {
            result.truncated = true;
            break;
        }
        result.series.data.col(produced++) = raw;
        s = reservoir.step(s, next);
        last_input = next;
    }
    result.series.data.conservativeResize(Eigen::NoChange, produced);
    return result;
}

/// Dispatch on the model kind.
inline ClosedLoopResult predict(const ReadoutModel& model, const TimeSeries& warmup,
                                Index n_steps) {
    return model.is_esn() ? esn_predict(model, warmup, n_steps)
                          : predict_closed_loop(model, warmup, n_steps);
}

} // namespace chaoscast
