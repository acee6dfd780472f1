#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

enum class FeatureFamily { heng_rc, ng_rc, esn_state };
enum class NeighborWrap { periodic, clamped };
enum class HengVariant { full, first_dim_only };
enum class TargetMode { next_state, delta };

struct FeatureConfig {
    FeatureFamily family = FeatureFamily::heng_rc;
    Index q = 1; // state dimension (node count for esn_state)
    Index k = 1; // number of delay blocks
    bool include_constant = false;
    double constant_value = 1.0;
    NeighborWrap neighbor_wrap = NeighborWrap::periodic; // heng_rc only
    HengVariant heng_variant = HengVariant::full;        // heng_rc only
    // First delay block of the neighbor products. Block j multiplies states at
    // delays j and j+1, so 0 couples the current state into the products while
    // 1 starts one step back.
    Index heng_delay_start = 1;

    void validate() const {
        if (q < 1) throw ConfigError("FeatureConfig: q must be >= 1");
        if (k < 1) throw ConfigError("FeatureConfig: k must be >= 1");
        if (!std::isfinite(constant_value))
            throw ConfigError("FeatureConfig: constant_value must be finite");
        if (family == FeatureFamily::heng_rc) {
            if (neighbor_wrap == NeighborWrap::periodic && q < 3)
                throw ConfigError("FeatureConfig: periodic neighbor wrap needs q >= 3");
            if (heng_delay_start != 0 && heng_delay_start != 1)
                throw ConfigError("FeatureConfig: heng_delay_start must be 0 or 1");
        }
    }
};

/// Symbolic description of one feature slot.
struct FeatureTerm {
    enum class Kind { constant, linear, product };
    Kind kind = Kind::constant;
    Index dim_a = -1, delay_a = -1;
    Index dim_b = -1, delay_b = -1;
};

/// Planned layout of a feature vector: slot counts plus a term index that
/// names every slot. Slot order is fixed: constant, then linear by increasing
/// delay then dimension, then the family's nonlinear block.
struct FeatureMap {
    FeatureConfig config;
    Index dim_constant = 0;
    Index dim_linear = 0;
    Index dim_nonlinear = 0;
    Index total_dim = 0;
    Index required_depth = 0; // deepest delay any slot reads
    std::vector<FeatureTerm> term_index;
};

/// History view: state(j) is the observation j steps before the newest one.
class DelayWindow {
public:
    /// `history` columns are in time order; `now` indexes the newest column.
    DelayWindow(const Eigen::MatrixXd& history, Index now) : data_(history), now_(now) {
        if (now < 0 || now >= history.cols())
            throw InsufficientHistoryError("DelayWindow: now index out of range");
    }
    explicit DelayWindow(const Eigen::MatrixXd& history)
        : DelayWindow(history, history.cols() - 1) {}

    Index q() const { return data_.rows(); }
    Index max_delay() const { return now_; }

    Eigen::Ref<const Eigen::VectorXd> state(Index delay) const {
        if (delay < 0 || delay > now_)
            throw InsufficientHistoryError("DelayWindow: delay " + std::to_string(delay) +
                                           " exceeds available history " + std::to_string(now_));
        return data_.col(now_ - delay);
    }

private:
    const Eigen::MatrixXd& data_;
    Index now_;
};

namespace detail {

inline Index wrap_dim(Index i, Index q, NeighborWrap wrap) {
    if (wrap == NeighborWrap::periodic) return (i % q + q) % q;
    return std::clamp<Index>(i, 0, q - 1);
}

inline void append_heng_block_terms(std::vector<FeatureTerm>& terms, Index i, Index j, Index q,
                                    NeighborWrap wrap) {
    const Index lo = wrap_dim(i - 1, q, wrap);
    const Index hi = wrap_dim(i + 1, q, wrap);
    const Index partner_dim[3] = {lo, i, hi};
    for (Index delay_b : {j, j + 1})
        for (Index b = 0; b < 3; ++b)
            terms.push_back({FeatureTerm::Kind::product, i, j, partner_dim[b], delay_b});
}

} // namespace detail

/// Exact feature accounting for a configuration. HENG-RC keeps the duplicated
/// same-time neighbor products, so its nonlinear count is exactly 6*q*k
/// (6*k for the first_dim_only variant); NG-RC's is d(d+1)/2 with d=q(k+1).
inline FeatureMap plan_features(const FeatureConfig& config) {
    config.validate();
    FeatureMap map;
    map.config = config;
    map.dim_constant = config.include_constant ? 1 : 0;

    std::vector<FeatureTerm>& terms = map.term_index;
    if (map.dim_constant) terms.push_back({FeatureTerm::Kind::constant, -1, -1, -1, -1});

    if (config.family == FeatureFamily::esn_state) {
        map.dim_linear = config.q;
        map.dim_nonlinear = 0;
        map.required_depth = 0;
        for (Index i = 0; i < config.q; ++i)
            terms.push_back({FeatureTerm::Kind::linear, i, 0, -1, -1});
        map.total_dim = map.dim_constant + map.dim_linear;
        return map;
    }

    const Index q = config.q, k = config.k;
    map.dim_linear = q * (k + 1);
    for (Index delay = 0; delay <= k; ++delay)
        for (Index i = 0; i < q; ++i)
            terms.push_back({FeatureTerm::Kind::linear, i, delay, -1, -1});

    if (config.family == FeatureFamily::ng_rc) {
        const Index d = map.dim_linear;
        map.dim_nonlinear = d * (d + 1) / 2;
        map.required_depth = k;
        for (Index a = 0; a < d; ++a)
            for (Index b = a; b < d; ++b)
                terms.push_back({FeatureTerm::Kind::product, a % q, a / q, b % q, b / q});
    } else {
        const Index start = config.heng_delay_start;
        const bool full = config.heng_variant == HengVariant::full;
        map.dim_nonlinear = (full ? 6 * q : 6) * k;
        map.required_depth = std::max(k, start + k);
        for (Index j = start; j < start + k; ++j) {
            if (full) {
                for (Index i = 0; i < q; ++i)
                    detail::append_heng_block_terms(terms, i, j, q, config.neighbor_wrap);
            } else {
                detail::append_heng_block_terms(terms, 0, j, q, config.neighbor_wrap);
            }
        }
    }
    map.total_dim = map.dim_constant + map.dim_linear + map.dim_nonlinear;
    return map;
}

/// Linear block u(t) .. u(t-k), delay-major.
inline Eigen::VectorXd build_linear(const DelayWindow& window, Index q, Index k) {
    if (window.q() != q) throw DimensionError("build_linear: window dimension != q");
    if (window.max_delay() < k)
        throw InsufficientHistoryError("build_linear: window depth < k");
    Eigen::VectorXd out(q * (k + 1));
    for (Index delay = 0; delay <= k; ++delay) out.segment(delay * q, q) = window.state(delay);
    return out;
}

inline Eigen::VectorXd build_linear(const DelayWindow& window, const FeatureConfig& config) {
    config.validate();
    return build_linear(window, config.q, config.k);
}

/// All unordered pairwise products of the linear block, lexicographic in
/// (a, b) with a <= b; length d(d+1)/2.
inline Eigen::VectorXd build_ngrc_nonlinear(const Eigen::VectorXd& linear) {
    const Index d = linear.size();
    if (d < 1) throw DimensionError("build_ngrc_nonlinear: empty linear block");
    Eigen::VectorXd out(d * (d + 1) / 2);
    Index slot = 0;
    for (Index a = 0; a < d; ++a) {
        const double va = linear[a];
        for (Index b = a; b < d; ++b) out[slot++] = va * linear[b];
    }
    return out;
}

/// Neighbor-coupled products: for every delay block j and dimension i, the
/// six products of the state at (i, j) with the three spatial neighbors at
/// delays j and j+1. Same-time duplicates across adjacent i are kept so the
/// count stays exactly 6*q per block.
inline Eigen::VectorXd build_heng_nonlinear(const DelayWindow& window,
                                            const FeatureConfig& config) {
    config.validate();
    if (config.family != FeatureFamily::heng_rc)
        throw ConfigError("build_heng_nonlinear: config family is not heng_rc");
    if (window.q() != config.q) throw DimensionError("build_heng_nonlinear: window dimension != q");
    const Index start = config.heng_delay_start;
    if (window.max_delay() < start + config.k)
        throw InsufficientHistoryError("build_heng_nonlinear: window depth < " +
                                       std::to_string(start + config.k));

    const Index q = config.q;
    const bool full = config.heng_variant == HengVariant::full;
    Eigen::VectorXd out((full ? 6 * q : 6) * config.k);
    Index slot = 0;
    for (Index j = start; j < start + config.k; ++j) {
        const auto same = window.state(j);
        const auto prev = window.state(j + 1);
        const Index i_end = full ? q : 1;
        for (Index i = 0; i < i_end; ++i) {
            const Index lo = detail::wrap_dim(i - 1, q, config.neighbor_wrap);
            const Index hi = detail::wrap_dim(i + 1, q, config.neighbor_wrap);
            const double center = same[i];
            out[slot++] = center * same[lo];
            out[slot++] = center * same[i];
            out[slot++] = center * same[hi];
            out[slot++] = center * prev[lo];
            out[slot++] = center * prev[i];
            out[slot++] = center * prev[hi];
        }
    }
    return out;
}

/// Write the full feature vector for `map` into `out` (length total_dim).
inline void assemble_into(const DelayWindow& window, const FeatureMap& map,
                          Eigen::Ref<Eigen::VectorXd> out) {
    if (map.config.family == FeatureFamily::esn_state)
        throw ConfigError("assemble: esn_state features come from reservoir dynamics, not windows");
    if (out.size() != map.total_dim) throw DimensionError("assemble: output size != total_dim");
    if (window.max_delay() < map.required_depth)
        throw InsufficientHistoryError("assemble: window depth " +
                                       std::to_string(window.max_delay()) + " < required " +
                                       std::to_string(map.required_depth));
    Index offset = 0;
    if (map.dim_constant) out[offset++] = map.config.constant_value;
    out.segment(offset, map.dim_linear) = build_linear(window, map.config.q, map.config.k);
    offset += map.dim_linear;
    if (map.config.family == FeatureFamily::ng_rc)
        out.segment(offset, map.dim_nonlinear) =
            build_ngrc_nonlinear(out.segment(offset - map.dim_linear, map.dim_linear));
    else
        out.segment(offset, map.dim_nonlinear) = build_heng_nonlinear(window, map.config);
}

/// Constant + linear + nonlinear blocks concatenated; slot meanings match
/// map.term_index.
inline Eigen::VectorXd assemble(const DelayWindow& window, const FeatureMap& map) {
    Eigen::VectorXd out(map.total_dim);
    assemble_into(window, map, out);
    return out;
}

/// Independent slot oracle: evaluate one term_index entry over a window.
inline double evaluate_term(const DelayWindow& window, const FeatureTerm& term,
                            double constant_value) {
    switch (term.kind) {
        case FeatureTerm::Kind::constant: return constant_value;
        case FeatureTerm::Kind::linear: return window.state(term.delay_a)[term.dim_a];
        case FeatureTerm::Kind::product:
            return window.state(term.delay_a)[term.dim_a] * window.state(term.delay_b)[term.dim_b];
    }
    throw ConfigError("evaluate_term: unknown term kind");
}

/// Feature columns for every valid time index of the series plus the aligned
/// targets; feature column c sits at time t = required_depth + c and predicts
/// the state at t + 1.
struct FeatureDataset {
    Eigen::MatrixXd features; // total_dim x n
    Eigen::MatrixXd targets;  // q x n
    Index first_time = 0;     // series column of the first feature vector
};

inline FeatureDataset featurize_series(const TimeSeries& series, const FeatureMap& map,
                                       TargetMode target_mode = TargetMode::next_state) {
    series.validate();
    if (series.q() != map.config.q)
        throw DimensionError("featurize_series: series dimension != config q");
    const Index depth = map.required_depth;
    const Index n = series.steps() - 1 - depth;
    if (n < 1)
        throw SeriesTooShortError("featurize_series: need more than " + std::to_string(depth + 1) +
                                  " columns, got " + std::to_string(series.steps()));

    FeatureDataset ds;
    ds.first_time = depth;
    ds.features.resize(map.total_dim, n);
    ds.targets.resize(series.q(), n);
    for (Index c = 0; c < n; ++c) {
        const Index t = depth + c;
        DelayWindow window(series.data, t);
        assemble_into(window, map, ds.features.col(c));
        if (target_mode == TargetMode::next_state)
            ds.targets.col(c) = series.data.col(t + 1);
        else
            ds.targets.col(c) = series.data.col(t + 1) - series.data.col(t);
    }
    return ds;
}

/// term_index as CSV (slot,kind,dim_a,delay_a,dim_b,delay_b) for debugging.
inline std::string term_index_csv(const FeatureMap& map) {
    std::string out = "slot,kind,dim_a,delay_a,dim_b,delay_b\n";
    for (std::size_t s = 0; s < map.term_index.size(); ++s) {
        const FeatureTerm& t = map.term_index[s];
        const char* kind = t.kind == FeatureTerm::Kind::constant ? "constant"
                           : t.kind == FeatureTerm::Kind::linear ? "linear"
                                                                 : "product";
        out += std::to_string(s) + ',' + kind + ',' + std::to_string(t.dim_a) + ',' +
               std::to_string(t.delay_a) + ',' + std::to_string(t.dim_b) + ',' +
               std::to_string(t.delay_b) + '\n';
    }
    return out;
}

} // namespace chaoscast
