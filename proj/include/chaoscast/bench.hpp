#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaoscast/errors.hpp"
#include "chaoscast/io.hpp"
#include "chaoscast/kuramoto_sivashinsky.hpp"
#include "chaoscast/lorenz.hpp"
#include "chaoscast/lyapunov.hpp"
#include "chaoscast/metrics.hpp"
#include "chaoscast/readout.hpp"

namespace chaoscast {

enum class SystemKind { lorenz, ks, constant };
enum class ModelKind { heng_rc, ng_rc, esn };

/// Diagnostic fixed-point system: u(t) = value in every dimension.
struct ConstantParams {
    Index q = 3;
    double dt = 0.01;
    double value = 1.0;
};

struct ExperimentSpec {
    std::string name;
    SystemKind system = SystemKind::lorenz;
    LorenzParams lorenz;
    KsParams ks;
    ConstantParams constant;

    ModelKind family = ModelKind::heng_rc;
    FeatureConfig features;
    EsnConfig esn;
    Index esn_washout = 100;

    double lambda = 1e-6;
    TargetMode target_mode = TargetMode::next_state;
    bool normalize = false;

    Index training_steps = 400;
    Index warmup_steps = 0; // 0 = automatic (window depth; full training span for ESN)
    Index prediction_steps = 1000;
    Index n_trials = 10;
    double theta = 0.3;
    std::vector<double> theta_sweep;
    std::uint64_t seed = 0;

    bool estimate_lyap = false;
    double lyap_horizon = 1000.0;
    std::optional<double> paper_states; // published state count, when one exists

    Index system_dim() const {
        switch (system) {
            case SystemKind::lorenz: return 3;
            case SystemKind::ks: return ks.grid_points;
            case SystemKind::constant: return constant.q;
        }
        return 0;
    }

    double system_dt() const {
        switch (system) {
            case SystemKind::lorenz: return lorenz.dt;
            case SystemKind::ks: return ks.dt;
            case SystemKind::constant: return constant.dt;
        }
        return 0.0;
    }

    void validate() const {
        if (n_trials < 1) throw ConfigError("ExperimentSpec: n_trials must be >= 1");
        if (training_steps < 1 || prediction_steps < 1)
            throw ConfigError("ExperimentSpec: training/prediction steps must be >= 1");
        if (!(theta > 0.0)) throw ConfigError("ExperimentSpec: theta must be > 0");
        if (lambda < 0.0) throw ConfigError("ExperimentSpec: lambda must be >= 0");
        if (system == SystemKind::lorenz) lorenz.validate();
        if (system == SystemKind::ks) ks.validate();
        if (family == ModelKind::esn) {
            esn.validate();
            if (esn_washout < 0 || esn_washout >= training_steps)
                throw ConfigError("ExperimentSpec: esn_washout must be < training_steps");
        } else {
            features.validate();
            if (features.q != system_dim())
                throw ConfigError("ExperimentSpec: features.q (" + std::to_string(features.q) +
                                  ") != system dimension (" + std::to_string(system_dim()) + ")");
        }
    }
};

struct TrialResult {
    Index trial = 0;
    std::uint64_t data_seed = 0;
    bool failed = false;
    std::string failure;
    bool truncated = false;
    double fit_rmse = 0.0;
    double t_featurize = 0.0;
    double t_solve = 0.0;
    double t_predict = 0.0;
    std::vector<ValidTimeReport> valid; // one per threshold, main theta first
};

struct ExperimentReport {
    ExperimentSpec spec;
    Index states = 0;
    std::optional<LyapunovEstimate> lyap;
    std::vector<double> thetas;
    std::vector<TrialResult> trials;

    // medians over successful trials, per threshold
    std::vector<double> median_valid_steps;
    std::vector<double> min_valid_steps;
    std::vector<double> max_valid_steps;
    double median_t_featurize = 0.0;
    double median_t_solve = 0.0;
    double time_cost_train = 0.0; // median featurize + solve
    double time_cost_total = 0.0; // train + predict, median
    Index n_failed = 0;

    double median_valid_seconds(std::size_t theta_idx = 0) const {
        return median_valid_steps.at(theta_idx) * spec.system_dt();
    }
    double median_valid_lyapunov(std::size_t theta_idx = 0) const {
        return lyap ? median_valid_seconds(theta_idx) * lyap->lambda_max : 0.0;
    }
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Ground-truth series for one trial: training_steps + prediction_steps + 1
/// columns, deterministic in (spec system params, spec.seed, trial).
inline TimeSeries generate_trial_series(const ExperimentSpec& spec, Index trial) {
    const Index total = spec.training_steps + spec.prediction_steps;
    const std::uint64_t data_seed = derive_seed(spec.seed, "trial-data", static_cast<std::uint64_t>(trial));
    switch (spec.system) {
        case SystemKind::lorenz: {
            LorenzParams p = spec.lorenz;
            Rng rng(derive_seed(data_seed, "lorenz-ic"));
            Eigen::Vector3d u = p.initial_state;
            for (int i = 0; i < 3; ++i) u[i] += rng.uniform(-0.5, 0.5);
            // settle onto the attractor before recording
            for (int i = 0; i < 2000; ++i) u = lorenz_step(u, p, p.dt);
            p.initial_state = u;
            return lorenz_generate(p, total);
        }
        case SystemKind::ks:
            return ks_generate(spec.ks, total, data_seed);
        case SystemKind::constant: {
            TimeSeries s;
            s.dt = spec.constant.dt;
            s.data = Eigen::MatrixXd::Constant(spec.constant.q, total + 1, spec.constant.value);
            return s;
        }
    }
    throw ConfigError("generate_trial_series: unknown system");
}

inline Index experiment_states(const ExperimentSpec& spec) {
    if (spec.family == ModelKind::esn) return spec.esn.n_nodes;
    return plan_features(spec.features).total_dim;
}

/// Run all trials of one experiment: generate, split, train, closed-loop
/// predict, score. Per-trial blow-ups are recorded, not fatal. Deterministic
/// given spec.seed.
inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentReport report;
    report.spec = spec;
    report.states = experiment_states(spec);

    report.thetas.push_back(spec.theta);
    for (double th : spec.theta_sweep)
        if (std::find(report.thetas.begin(), report.thetas.end(), th) == report.thetas.end())
            report.thetas.push_back(th);

    if (spec.estimate_lyap) {
        const std::uint64_t lyap_seed = derive_seed(spec.seed, "lyapunov");
        if (spec.system == SystemKind::lorenz)
            report.lyap = estimate_lyapunov(spec.lorenz, spec.lyap_horizon, lyap_seed);
        else if (spec.system == SystemKind::ks)
            report.lyap = estimate_lyapunov(spec.ks, spec.lyap_horizon, lyap_seed);
    }

    const FeatureMap map = spec.family == ModelKind::esn ? FeatureMap{} : plan_features(spec.features);

    for (Index trial = 0; trial < spec.n_trials; ++trial) {
        TrialResult tr;
        tr.trial = trial;
        tr.data_seed = derive_seed(spec.seed, "trial-data", static_cast<std::uint64_t>(trial));
        try {
            const TimeSeries series = generate_trial_series(spec, trial);
            const TimeSeries training = series.slice(0, spec.training_steps + 1);
            const TimeSeries truth = series.slice(spec.training_steps + 1, spec.prediction_steps);

            EsnConfig esn_cfg = spec.esn; // per-trial reservoir seed
            esn_cfg.seed = derive_seed(spec.seed, "esn-reservoir", static_cast<std::uint64_t>(trial));

            TrainOptions topts;
            topts.normalize = spec.normalize;
            TrainResult trained =
                spec.family == ModelKind::esn
                    ? esn_train(training, esn_cfg, spec.lambda, spec.esn_washout, spec.target_mode, topts)
                    : train(training, map, spec.lambda, spec.target_mode, topts);
            tr.fit_rmse = trained.summary.fit_rmse;
            tr.t_featurize = trained.summary.wall_clock_featurize;
            tr.t_solve = trained.summary.wall_clock_train;

            Index warm_cols = spec.warmup_steps > 0 ? spec.warmup_steps + 1 : 0;
            if (warm_cols == 0)
                warm_cols = spec.family == ModelKind::esn
                                ? training.steps()
                                : trained.model.feature_map.required_depth + 1;
            warm_cols = std::min(warm_cols, training.steps());
            const TimeSeries warmup = training.slice(training.steps() - warm_cols, warm_cols);

            const auto t0 = detail::Clock::now();
            ClosedLoopResult pred = predict(trained.model, warmup, spec.prediction_steps);
            tr.t_predict = detail::seconds_since(t0);
            tr.truncated = pred.truncated;

            const std::vector<double> curve = normalized_error(truth, pred.series);
            for (double th : report.thetas)
                tr.valid.push_back(valid_time_from_curve(curve, truth.dt, th, report.lyap));
        } catch (const Error& e) {
            tr.failed = true;
            tr.failure = e.what();
            ++report.n_failed;
        }
        report.trials.push_back(std::move(tr));
    }

    std::vector<double> feat_times, solve_times, total_times;
    for (std::size_t idx = 0; idx < report.thetas.size(); ++idx) {
        std::vector<double> steps;
        for (const TrialResult& tr : report.trials)
            if (!tr.failed) steps.push_back(static_cast<double>(tr.valid[idx].valid_steps));
        report.median_valid_steps.push_back(detail::median(steps));
        report.min_valid_steps.push_back(steps.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                       : *std::min_element(steps.begin(), steps.end()));
        report.max_valid_steps.push_back(steps.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                       : *std::max_element(steps.begin(), steps.end()));
    }
    for (const TrialResult& tr : report.trials) {
        if (tr.failed) continue;
        feat_times.push_back(tr.t_featurize);
        solve_times.push_back(tr.t_solve);
        total_times.push_back(tr.t_featurize + tr.t_solve + tr.t_predict);
    }
    report.median_t_featurize = detail::median(feat_times);
    report.median_t_solve = detail::median(solve_times);
    report.time_cost_train = report.median_t_featurize + report.median_t_solve;
    report.time_cost_total = detail::median(total_times);
    return report;
}

// ------------------------------------------------------------- comparison

struct ComparisonTable {
    std::vector<ExperimentReport> reports;
};

/// Run several specs on bitwise-identical data (trial seeds derive only from
/// spec.seed, so specs sharing system and seed see the same trajectories).
inline ComparisonTable compare_suite(const std::vector<ExperimentSpec>& specs) {
    if (specs.size() < 2) throw ConfigError("compare_suite: need at least two specs");
    for (const ExperimentSpec& s : specs) {
        if (s.system != specs[0].system || s.seed != specs[0].seed)
            throw ConfigError("compare_suite: specs disagree on system or seed (paired data required)");
        const bool same_params =
            (s.system == SystemKind::lorenz &&
             s.lorenz.sigma == specs[0].lorenz.sigma && s.lorenz.rho == specs[0].lorenz.rho &&
             s.lorenz.beta == specs[0].lorenz.beta && s.lorenz.dt == specs[0].lorenz.dt &&
             s.lorenz.initial_state == specs[0].lorenz.initial_state) ||
            (s.system == SystemKind::ks &&
             s.ks.domain_length == specs[0].ks.domain_length &&
             s.ks.grid_points == specs[0].ks.grid_points && s.ks.dt == specs[0].ks.dt &&
             s.ks.transient_steps == specs[0].ks.transient_steps) ||
            s.system == SystemKind::constant;
        if (!same_params)
            throw ConfigError("compare_suite: specs disagree on system parameters");
    }
    ComparisonTable table;
    for (const ExperimentSpec& s : specs) table.reports.push_back(run_experiment(s));
    return table;
}

// ---------------------------------------------------------------- reports

inline const char* system_name(SystemKind s) {
    switch (s) {
        case SystemKind::lorenz: return "lorenz";
        case SystemKind::ks: return "ks";
        case SystemKind::constant: return "constant";
    }
    return "?";
}

inline const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::heng_rc: return "heng_rc";
        case ModelKind::ng_rc: return "ng_rc";
        case ModelKind::esn: return "esn";
    }
    return "?";
}

/// One row per trial plus summary rows.
inline std::string report_csv(const ExperimentReport& r) {
    std::string out = "row,trial,theta,valid_steps,valid_seconds,valid_lyapunov_times,"
                      "fit_rmse,t_featurize,t_solve,t_predict,failed,truncated\n";
    for (const TrialResult& tr : r.trials) {
        for (std::size_t i = 0; i < r.thetas.size(); ++i) {
            out += "trial," + std::to_string(tr.trial) + ',' + format_double(r.thetas[i]) + ',';
            if (tr.failed)
                out += ",,,";
            else
                out += std::to_string(tr.valid[i].valid_steps) + ',' +
                       format_double(tr.valid[i].valid_seconds) + ',' +
                       format_double(tr.valid[i].valid_lyapunov_times) + ',';
            out += format_double(tr.fit_rmse) + ',' + format_double(tr.t_featurize) + ',' +
                   format_double(tr.t_solve) + ',' + format_double(tr.t_predict) + ',' +
                   (tr.failed ? "1" : "0") + ',' + (tr.truncated ? "1" : "0") + '\n';
        }
    }
    for (std::size_t i = 0; i < r.thetas.size(); ++i) {
        out += "median," + std::to_string(-1) + ',' + format_double(r.thetas[i]) + ',' +
               format_double(r.median_valid_steps[i]) + ',' +
               format_double(r.median_valid_steps[i] * r.spec.system_dt()) + ',' +
               format_double(r.median_valid_lyapunov(i)) + ",,," + "," + ",,\n";
    }
    return out;
}

inline nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["name"] = r.spec.name;
    j["system"] = system_name(r.spec.system);
    j["model"] = model_name(r.spec.family);
    j["states"] = r.states;
    if (r.spec.paper_states) {
        j["paper_states"] = *r.spec.paper_states;
        j["states_match_paper"] = static_cast<double>(r.states) == *r.spec.paper_states;
    }
    j["n_trials"] = r.spec.n_trials;
    j["n_failed"] = r.n_failed;
    j["training_steps"] = r.spec.training_steps;
    j["prediction_steps"] = r.spec.prediction_steps;
    j["lambda"] = r.spec.lambda;
    j["seed"] = r.spec.seed;
    if (r.lyap) {
        j["lyapunov"] = {{"lambda_max", r.lyap->lambda_max},
                         {"lyapunov_time", r.lyap->lyapunov_time},
                         {"n_renormalizations", r.lyap->n_renormalizations}};
    }
    j["time_cost_train_s"] = r.time_cost_train;
    j["time_cost_total_s"] = r.time_cost_total;
    j["t_featurize_median_s"] = r.median_t_featurize;
    j["t_solve_median_s"] = r.median_t_solve;
    nlohmann::json per_theta = nlohmann::json::array();
    for (std::size_t i = 0; i < r.thetas.size(); ++i) {
        nlohmann::json row;
        row["theta"] = r.thetas[i];
        row["median_valid_steps"] = r.median_valid_steps[i];
        row["min_valid_steps"] = r.min_valid_steps[i];
        row["max_valid_steps"] = r.max_valid_steps[i];
        row["median_valid_seconds"] = r.median_valid_steps[i] * r.spec.system_dt();
        if (r.lyap) row["median_valid_lyapunov_times"] = r.median_valid_lyapunov(i);
        per_theta.push_back(row);
    }
    j["valid_time"] = per_theta;
    return j;
}

inline std::string comparison_csv(const ComparisonTable& table) {
    std::string out = "name,model,system,states,paper_states,training_steps,theta,"
                      "median_valid_steps,median_valid_seconds,median_valid_lyapunov_times,"
                      "t_featurize_s,t_solve_s,time_cost_train_s,n_failed\n";
    for (const ExperimentReport& r : table.reports) {
        for (std::size_t i = 0; i < r.thetas.size(); ++i) {
            out += r.spec.name + ',' + model_name(r.spec.family) + ',' +
                   system_name(r.spec.system) + ',' + std::to_string(r.states) + ',' +
                   (r.spec.paper_states ? format_double(*r.spec.paper_states) : std::string()) +
                   ',' + std::to_string(r.spec.training_steps) + ',' +
                   format_double(r.thetas[i]) + ',' + format_double(r.median_valid_steps[i]) +
                   ',' + format_double(r.median_valid_steps[i] * r.spec.system_dt()) + ',' +
                   format_double(r.median_valid_lyapunov(i)) + ',' +
                   format_double(r.median_t_featurize) + ',' + format_double(r.median_t_solve) +
                   ',' + format_double(r.time_cost_train) + ',' + std::to_string(r.n_failed) +
                   '\n';
        }
    }
    // pairwise ratios against the first row (identical data by construction)
    const ExperimentReport& base = table.reports.front();
    for (std::size_t k = 1; k < table.reports.size(); ++k) {
        const ExperimentReport& r = table.reports[k];
        out += "ratio_vs_" + base.spec.name + ',' + r.spec.name + ",,,,,,";
        out += format_double(r.median_valid_steps[0] / base.median_valid_steps[0]) + ",,,,,";
        out += format_double(r.time_cost_train / base.time_cost_train) + ",\n";
    }
    return out;
}

inline nlohmann::json comparison_json(const ComparisonTable& table) {
    nlohmann::json j;
    j["experiments"] = nlohmann::json::array();
    for (const ExperimentReport& r : table.reports) j["experiments"].push_back(report_json(r));
    nlohmann::json ratios = nlohmann::json::array();
    for (std::size_t a = 0; a < table.reports.size(); ++a)
        for (std::size_t b = 0; b < table.reports.size(); ++b) {
            if (a == b) continue;
            const ExperimentReport& ra = table.reports[a];
            const ExperimentReport& rb = table.reports[b];
            nlohmann::json row;
            row["numerator"] = ra.spec.name;
            row["denominator"] = rb.spec.name;
            row["time_cost_train_ratio"] = ra.time_cost_train / rb.time_cost_train;
            row["median_valid_steps_ratio"] = ra.median_valid_steps[0] / rb.median_valid_steps[0];
            ratios.push_back(row);
        }
    j["ratios"] = ratios;
    return j;
}

/// Plot-ready data for one trial: truth, prediction, difference field and
/// error curve (CSV; the difference field also as CCTS for heatmap tools).
inline void export_trial_artifacts(const ExperimentSpec& spec, Index trial,
                                   const std::string& prefix) {
    const TimeSeries series = generate_trial_series(spec, trial);
    const TimeSeries training = series.slice(0, spec.training_steps + 1);
    const TimeSeries truth = series.slice(spec.training_steps + 1, spec.prediction_steps);

    EsnConfig esn_cfg = spec.esn;
    esn_cfg.seed = derive_seed(spec.seed, "esn-reservoir", static_cast<std::uint64_t>(trial));
    TrainOptions topts;
    topts.normalize = spec.normalize;
    const TrainResult trained =
        spec.family == ModelKind::esn
            ? esn_train(training, esn_cfg, spec.lambda, spec.esn_washout, spec.target_mode, topts)
            : train(training, plan_features(spec.features), spec.lambda, spec.target_mode, topts);

    Index warm_cols = spec.warmup_steps > 0 ? spec.warmup_steps + 1 : 0;
    if (warm_cols == 0)
        warm_cols = spec.family == ModelKind::esn ? training.steps()
                                                  : trained.model.feature_map.required_depth + 1;
    warm_cols = std::min(warm_cols, training.steps());
    const TimeSeries warmup = training.slice(training.steps() - warm_cols, warm_cols);
    const ClosedLoopResult pred = predict(trained.model, warmup, spec.prediction_steps);

    save_series_csv(prefix + "_truth.csv", truth);
    if (pred.series.steps() > 0) {
        save_series_csv(prefix + "_prediction.csv", pred.series);
        const TimeSeries truth_cut = truth.slice(0, pred.series.steps());
        const TimeSeries diff = difference_field(truth_cut, pred.series);
        save_series_csv(prefix + "_difference.csv", diff);
        save_ccts(prefix + "_difference.ccts", diff);
        const std::vector<double> curve = normalized_error(truth, pred.series);
        std::string csv = "step,t,epsilon\n";
        for (std::size_t i = 0; i < curve.size(); ++i)
            csv += std::to_string(i) + ',' +
                   format_double(truth.time_at(static_cast<Index>(i))) + ',' +
                   format_double(curve[i]) + '\n';
        write_text_file(prefix + "_error_curve.csv", csv);
    }
}

// ------------------------------------------------------------ JSON config

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

} // namespace detail

inline nlohmann::json spec_to_json(const ExperimentSpec& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["system"] = system_name(s.system);
    if (s.system == SystemKind::lorenz)
        j["lorenz"] = {{"sigma", s.lorenz.sigma},
                       {"rho", s.lorenz.rho},
                       {"beta", s.lorenz.beta},
                       {"dt", s.lorenz.dt},
                       {"initial_state",
                        {s.lorenz.initial_state[0], s.lorenz.initial_state[1],
                         s.lorenz.initial_state[2]}}};
    if (s.system == SystemKind::ks)
        j["ks"] = {{"domain_length", s.ks.domain_length},
                   {"grid_points", s.ks.grid_points},
                   {"dt", s.ks.dt},
                   {"transient_steps", s.ks.transient_steps}};
    if (s.system == SystemKind::constant)
        j["constant"] = {{"q", s.constant.q}, {"dt", s.constant.dt}, {"value", s.constant.value}};
    j["family"] = model_name(s.family);
    if (s.family == ModelKind::esn) {
        j["esn"] = {{"n_nodes", s.esn.n_nodes},
                    {"leak_rate", s.esn.leak_rate},
                    {"spectral_radius", s.esn.spectral_radius},
                    {"input_scale", s.esn.input_scale},
                    {"bias_scale", s.esn.bias_scale},
                    {"connectivity_degree", s.esn.connectivity_degree}};
        j["esn_washout"] = s.esn_washout;
    } else {
        j["features"] = {{"q", s.features.q},
                         {"k", s.features.k},
                         {"include_constant", s.features.include_constant},
                         {"constant_value", s.features.constant_value},
                         {"neighbor_wrap",
                          s.features.neighbor_wrap == NeighborWrap::periodic ? "periodic" : "clamped"},
                         {"heng_variant",
                          s.features.heng_variant == HengVariant::full ? "full" : "first_dim_only"},
                         {"heng_delay_start", s.features.heng_delay_start}};
    }
    j["lambda"] = s.lambda;
    j["target_mode"] = s.target_mode == TargetMode::delta ? "delta" : "next_state";
    j["normalize"] = s.normalize;
    j["training_steps"] = s.training_steps;
    j["warmup_steps"] = s.warmup_steps;
    j["prediction_steps"] = s.prediction_steps;
    j["n_trials"] = s.n_trials;
    j["theta"] = s.theta;
    j["theta_sweep"] = s.theta_sweep;
    j["seed"] = s.seed;
    j["estimate_lyapunov"] = s.estimate_lyap;
    j["lyapunov_horizon"] = s.lyap_horizon;
    if (s.paper_states) j["paper_states"] = *s.paper_states;
    return j;
}

/// Strict parse: unknown keys are rejected so config typos cannot silently
/// change an experiment.
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"name", "system", "lorenz", "ks", "constant", "family", "features", "esn", "esn_washout",
         "lambda", "target_mode", "normalize", "training_steps", "warmup_steps", "prediction_steps",
         "n_trials", "theta", "theta_sweep", "seed", "estimate_lyapunov", "lyapunov_horizon",
         "paper_states"},
        "experiment config");
    ExperimentSpec s;
    s.name = j.value("name", std::string("experiment"));
    const std::string sys = j.value("system", std::string("lorenz"));
    if (sys == "lorenz")
        s.system = SystemKind::lorenz;
    else if (sys == "ks")
        s.system = SystemKind::ks;
    else if (sys == "constant")
        s.system = SystemKind::constant;
    else
        throw ConfigError("unknown system '" + sys + "'");

    if (j.contains("lorenz")) {
        const auto& lj = j.at("lorenz");
        detail::reject_unknown_keys(lj, {"sigma", "rho", "beta", "dt", "initial_state"}, "lorenz");
        s.lorenz.sigma = lj.value("sigma", s.lorenz.sigma);
        s.lorenz.rho = lj.value("rho", s.lorenz.rho);
        s.lorenz.beta = lj.value("beta", s.lorenz.beta);
        s.lorenz.dt = lj.value("dt", s.lorenz.dt);
        if (lj.contains("initial_state")) {
            const auto v = lj.at("initial_state").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("lorenz initial_state must have 3 entries");
            s.lorenz.initial_state = Eigen::Vector3d(v[0], v[1], v[2]);
        }
    }
    if (j.contains("ks")) {
        const auto& kj = j.at("ks");
        detail::reject_unknown_keys(kj, {"domain_length", "grid_points", "dt", "transient_steps"},
                                    "ks");
        s.ks.domain_length = kj.value("domain_length", s.ks.domain_length);
        s.ks.grid_points = kj.value("grid_points", s.ks.grid_points);
        s.ks.dt = kj.value("dt", s.ks.dt);
        s.ks.transient_steps = kj.value("transient_steps", s.ks.transient_steps);
    }
    if (j.contains("constant")) {
        const auto& cj = j.at("constant");
        detail::reject_unknown_keys(cj, {"q", "dt", "value"}, "constant");
        s.constant.q = cj.value("q", s.constant.q);
        s.constant.dt = cj.value("dt", s.constant.dt);
        s.constant.value = cj.value("value", s.constant.value);
    }

    const std::string fam = j.value("family", std::string("heng_rc"));
    if (fam == "heng_rc")
        s.family = ModelKind::heng_rc;
    else if (fam == "ng_rc")
        s.family = ModelKind::ng_rc;
    else if (fam == "esn")
        s.family = ModelKind::esn;
    else
        throw ConfigError("unknown model family '" + fam + "'");

    if (j.contains("features")) {
        const auto& fj = j.at("features");
        detail::reject_unknown_keys(fj,
                                    {"q", "k", "include_constant", "constant_value",
                                     "neighbor_wrap", "heng_variant", "heng_delay_start"},
                                    "features");
        s.features.q = fj.value("q", s.system_dim());
        s.features.k = fj.value("k", 1);
        s.features.include_constant = fj.value("include_constant", false);
        s.features.constant_value = fj.value("constant_value", 1.0);
        const std::string wrap = fj.value("neighbor_wrap", std::string("periodic"));
        if (wrap == "periodic")
            s.features.neighbor_wrap = NeighborWrap::periodic;
        else if (wrap == "clamped")
            s.features.neighbor_wrap = NeighborWrap::clamped;
        else
            throw ConfigError("unknown neighbor_wrap '" + wrap + "'");
        const std::string variant = fj.value("heng_variant", std::string("full"));
        if (variant == "full")
            s.features.heng_variant = HengVariant::full;
        else if (variant == "first_dim_only")
            s.features.heng_variant = HengVariant::first_dim_only;
        else
            throw ConfigError("unknown heng_variant '" + variant + "'");
        s.features.heng_delay_start = fj.value("heng_delay_start", 1);
    } else if (s.family != ModelKind::esn) {
        s.features.q = s.system_dim();
    }
    s.features.family =
        s.family == ModelKind::ng_rc ? FeatureFamily::ng_rc : FeatureFamily::heng_rc;

    if (j.contains("esn")) {
        const auto& ej = j.at("esn");
        detail::reject_unknown_keys(ej,
                                    {"n_nodes", "leak_rate", "spectral_radius", "input_scale",
                                     "bias_scale", "connectivity_degree"},
                                    "esn");
        s.esn.n_nodes = ej.value("n_nodes", s.esn.n_nodes);
        s.esn.leak_rate = ej.value("leak_rate", s.esn.leak_rate);
        s.esn.spectral_radius = ej.value("spectral_radius", s.esn.spectral_radius);
        s.esn.input_scale = ej.value("input_scale", s.esn.input_scale);
        s.esn.bias_scale = ej.value("bias_scale", s.esn.bias_scale);
        s.esn.connectivity_degree = ej.value("connectivity_degree", s.esn.connectivity_degree);
    }
    s.esn_washout = j.value("esn_washout", s.esn_washout);
    s.lambda = j.value("lambda", s.lambda);
    const std::string mode = j.value("target_mode", std::string("next_state"));
    if (mode == "next_state")
        s.target_mode = TargetMode::next_state;
    else if (mode == "delta")
        s.target_mode = TargetMode::delta;
    else
        throw ConfigError("unknown target_mode '" + mode + "'");
    s.normalize = j.value("normalize", false);
    s.training_steps = j.value("training_steps", s.training_steps);
    s.warmup_steps = j.value("warmup_steps", s.warmup_steps);
    s.prediction_steps = j.value("prediction_steps", s.prediction_steps);
    s.n_trials = j.value("n_trials", s.n_trials);
    s.theta = j.value("theta", s.theta);
    s.theta_sweep = j.value("theta_sweep", std::vector<double>{});
    s.seed = j.value("seed", std::uint64_t{0});
    s.estimate_lyap = j.value("estimate_lyapunov", false);
    s.lyap_horizon = j.value("lyapunov_horizon", s.lyap_horizon);
    if (j.contains("paper_states")) s.paper_states = j.at("paper_states").get<double>();
    s.validate();
    return s;
}

} // namespace chaoscast
