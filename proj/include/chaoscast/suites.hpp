#pragma once

#include <string>
#include <vector>

#include "chaoscast/bench.hpp"

// Preset reproduction studies. Each suite returns the experiment reports plus
// pass/fail gates for the bounds the study is expected to meet; informational
// rows (published state counts that cannot be reconciled with the counting
// rules) are flagged in the gate detail instead of being forced.

namespace chaoscast {

struct GateResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<ExperimentReport> reports;
    std::vector<GateResult> gates;
};

inline nlohmann::json suite_json(const SuiteResult& result) {
    nlohmann::json j;
    j["suite"] = result.suite;
    j["experiments"] = nlohmann::json::array();
    for (const ExperimentReport& r : result.reports) j["experiments"].push_back(report_json(r));
    j["gates"] = nlohmann::json::array();
    for (const GateResult& g : result.gates)
        j["gates"].push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
    return j;
}

inline bool suite_passed(const SuiteResult& result) {
    for (const GateResult& g : result.gates)
        if (!g.passed) return false;
    return true;
}

// ------------------------------------------------------------ spec builders
//
// The lambda values, delay offsets and training sizes below were fixed by a
// desk-scale sweep on held-out seeds; every knob is an ExperimentSpec field,
// so custom configs can override them.

/// Lorenz neighbor-coupled model used for the trace reproductions: the full
/// neighbor map over two delay blocks (45 states), products anchored at the
/// current state.
inline ExperimentSpec lorenz_heng_spec(Index training_steps, std::uint64_t seed) {
    ExperimentSpec s;
    s.name = "heng_rc_lorenz_" + std::to_string(training_steps);
    s.system = SystemKind::lorenz;
    s.family = ModelKind::heng_rc;
    s.features.family = FeatureFamily::heng_rc;
    s.features.q = 3;
    s.features.k = 2;
    s.features.heng_variant = HengVariant::full;
    s.features.heng_delay_start = 0;
    s.features.neighbor_wrap = NeighborWrap::periodic;
    s.lambda = 1e-5;
    s.training_steps = training_steps;
    s.prediction_steps = 3000;
    s.n_trials = 10;
    s.theta = 0.3;
    s.theta_sweep = {0.2, 0.5};
    s.seed = seed;
    return s;
}

/// The published 12-state Lorenz configuration: 6 linear terms (k=1) plus the
/// 6 first-dimension products reaching the current state.
inline ExperimentSpec lorenz_heng12_spec(Index training_steps, std::uint64_t seed) {
    ExperimentSpec s = lorenz_heng_spec(training_steps, seed);
    s.name = "heng_rc12_lorenz_" + std::to_string(training_steps);
    s.features.k = 1;
    s.features.heng_variant = HengVariant::first_dim_only;
    s.lambda = 1e-3;
    s.target_mode = TargetMode::delta;
    return s;
}

inline ExperimentSpec lorenz_ngrc_spec(Index training_steps, std::uint64_t seed) {
    ExperimentSpec s = lorenz_heng_spec(training_steps, seed);
    s.name = "ng_rc_lorenz_" + std::to_string(training_steps);
    s.family = ModelKind::ng_rc;
    s.features = FeatureConfig{};
    s.features.family = FeatureFamily::ng_rc;
    s.features.q = 3;
    s.features.k = 1;
    s.lambda = 1e-3;
    return s;
}

inline ExperimentSpec lorenz_esn_spec(Index training_steps, std::uint64_t seed) {
    ExperimentSpec s = lorenz_heng_spec(training_steps, seed);
    s.name = "esn_lorenz_" + std::to_string(training_steps);
    s.family = ModelKind::esn;
    s.esn.n_nodes = 28;
    s.esn.leak_rate = 0.6;
    s.esn.spectral_radius = 1.1;
    s.esn.input_scale = 0.02;
    s.esn.bias_scale = 0.1;
    s.esn.connectivity_degree = 3.0;
    s.esn_washout = 100;
    s.lambda = 1e-5;
    return s;
}

inline ExperimentSpec ks_heng_spec(double domain_length, Index grid_points, Index training_steps,
                                   std::uint64_t seed) {
    ExperimentSpec s;
    s.name = "heng_rc_ks_L" + std::to_string(static_cast<int>(domain_length));
    s.system = SystemKind::ks;
    s.ks.domain_length = domain_length;
    s.ks.grid_points = grid_points;
    s.ks.dt = 0.25;
    s.ks.transient_steps = 1000;
    s.family = ModelKind::heng_rc;
    s.features.family = FeatureFamily::heng_rc;
    s.features.q = grid_points;
    s.features.k = 2;
    s.features.heng_variant = HengVariant::full;
    s.features.heng_delay_start = 0;
    s.features.include_constant = true;
    s.lambda = 1e-2;
    s.normalize = true;
    s.training_steps = training_steps;
    s.prediction_steps = 1200;
    s.n_trials = 5;
    s.theta = 0.3;
    s.seed = seed;
    s.estimate_lyap = true;
    s.lyap_horizon = 12000.0;
    return s;
}

inline ExperimentSpec ks_ngrc_spec(Index training_steps, std::uint64_t seed) {
    ExperimentSpec s = ks_heng_spec(22.0, 64, training_steps, seed);
    s.name = "ng_rc_ks_L22";
    s.family = ModelKind::ng_rc;
    s.features = FeatureConfig{};
    s.features.family = FeatureFamily::ng_rc;
    s.features.q = 64;
    s.features.k = 1;
    s.lambda = 1e-2;
    return s;
}

// ------------------------------------------------------------------ suites

/// State-count reproduction. Exact checks for the published NG-RC total and
/// the 6Qk neighbor-product counts; the published neighbor-model totals
/// (904/3592/7176) do not decompose into any constant/linear/nonlinear split
/// of the counting rules and are flagged, not forced.
inline SuiteResult run_suite_counts() {
    SuiteResult result;
    result.suite = "counts";

    auto gate = [&result](const std::string& name, bool ok, const std::string& detail) {
        result.gates.push_back({name, ok, detail});
    };

    FeatureConfig ng;
    ng.family = FeatureFamily::ng_rc;
    ng.q = 64;
    ng.k = 1;
    const FeatureMap ng_map = plan_features(ng);
    gate("ngrc_q64_k1_total_8384", ng_map.total_dim == 8384,
         "total " + std::to_string(ng_map.total_dim) + " (linear " +
             std::to_string(ng_map.dim_linear) + " + nonlinear " +
             std::to_string(ng_map.dim_nonlinear) + "), published 8384");

    struct Row {
        Index q, k;
        Index expected_nonlinear;
        double paper_total;
    };
    const Row rows[] = {{64, 2, 768, 904.0}, {256, 2, 3072, 3592.0}, {512, 2, 6144, 7176.0}};
    for (const Row& row : rows) {
        FeatureConfig heng;
        heng.family = FeatureFamily::heng_rc;
        heng.q = row.q;
        heng.k = row.k;
        heng.include_constant = true;
        heng.heng_delay_start = 0;
        const FeatureMap map = plan_features(heng);
        gate("heng_q" + std::to_string(row.q) + "_k" + std::to_string(row.k) + "_nonlinear_6Qk",
             map.dim_nonlinear == row.expected_nonlinear,
             "nonlinear " + std::to_string(map.dim_nonlinear) + " == 6*" + std::to_string(row.q) +
                 "*" + std::to_string(row.k));
        gate("heng_q" + std::to_string(row.q) + "_total_flag", true,
             "our total " + std::to_string(map.total_dim) + " (1 + " +
                 std::to_string(map.dim_linear) + " + " + std::to_string(map.dim_nonlinear) +
                 ") vs published " + format_double(row.paper_total) +
                 " = 14Q+8; no configuration reproduces the published split -- flagged, not forced");
    }

    // neighbor products must undercut the full outer product on every
    // published configuration
    struct Cfg {
        Index q, k;
    };
    for (const Cfg c : {Cfg{3, 1}, Cfg{64, 1}, Cfg{64, 2}, Cfg{256, 2}, Cfg{512, 2}}) {
        const Index d = c.q * (c.k + 1);
        const bool ok = 6 * c.q * c.k < d * (d + 1) / 2;
        gate("count_advantage_q" + std::to_string(c.q) + "_k" + std::to_string(c.k), ok,
             std::to_string(6 * c.q * c.k) + " < " + std::to_string(d * (d + 1) / 2));
    }
    return result;
}

/// Lorenz prediction quality: neighbor-coupled model vs full outer product at
/// 400 and 800 training steps, paired data, ratio-based gates.
inline SuiteResult run_suite_fig2(std::uint64_t seed) {
    SuiteResult result;
    result.suite = "fig2";
    const ComparisonTable t400 =
        compare_suite({lorenz_ngrc_spec(400, seed), lorenz_heng_spec(400, seed)});
    const ComparisonTable t800 =
        compare_suite({lorenz_ngrc_spec(800, seed), lorenz_heng_spec(800, seed)});
    for (const auto& r : t400.reports) result.reports.push_back(r);
    for (const auto& r : t800.reports) result.reports.push_back(r);

    const double ng400 = t400.reports[0].median_valid_steps[0];
    const double heng400 = t400.reports[1].median_valid_steps[0];
    const double ng800 = t800.reports[0].median_valid_steps[0];
    const double heng800 = t800.reports[1].median_valid_steps[0];

    result.gates.push_back({"heng400_vs_ngrc400", heng400 >= 0.9 * ng400,
                            "median heng " + format_double(heng400) + " vs 0.9 * ngrc " +
                                format_double(ng400)});
    result.gates.push_back({"heng400_at_least_500_steps", heng400 >= 500.0,
                            "median heng valid steps " + format_double(heng400) + " >= 500"});
    result.gates.push_back({"heng_improves_with_data", heng800 > heng400,
                            format_double(heng800) + " > " + format_double(heng400)});
    result.gates.push_back({"ngrc_improves_with_data", ng800 > ng400,
                            format_double(ng800) + " > " + format_double(ng400)});
    return result;
}

/// Reservoir baseline vs the 12-state neighbor model at training lengths of
/// 2, 4 and 8 time units; ordering must hold at two of the three thresholds.
inline SuiteResult run_suite_table1(std::uint64_t seed) {
    SuiteResult result;
    result.suite = "table1";
    for (Index training : {200, 400, 800}) {
        ExperimentSpec esn = lorenz_esn_spec(training, seed);
        ExperimentSpec heng = lorenz_heng12_spec(training, seed);
        esn.theta_sweep = {0.2, 0.5};
        heng.theta_sweep = {0.2, 0.5};
        const ComparisonTable table = compare_suite({esn, heng});
        const ExperimentReport& re = table.reports[0];
        const ExperimentReport& rh = table.reports[1];
        result.reports.push_back(re);
        result.reports.push_back(rh);
        int wins = 0;
        std::string detail;
        for (std::size_t i = 0; i < re.thetas.size(); ++i) {
            const bool win = rh.median_valid_steps[i] >= re.median_valid_steps[i];
            wins += win ? 1 : 0;
            detail += "theta " + format_double(re.thetas[i]) + ": heng " +
                      format_double(rh.median_valid_steps[i]) + (win ? " >= " : " < ") + "esn " +
                      format_double(re.median_valid_steps[i]) + "; ";
        }
        result.gates.push_back({"heng_beats_esn_training_" + std::to_string(training), wins >= 2,
                                detail + std::to_string(wins) + "/3 thresholds"});
    }
    return result;
}

/// KS L=22 prediction quality in Lyapunov times.
inline SuiteResult run_suite_ks22(std::uint64_t seed) {
    SuiteResult result;
    result.suite = "ks22";
    ExperimentSpec spec = ks_heng_spec(22.0, 64, 5000, seed);
    const ExperimentReport report = run_experiment(spec);
    result.reports.push_back(report);
    result.gates.push_back(
        {"ks22_median_valid_ge_4_lyapunov", report.median_valid_lyapunov(0) >= 4.0,
         "median " + format_double(report.median_valid_lyapunov(0)) + " Lyapunov times (lambda " +
             format_double(report.lyap ? report.lyap->lambda_max : 0.0) + ")"});
    return result;
}

/// KS L=200 at desk scale (Q=256): must train and hold one Lyapunov time.
inline SuiteResult run_suite_ks200(std::uint64_t seed) {
    SuiteResult result;
    result.suite = "ks200";
    ExperimentSpec spec = ks_heng_spec(200.0, 256, 10000, seed);
    spec.lambda = 1e-1;
    spec.n_trials = 2;
    spec.lyap_horizon = 3000.0;
    spec.prediction_steps = 600;
    const ExperimentReport report = run_experiment(spec);
    result.reports.push_back(report);
    result.gates.push_back(
        {"ks200_median_valid_ge_1_lyapunov", report.median_valid_lyapunov(0) >= 1.0,
         "median " + format_double(report.median_valid_lyapunov(0)) + " Lyapunov times (lambda " +
             format_double(report.lyap ? report.lyap->lambda_max : 0.0) +
             "); published stretch figure is 4"});
    return result;
}

/// Training-cost ordering on identical KS L=22 data. Published ratio is about
/// 25x; the gate only requires 5x.
inline SuiteResult run_suite_efficiency(std::uint64_t seed) {
    SuiteResult result;
    result.suite = "efficiency";
    ExperimentSpec ng = ks_ngrc_spec(3000, seed);
    ExperimentSpec heng = ks_heng_spec(22.0, 64, 3000, seed);
    ng.n_trials = 1;
    heng.n_trials = 1;
    ng.prediction_steps = 400;
    heng.prediction_steps = 400;
    ng.estimate_lyap = false;
    heng.estimate_lyap = false;
    ng.paper_states = 8384.0;
    heng.paper_states = 904.0;
    const ComparisonTable table = compare_suite({ng, heng});
    result.reports = table.reports;
    const double ng_cost = table.reports[0].time_cost_train;
    const double heng_cost = table.reports[1].time_cost_train;
    result.gates.push_back({"heng_train_cost_le_fifth_of_ngrc", heng_cost <= ng_cost / 5.0,
                            "heng " + format_double(heng_cost) + " s vs ngrc " +
                                format_double(ng_cost) + " s (ratio " +
                                format_double(ng_cost / std::max(heng_cost, 1e-12)) + "x)"});
    return result;
}

/// Computational-efficiency table: our own timings for the reservoir,
/// full-outer-product and neighbor-coupled models across the published
/// (L, Q) grid. Orderings and ratios are meaningful; absolute seconds are
/// hardware-bound and never compared against the published numbers.
inline SuiteResult run_suite_table2(std::uint64_t seed) {
    SuiteResult result;
    result.suite = "table2";

    ExperimentSpec esn = ks_heng_spec(22.0, 64, 3000, seed);
    esn.name = "esn_ks_L22";
    esn.family = ModelKind::esn;
    esn.esn.n_nodes = 3968;
    esn.esn.spectral_radius = 0.9;
    esn.esn.input_scale = 0.1;
    esn.esn.bias_scale = 0.1;
    esn.esn.connectivity_degree = 3.0;
    esn.esn_washout = 200;
    esn.lambda = 1e-6;
    esn.n_trials = 1;
    esn.prediction_steps = 400;
    esn.estimate_lyap = false;
    esn.paper_states = 3968.0;

    ExperimentSpec ng = ks_ngrc_spec(3000, seed);
    ng.n_trials = 1;
    ng.prediction_steps = 400;
    ng.estimate_lyap = false;
    ng.paper_states = 8384.0;

    ExperimentSpec heng22 = ks_heng_spec(22.0, 64, 3000, seed);
    heng22.n_trials = 1;
    heng22.prediction_steps = 400;
    heng22.estimate_lyap = false;
    heng22.paper_states = 904.0;

    ExperimentSpec heng200 = ks_heng_spec(200.0, 256, 3000, seed);
    heng200.lambda = 1e-1;
    heng200.n_trials = 1;
    heng200.prediction_steps = 400;
    heng200.estimate_lyap = false;
    heng200.paper_states = 3592.0;

    ExperimentSpec heng400 = ks_heng_spec(400.0, 512, 3000, seed);
    heng400.lambda = 1e-1;
    heng400.n_trials = 1;
    heng400.prediction_steps = 400;
    heng400.estimate_lyap = false;
    heng400.paper_states = 7176.0;

    for (const ExperimentSpec& spec : {esn, ng, heng22, heng200, heng400})
        result.reports.push_back(run_experiment(spec));

    const double ng_cost = result.reports[1].time_cost_train;
    const double heng_cost = result.reports[2].time_cost_train;
    result.gates.push_back({"heng_fastest_at_L22", heng_cost <= ng_cost / 5.0,
                            "train cost ratio ngrc/heng = " +
                                format_double(ng_cost / std::max(heng_cost, 1e-12))});
    for (std::size_t i = 2; i < result.reports.size(); ++i) {
        const ExperimentReport& r = result.reports[i];
        result.gates.push_back(
            {r.spec.name + "_state_count_flag", true,
             "our states " + std::to_string(r.states) + " vs published " +
                 format_double(*r.spec.paper_states) + "; gap flagged, not forced"});
    }
    return result;
}

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "counts") return run_suite_counts();
    if (name == "fig2") return run_suite_fig2(seed);
    if (name == "table1") return run_suite_table1(seed);
    if (name == "ks22") return run_suite_ks22(seed);
    if (name == "ks200") return run_suite_ks200(seed);
    if (name == "efficiency") return run_suite_efficiency(seed);
    if (name == "table2") return run_suite_table2(seed);
    throw ConfigError("unknown suite '" + name +
                      "' (known: counts, fig2, table1, ks22, ks200, efficiency, table2)");
}

} // namespace chaoscast
