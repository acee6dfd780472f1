// chaoscast command-line front end: trajectory generation, training,
// closed-loop prediction and the benchmark suites, all seeded and replayable.
// Every run that writes files also writes a manifest with the fully resolved
// configuration and content hashes of inputs and outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaoscast/chaoscast.hpp"

namespace cc = chaoscast;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// CHAOSCAST_OUT_DIR reroutes relative output paths.
std::string resolve_out(const std::string& path) {
    const char* base = std::getenv("CHAOSCAST_OUT_DIR");
    if (base && *base && fs::path(path).is_relative()) return (fs::path(base) / path).string();
    return path;
}

void write_manifest(const std::string& command, const json& config,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                    const std::string& manifest_path) {
    json m;
    m["tool"] = std::string("chaoscast ") + cc::kVersion;
    m["command"] = command;
    m["config"] = config;
    json in = json::object(), out = json::object();
    for (const std::string& p : inputs) in[p] = cc::fnv1a64_hex(p);
    for (const std::string& p : outputs) out[p] = cc::fnv1a64_hex(p);
    m["inputs"] = in;
    m["outputs"] = out;
    cc::write_text_file(manifest_path, m.dump(2) + "\n");
}

struct TrainArgs {
    std::string data;
    std::string out;
    std::string family = "heng_rc";
    cc::Index k = 1;
    double lambda = 1e-6;
    std::string target = "next_state";
    bool normalize = false;
    bool constant = false;
    double constant_value = 1.0;
    std::string variant = "full";
    std::string wrap = "periodic";
    cc::Index delay_start = 1;
    // esn
    cc::Index nodes = 100;
    double leak = 1.0;
    double spectral_radius = 0.9;
    double input_scale = 0.1;
    double bias_scale = 0.1;
    double degree = 3.0;
    cc::Index washout = 100;
    std::uint64_t seed = 0;
};

cc::TargetMode parse_target(const std::string& s) {
    if (s == "next_state") return cc::TargetMode::next_state;
    if (s == "delta") return cc::TargetMode::delta;
    throw cc::ConfigError("unknown target mode '" + s + "'");
}

int cmd_train(const TrainArgs& a) {
    const cc::TimeSeries series = cc::load_series(a.data);
    const std::string out = resolve_out(a.out);

    cc::TrainOptions opts;
    opts.normalize = a.normalize;
    cc::TrainResult result;
    json config{{"data", a.data},         {"family", a.family},   {"lambda", a.lambda},
                {"target_mode", a.target}, {"normalize", a.normalize}, {"seed", a.seed}};

    if (a.family == "esn") {
        cc::EsnConfig esn;
        esn.n_nodes = a.nodes;
        esn.leak_rate = a.leak;
        esn.spectral_radius = a.spectral_radius;
        esn.input_scale = a.input_scale;
        esn.bias_scale = a.bias_scale;
        esn.connectivity_degree = a.degree;
        esn.seed = a.seed;
        result = cc::esn_train(series, esn, a.lambda, a.washout, parse_target(a.target), opts);
        config["esn"] = {{"n_nodes", esn.n_nodes},
                         {"leak_rate", esn.leak_rate},
                         {"spectral_radius", esn.spectral_radius},
                         {"input_scale", esn.input_scale},
                         {"bias_scale", esn.bias_scale},
                         {"connectivity_degree", esn.connectivity_degree},
                         {"washout", a.washout}};
    } else {
        cc::FeatureConfig fc;
        fc.family = a.family == "ng_rc" ? cc::FeatureFamily::ng_rc : cc::FeatureFamily::heng_rc;
        if (a.family != "ng_rc" && a.family != "heng_rc")
            throw cc::ConfigError("unknown family '" + a.family + "'");
        fc.q = series.q();
        fc.k = a.k;
        fc.include_constant = a.constant;
        fc.constant_value = a.constant_value;
        fc.neighbor_wrap =
            a.wrap == "clamped" ? cc::NeighborWrap::clamped : cc::NeighborWrap::periodic;
        fc.heng_variant =
            a.variant == "first_dim_only" ? cc::HengVariant::first_dim_only : cc::HengVariant::full;
        fc.heng_delay_start = a.delay_start;
        const cc::FeatureMap map = cc::plan_features(fc);
        result = cc::train(series, map, a.lambda, parse_target(a.target), opts);
        config["features"] = {{"q", fc.q},
                              {"k", fc.k},
                              {"include_constant", fc.include_constant},
                              {"neighbor_wrap", a.wrap},
                              {"heng_variant", a.variant},
                              {"heng_delay_start", fc.heng_delay_start},
                              {"total_dim", map.total_dim}};
    }
    for (const std::string& w : result.summary.warnings) std::cerr << "warning: " << w << '\n';
    cc::save_ccmd(out, result.model);
    std::cout << "trained on " << result.summary.n_samples << " samples, fit rmse "
              << result.summary.fit_rmse << ", featurize " << result.summary.wall_clock_featurize
              << " s, solve " << result.summary.wall_clock_train << " s\n";
    write_manifest("train", config, {a.data}, {out}, out + ".manifest.json");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaoscast: model-free forecasting of chaotic systems"};
    app.require_subcommand(1);

    // ------------------------------------------------------------ generate
    auto* gen = app.add_subcommand("generate", "generate a ground-truth trajectory");
    gen->require_subcommand(1);

    struct {
        cc::Index steps = 1000;
        double dt = 0.01;
        double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
        std::vector<double> x0{1.0, 1.0, 1.0};
        std::uint64_t seed = 0;
        std::string out;
    } gl;
    auto* gen_lorenz = gen->add_subcommand("lorenz", "three-variable convection system");
    gen_lorenz->add_option("--steps", gl.steps, "number of integration steps");
    gen_lorenz->add_option("--dt", gl.dt, "time step");
    gen_lorenz->add_option("--sigma", gl.sigma);
    gen_lorenz->add_option("--rho", gl.rho);
    gen_lorenz->add_option("--beta", gl.beta);
    gen_lorenz->add_option("--initial", gl.x0, "initial state (3 values)")->expected(3);
    gen_lorenz->add_option("--seed", gl.seed, "perturbs the initial state when nonzero");
    gen_lorenz->add_option("--out", gl.out, "output path (.csv or .ccts)")->required();

    struct {
        double L = 22.0;
        cc::Index Q = 64;
        cc::Index steps = 5000;
        double dt = 0.25;
        cc::Index transient = 1000;
        std::uint64_t seed = 0;
        std::string out;
    } gk;
    auto* gen_ks = gen->add_subcommand("ks", "Kuramoto-Sivashinsky field on a periodic grid");
    gen_ks->add_option("--L", gk.L, "domain length");
    gen_ks->add_option("--Q", gk.Q, "grid points (even)");
    gen_ks->add_option("--steps", gk.steps, "post-transient steps");
    gen_ks->add_option("--dt", gk.dt, "time step");
    gen_ks->add_option("--transient", gk.transient, "discarded warm-up steps");
    gen_ks->add_option("--seed", gk.seed, "seed for the initial profile");
    gen_ks->add_option("--out", gk.out, "output path (.csv or .ccts)")->required();

    // --------------------------------------------------------------- train
    TrainArgs ta;
    auto* tr = app.add_subcommand("train", "fit a readout on a trajectory file");
    tr->add_option("--data", ta.data, "training series (.csv or .ccts)")->required();
    tr->add_option("--out", ta.out, "model output path (.ccmd)")->required();
    tr->add_option("--family", ta.family, "heng_rc | ng_rc | esn");
    tr->add_option("--k", ta.k, "delay blocks");
    auto* lambda_opt =
        tr->add_option("--lambda", ta.lambda, "ridge parameter (default 1e-6; 1e-4 for ng_rc)");
    tr->add_option("--target", ta.target, "next_state | delta");
    tr->add_flag("--normalize", ta.normalize, "z-score per dimension before fitting");
    tr->add_flag("--constant", ta.constant, "include a constant feature");
    tr->add_option("--constant-value", ta.constant_value);
    tr->add_option("--variant", ta.variant, "heng_rc: full | first_dim_only");
    tr->add_option("--wrap", ta.wrap, "heng_rc: periodic | clamped");
    tr->add_option("--delay-start", ta.delay_start, "heng_rc: first product block (0 or 1)");
    tr->add_option("--nodes", ta.nodes, "esn: reservoir size");
    tr->add_option("--leak", ta.leak, "esn: leak rate");
    tr->add_option("--spectral-radius", ta.spectral_radius);
    tr->add_option("--input-scale", ta.input_scale);
    tr->add_option("--bias-scale", ta.bias_scale);
    tr->add_option("--degree", ta.degree, "esn: mean nonzeros per row");
    tr->add_option("--washout", ta.washout, "esn: discarded initial pairs");
    tr->add_option("--seed", ta.seed, "esn: reservoir seed");

    // ------------------------------------------------------------- predict
    struct {
        std::string model, warmup, out, truth;
        cc::Index steps = 1000;
        double theta = 0.3;
        std::string error_out, diff_out;
    } pa;
    auto* pr = app.add_subcommand("predict", "closed-loop continuation from a warmup series");
    pr->add_option("--model", pa.model, "model file (.ccmd)")->required();
    pr->add_option("--warmup", pa.warmup, "series supplying the history window")->required();
    pr->add_option("--steps", pa.steps, "prediction steps");
    pr->add_option("--out", pa.out, "predicted series output")->required();
    pr->add_option("--truth", pa.truth, "optional ground truth to score against");
    pr->add_option("--theta", pa.theta, "valid-time threshold");
    pr->add_option("--error-out", pa.error_out, "error-curve CSV (needs --truth)");
    pr->add_option("--diff-out", pa.diff_out, "difference-field CSV (needs --truth)");

    // --------------------------------------------------------------- bench
    struct {
        std::string suite, config, out = "bench_out";
        std::uint64_t seed = 7;
        bool export_traces = false;
    } ba;
    auto* be = app.add_subcommand("bench", "run a reproduction suite or a config-driven experiment");
    be->add_option("--suite", ba.suite, "counts | fig2 | table1 | ks22 | ks200 | efficiency | table2");
    be->add_option("--config", ba.config, "experiment config (JSON)");
    be->add_option("--out", ba.out, "output directory");
    auto* seed_opt = be->add_option("--seed", ba.seed, "root seed");
    be->add_flag("--export-traces", ba.export_traces, "also write trial-0 truth/prediction/difference files");

    // ----------------------------------------------------------- model ...
    auto* mo = app.add_subcommand("model", "model utilities");
    mo->require_subcommand(1);
    struct {
        std::string model, terms_out;
    } mi;
    auto* insp = mo->add_subcommand("inspect", "print a model summary");
    insp->add_option("--model", mi.model, "model file (.ccmd)")->required();
    insp->add_option("--terms-out", mi.terms_out, "write the feature term index as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_lorenz->parsed()) {
            cc::LorenzParams p;
            p.sigma = gl.sigma;
            p.rho = gl.rho;
            p.beta = gl.beta;
            p.dt = gl.dt;
            p.initial_state = Eigen::Vector3d(gl.x0[0], gl.x0[1], gl.x0[2]);
            if (gl.seed != 0) {
                cc::Rng rng(cc::derive_seed(gl.seed, "lorenz-ic"));
                for (int i = 0; i < 3; ++i) p.initial_state[i] += rng.uniform(-0.5, 0.5);
            }
            const cc::TimeSeries series = cc::lorenz_generate(p, gl.steps);
            const std::string out = resolve_out(gl.out);
            cc::save_series(out, series);
            std::cout << "wrote " << series.q() << "x" << series.steps() << " series to " << out
                      << '\n';
            json config{{"system", "lorenz"}, {"steps", gl.steps}, {"dt", gl.dt},
                        {"sigma", gl.sigma},  {"rho", gl.rho},     {"beta", gl.beta},
                        {"initial", gl.x0},   {"seed", gl.seed}};
            write_manifest("generate", config, {}, {out}, out + ".manifest.json");
            return 0;
        }
        if (gen_ks->parsed()) {
            cc::KsParams p;
            p.domain_length = gk.L;
            p.grid_points = gk.Q;
            p.dt = gk.dt;
            p.transient_steps = gk.transient;
            const cc::TimeSeries series = cc::ks_generate(p, gk.steps, gk.seed);
            const std::string out = resolve_out(gk.out);
            cc::save_series(out, series);
            std::cout << "wrote " << series.q() << "x" << series.steps() << " series to " << out
                      << '\n';
            json config{{"system", "ks"},   {"L", gk.L},        {"Q", gk.Q},
                        {"steps", gk.steps}, {"dt", gk.dt},      {"transient", gk.transient},
                        {"seed", gk.seed}};
            write_manifest("generate", config, {}, {out}, out + ".manifest.json");
            return 0;
        }
        if (tr->parsed()) {
            if (lambda_opt->count() == 0 && ta.family == "ng_rc") ta.lambda = 1e-4;
            return cmd_train(ta);
        }
        if (pr->parsed()) {
            const cc::ReadoutModel model = cc::load_ccmd(pa.model);
            const cc::TimeSeries warmup = cc::load_series(pa.warmup);
            cc::TimeSeries truth;
            const bool have_truth = !pa.truth.empty();
            if (have_truth) truth = cc::load_series(pa.truth);

            const cc::ClosedLoopResult result = cc::predict(model, warmup, pa.steps);
            if (result.truncated)
                std::cerr << "warning: prediction hit the divergence guard after "
                          << result.series.steps() << " steps\n";
            const std::string out = resolve_out(pa.out);
            std::vector<std::string> outputs;
            if (result.series.steps() > 0) {
                cc::save_series(out, result.series);
                outputs.push_back(out);
            }
            if (have_truth && result.series.steps() > 0) {
                const cc::ValidTimeReport vt = cc::valid_time(truth, result.series, pa.theta);
                std::cout << "valid steps at theta " << pa.theta << ": " << vt.valid_steps << " ("
                          << vt.valid_seconds << " s)\n";
                if (!pa.error_out.empty()) {
                    std::string csv = "step,t,epsilon\n";
                    for (std::size_t i = 0; i < vt.error_curve.size(); ++i)
                        csv += std::to_string(i) + ',' +
                               cc::format_double(truth.time_at(static_cast<cc::Index>(i))) + ',' +
                               cc::format_double(vt.error_curve[i]) + '\n';
                    const std::string epath = resolve_out(pa.error_out);
                    cc::write_text_file(epath, csv);
                    outputs.push_back(epath);
                }
                if (!pa.diff_out.empty()) {
                    const cc::TimeSeries cut = truth.slice(0, result.series.steps());
                    const std::string dpath = resolve_out(pa.diff_out);
                    cc::save_series(dpath, cc::difference_field(cut, result.series));
                    outputs.push_back(dpath);
                }
            }
            json config{{"model", pa.model}, {"warmup", pa.warmup}, {"steps", pa.steps},
                        {"theta", pa.theta},  {"truth", pa.truth}};
            std::vector<std::string> inputs{pa.model, pa.warmup};
            if (have_truth) inputs.push_back(pa.truth);
            write_manifest("predict", config, inputs, outputs, out + ".manifest.json");
            return 0;
        }
        if (be->parsed()) {
            if (ba.suite.empty() == ba.config.empty())
                throw cc::ConfigError("bench: pass exactly one of --suite or --config");
            const std::string dir = resolve_out(ba.out);
            fs::create_directories(dir);
            std::vector<std::string> outputs;

            if (!ba.suite.empty()) {
                const cc::SuiteResult result = cc::run_suite(ba.suite, ba.seed);
                const std::string jpath = dir + "/" + ba.suite + "_report.json";
                cc::write_text_file(jpath, cc::suite_json(result).dump(2) + "\n");
                outputs.push_back(jpath);
                if (!result.reports.empty()) {
                    cc::ComparisonTable table{result.reports};
                    const std::string cpath = dir + "/" + ba.suite + "_comparison.csv";
                    cc::write_text_file(cpath, cc::comparison_csv(table));
                    outputs.push_back(cpath);
                }
                if (ba.export_traces) {
                    for (const cc::ExperimentReport& r : result.reports) {
                        const std::string prefix = dir + "/" + r.spec.name;
                        cc::export_trial_artifacts(r.spec, 0, prefix);
                        outputs.push_back(prefix + "_truth.csv");
                    }
                }
                for (const cc::GateResult& g : result.gates)
                    std::cout << (g.passed ? "[PASS] " : "[FAIL] ") << g.name << ": " << g.detail
                              << '\n';
                json config{{"suite", ba.suite}, {"seed", ba.seed}};
                write_manifest("bench", config, {}, outputs, dir + "/manifest.json");
                if (!cc::suite_passed(result)) return 1;
                return 0;
            }

            std::ifstream in(ba.config);
            if (!in) throw cc::IoError("cannot open config: " + ba.config);
            json cj = json::parse(in);
            cc::ExperimentSpec spec = cc::spec_from_json(cj);
            if (seed_opt->count() > 0) spec.seed = ba.seed; // flags override config values
            const cc::ExperimentReport report = cc::run_experiment(spec);
            const std::string jpath = dir + "/" + spec.name + "_report.json";
            const std::string cpath = dir + "/" + spec.name + "_trials.csv";
            cc::write_text_file(jpath, cc::report_json(report).dump(2) + "\n");
            cc::write_text_file(cpath, cc::report_csv(report));
            outputs = {jpath, cpath};
            if (ba.export_traces) {
                cc::export_trial_artifacts(spec, 0, dir + "/" + spec.name);
                outputs.push_back(dir + "/" + spec.name + "_truth.csv");
            }
            std::cout << "median valid steps at theta " << spec.theta << ": "
                      << report.median_valid_steps[0] << " (" << report.n_failed << " failed trials)\n";
            write_manifest("bench", cc::spec_to_json(spec), {ba.config}, outputs,
                           dir + "/manifest.json");
            return 0;
        }
        if (insp->parsed()) {
            const cc::ReadoutModel model = cc::load_ccmd(mi.model);
            std::cout << "model: " << mi.model << '\n'
                      << cc::model_text_block(model)
                      << "target_mode: "
                      << (model.target_mode == cc::TargetMode::delta ? "delta" : "next_state")
                      << '\n'
                      << "lambda: " << model.lambda << '\n'
                      << "w_out: " << model.w_out.rows() << " x " << model.w_out.cols() << '\n';
            if (!mi.terms_out.empty() && !model.is_esn()) {
                const std::string tpath = resolve_out(mi.terms_out);
                cc::write_text_file(tpath, cc::term_index_csv(model.feature_map));
                std::cout << "wrote term index to " << tpath << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
