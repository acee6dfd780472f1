#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "chaoscast/chaoscast.hpp"

using namespace chaoscast;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("chaoscast_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

TimeSeries random_series(Index q, Index t, std::uint64_t seed, double dt = 0.25) {
    Rng rng(seed);
    TimeSeries s;
    s.dt = dt;
    s.data.resize(q, t);
    for (Index i = 0; i < s.data.size(); ++i) s.data.data()[i] = rng.uniform(-10.0, 10.0);
    return s;
}

} // namespace

TEST_CASE("ccts round trip preserves every bit") {
    const TimeSeries s = random_series(5, 123, 1);
    std::stringstream buffer;
    write_ccts(buffer, s);
    const TimeSeries loaded = read_ccts(buffer);
    REQUIRE(loaded.data == s.data);
    REQUIRE(loaded.dt == s.dt);
    REQUIRE(loaded.q() == 5);
    REQUIRE(loaded.steps() == 123);
}

TEST_CASE("ccts header layout is byte-stable") {
    TimeSeries s;
    s.dt = 0.25;
    s.data = Eigen::MatrixXd::Zero(2, 3);
    std::stringstream buffer;
    write_ccts(buffer, s);
    const std::string bytes = buffer.str();
    REQUIRE(bytes.size() == 4 + 4 + 4 + 8 + 8 + 2 * 3 * 8);
    REQUIRE(bytes.substr(0, 4) == "CCTS");
    REQUIRE(static_cast<unsigned char>(bytes[4]) == 1); // version LE
    REQUIRE(static_cast<unsigned char>(bytes[8]) == 2); // Q LE
    REQUIRE(static_cast<unsigned char>(bytes[12]) == 3); // T LE
}

TEST_CASE("ccts rejects malformed input") {
    std::stringstream bad_magic(std::string("XXTS") + std::string(100, '\0'));
    REQUIRE_THROWS_AS(read_ccts(bad_magic), IoError);

    const TimeSeries s = random_series(3, 10, 2);
    std::stringstream buffer;
    write_ccts(buffer, s);
    std::string bytes = buffer.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    REQUIRE_THROWS_AS(read_ccts(truncated), IoError);

    bytes[4] = 9; // unsupported version
    std::stringstream versioned(bytes);
    REQUIRE_THROWS_AS(read_ccts(versioned), IoError);
}

TEST_CASE("csv series round trip is bit-exact") {
    const TimeSeries s = random_series(4, 60, 3, 0.01);
    std::stringstream buffer;
    write_series_csv(buffer, s);
    const std::string text = buffer.str();
    REQUIRE(text.rfind("t,x1,x2,x3,x4\n", 0) == 0);

    std::stringstream in(text);
    const TimeSeries loaded = read_series_csv(in);
    REQUIRE(loaded.data == s.data);
    REQUIRE(loaded.dt == s.dt);
    REQUIRE(loaded.origin_time == s.origin_time);
}

TEST_CASE("csv reader rejects ragged and headerless input") {
    std::stringstream no_header("1,2,3\n");
    REQUIRE_THROWS_AS(read_series_csv(no_header), IoError);
    std::stringstream ragged("t,x1,x2\n0,1,2\n0.5,1\n");
    REQUIRE_THROWS_AS(read_series_csv(ragged), IoError);
    std::stringstream junk("t,x1\n0,abc\n");
    REQUIRE_THROWS_AS(read_series_csv(junk), IoError);
}

TEST_CASE("model snapshot round trip reproduces predictions bitwise") {
    TempDir dir;
    ExperimentSpec spec = lorenz_heng_spec(400, 4);
    const TimeSeries series = generate_trial_series(spec, 0);
    const TimeSeries training = series.slice(0, 401);
    TrainOptions opts;
    opts.normalize = true; // exercise the normalization block too
    const TrainResult trained =
        train(training, plan_features(spec.features), spec.lambda, TargetMode::delta, opts);

    const std::string path = dir.file("model.ccmd");
    save_ccmd(path, trained.model);
    const ReadoutModel loaded = load_ccmd(path);

    REQUIRE(loaded.w_out == trained.model.w_out);
    REQUIRE(loaded.lambda == trained.model.lambda);
    REQUIRE(loaded.target_mode == TargetMode::delta);
    REQUIRE(loaded.feature_map.total_dim == trained.model.feature_map.total_dim);
    REQUIRE(loaded.norm.has_value());
    REQUIRE(loaded.norm->mean == trained.model.norm->mean);
    REQUIRE(loaded.norm->scale == trained.model.norm->scale);

    const ClosedLoopResult direct = predict_closed_loop(trained.model, training, 300);
    const ClosedLoopResult reloaded = predict_closed_loop(loaded, training, 300);
    REQUIRE(direct.series.data == reloaded.series.data);
}

TEST_CASE("esn snapshot rebuilds the reservoir from its config") {
    TempDir dir;
    ExperimentSpec spec = lorenz_esn_spec(400, 5);
    const TimeSeries series = generate_trial_series(spec, 0);
    const TimeSeries training = series.slice(0, 401);
    const TrainResult trained = esn_train(training, spec.esn, spec.lambda, spec.esn_washout);

    const std::string path = dir.file("esn.ccmd");
    save_ccmd(path, trained.model);
    const ReadoutModel loaded = load_ccmd(path);
    REQUIRE(loaded.is_esn());
    REQUIRE(loaded.esn->n_nodes == 28);
    REQUIRE(loaded.esn->seed == spec.esn.seed);
    REQUIRE(loaded.esn_washout == spec.esn_washout);

    const ClosedLoopResult direct = esn_predict(trained.model, training, 200);
    const ClosedLoopResult reloaded = esn_predict(loaded, training, 200);
    REQUIRE(direct.series.data == reloaded.series.data);
}

TEST_CASE("ccmd rejects corrupted files") {
    TempDir dir;
    ExperimentSpec spec = lorenz_heng_spec(400, 6);
    const TimeSeries series = generate_trial_series(spec, 0);
    const TrainResult trained =
        train(series.slice(0, 401), plan_features(spec.features), spec.lambda);
    const std::string path = dir.file("model.ccmd");
    save_ccmd(path, trained.model);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    std::stringstream bad_magic("CCMX" + bytes.substr(4));
    REQUIRE_THROWS_AS(read_ccmd(bad_magic), IoError);
    std::stringstream truncated(bytes.substr(0, bytes.size() - 16));
    REQUIRE_THROWS_AS(read_ccmd(truncated), IoError);

    REQUIRE_THROWS_AS(load_ccmd(dir.file("missing.ccmd")), IoError);
}

TEST_CASE("model text block round trips and rejects unknown keys") {
    ExperimentSpec spec = lorenz_heng12_spec(400, 7);
    ReadoutModel model;
    model.feature_map = plan_features(spec.features);
    model.w_out = Eigen::MatrixXd::Zero(3, model.feature_map.total_dim);
    const std::string text = model_text_block(model);
    const ReadoutModel parsed = model_from_text_block(text);
    REQUIRE(parsed.feature_map.total_dim == model.feature_map.total_dim);
    REQUIRE(parsed.feature_map.config.heng_variant == HengVariant::first_dim_only);

    REQUIRE_THROWS_AS(model_from_text_block(text + "mystery: 1\n"), IoError);
    REQUIRE_THROWS_AS(model_from_text_block("kind: alien\n"), IoError);
}

TEST_CASE("format_double round trips through parse_double") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-300.0, 300.0));
        REQUIRE(parse_double(format_double(v)) == v);
    }
    REQUIRE(parse_double(format_double(0.0)) == 0.0);
    REQUIRE_THROWS_AS(parse_double("1.2.3"), IoError);
}

TEST_CASE("content hash is stable and content-sensitive") {
    TempDir dir;
    const std::string a = dir.file("a.txt");
    const std::string b = dir.file("b.txt");
    write_text_file(a, "hello");
    write_text_file(b, "hello");
    REQUIRE(fnv1a64_hex(a) == fnv1a64_hex(b));
    write_text_file(b, "hellp");
    REQUIRE(fnv1a64_hex(a) != fnv1a64_hex(b));
    REQUIRE(fnv1a64_hex(a).size() == 16);
}
