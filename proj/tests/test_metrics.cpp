#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "chaoscast/chaoscast.hpp"

using namespace chaoscast;

namespace {

TimeSeries make_series(const Eigen::MatrixXd& data, double dt = 0.5) {
    return TimeSeries{data, dt, 0.0};
}

} // namespace

TEST_CASE("normalized error is zero for a perfect prediction") {
    Rng rng(1);
    Eigen::MatrixXd data(3, 50);
    for (Index i = 0; i < data.size(); ++i) data.data()[i] = rng.uniform(-3.0, 3.0);
    const TimeSeries truth = make_series(data);
    const std::vector<double> curve = normalized_error(truth, truth);
    REQUIRE(curve.size() == 50);
    for (double v : curve) REQUIRE(v == 0.0);
}

TEST_CASE("normalized error of a zero prediction is about one") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Constant(2, 40, 1.5);
    const TimeSeries truth = make_series(data);
    const TimeSeries pred = make_series(Eigen::MatrixXd::Zero(2, 40));
    for (double v : normalized_error(truth, pred)) REQUIRE(v == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("normalized error hand-computed case") {
    Eigen::MatrixXd t(1, 2), p(1, 2);
    t << 1.0, 1.0;
    p << 1.0, 2.0;
    const std::vector<double> curve = normalized_error(make_series(t), make_series(p));
    REQUIRE(curve[0] == 0.0);
    REQUIRE(curve[1] == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("normalized error validates shapes") {
    const TimeSeries a = make_series(Eigen::MatrixXd::Ones(2, 10));
    const TimeSeries b = make_series(Eigen::MatrixXd::Ones(3, 10));
    REQUIRE_THROWS_AS(normalized_error(a, b), DimensionError);
    const TimeSeries longer = make_series(Eigen::MatrixXd::Ones(2, 20));
    REQUIRE_THROWS_AS(normalized_error(a, longer), DimensionError);
    TimeSeries wrong_dt = a;
    wrong_dt.dt = 0.25;
    REQUIRE_THROWS_AS(normalized_error(a, wrong_dt), DimensionError);
}

TEST_CASE("valid time never crosses on a perfect prediction") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Random(3, 500);
    const TimeSeries truth = make_series(data, 0.01);
    const ValidTimeReport report = valid_time(truth, truth, 0.3);
    REQUIRE(report.valid_steps == 500);
    REQUIRE(report.valid_seconds == Catch::Approx(5.0));
}

TEST_CASE("valid time finds the first crossing of a linear ramp") {
    std::vector<double> ramp(100);
    for (int i = 0; i < 100; ++i) ramp[static_cast<std::size_t>(i)] = i / 100.0;
    const ValidTimeReport report = valid_time_from_curve(ramp, 0.1, 0.5);
    REQUIRE(report.valid_steps == 50);
    REQUIRE(report.valid_seconds == Catch::Approx(5.0));
    REQUIRE(report.error_curve.size() == 100);
}

TEST_CASE("valid time is monotone in the threshold") {
    Rng rng(7);
    std::vector<double> curve(300);
    double level = 0.0;
    for (auto& v : curve) {
        level += rng.uniform(-0.01, 0.03);
        v = std::max(0.0, level);
    }
    Index prev = 0;
    for (const double theta : {0.05, 0.1, 0.2, 0.3, 0.5, 0.8}) {
        const ValidTimeReport report = valid_time_from_curve(curve, 1.0, theta);
        REQUIRE(report.valid_steps >= prev);
        prev = report.valid_steps;
    }
}

TEST_CASE("valid time fills lyapunov units when an estimate is supplied") {
    LyapunovEstimate lyap;
    lyap.lambda_max = 0.9;
    lyap.lyapunov_time = 1.0 / 0.9;
    std::vector<double> curve(100, 0.0);
    const ValidTimeReport report = valid_time_from_curve(curve, 0.01, 0.3, lyap);
    REQUIRE(report.valid_steps == 100);
    REQUIRE(report.valid_lyapunov_times == Catch::Approx(report.valid_seconds * 0.9));
    REQUIRE_THROWS_AS(valid_time_from_curve(curve, 0.01, 0.0), ConfigError);
}

TEST_CASE("normalized error is invariant under a common rotation") {
    Rng rng(9);
    Eigen::MatrixXd t(3, 60), p(3, 60);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-2.0, 2.0);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(-2.0, 2.0);

    Eigen::MatrixXd m(3, 3);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
    const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();

    const std::vector<double> base = normalized_error(make_series(t), make_series(p));
    const std::vector<double> rotated =
        normalized_error(make_series(rot * t), make_series(rot * p));
    for (std::size_t i = 0; i < base.size(); ++i)
        REQUIRE(rotated[i] == Catch::Approx(base[i]).margin(1e-12));
}

TEST_CASE("difference field subtracts and antisymmetrizes") {
    Rng rng(11);
    Eigen::MatrixXd a(4, 30), b(4, 30);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-1.0, 1.0);
    for (Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-1.0, 1.0);
    const TimeSeries ta = make_series(a), tb = make_series(b);

    const TimeSeries zero = difference_field(ta, ta);
    REQUIRE(zero.data.cwiseAbs().maxCoeff() == 0.0);

    const TimeSeries ab = difference_field(ta, tb);
    const TimeSeries ba = difference_field(tb, ta);
    REQUIRE(ab.data == (-ba.data).eval());

    const TimeSeries shorter = make_series(Eigen::MatrixXd::Ones(4, 10));
    REQUIRE_THROWS_AS(difference_field(ta, shorter), DimensionError);
}

TEST_CASE("difference field round-trips bit-exactly through csv") {
    Rng rng(13);
    Eigen::MatrixXd a(3, 25), b(3, 25);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-5.0, 5.0);
    for (Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-5.0, 5.0);
    const TimeSeries diff = difference_field(make_series(a, 0.25), make_series(b, 0.25));

    std::stringstream buffer;
    write_series_csv(buffer, diff);
    const TimeSeries loaded = read_series_csv(buffer);
    REQUIRE(loaded.data == diff.data);
    REQUIRE(loaded.dt == diff.dt);
    REQUIRE(loaded.origin_time == diff.origin_time);
}
