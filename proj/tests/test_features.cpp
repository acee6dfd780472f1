#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "chaoscast/chaoscast.hpp"

using namespace chaoscast;

namespace {

FeatureConfig heng_config(Index q, Index k, bool constant = false, Index delay_start = 1) {
    FeatureConfig c;
    c.family = FeatureFamily::heng_rc;
    c.q = q;
    c.k = k;
    c.include_constant = constant;
    c.heng_delay_start = delay_start;
    return c;
}

FeatureConfig ngrc_config(Index q, Index k, bool constant = false) {
    FeatureConfig c;
    c.family = FeatureFamily::ng_rc;
    c.q = q;
    c.k = k;
    c.include_constant = constant;
    return c;
}

Eigen::MatrixXd random_history(Index q, Index depth, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(q, depth + 1);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-2.0, 2.0);
    return m;
}

} // namespace

TEST_CASE("plan_features reproduces the published state counts") {
    const FeatureMap ng = plan_features(ngrc_config(64, 1));
    REQUIRE(ng.dim_linear == 128);
    REQUIRE(ng.dim_nonlinear == 8256);
    REQUIRE(ng.total_dim == 8384);

    const FeatureMap heng = plan_features(heng_config(64, 2));
    REQUIRE(heng.dim_nonlinear == 768); // 6 * 64 * 2

    const FeatureMap lorenz = plan_features(heng_config(3, 1, true));
    REQUIRE(lorenz.dim_constant == 1);
    REQUIRE(lorenz.dim_linear == 6);
    REQUIRE(lorenz.dim_nonlinear == 18);
    REQUIRE(lorenz.total_dim == 25);
}

TEST_CASE("plan_features rejects invalid configs") {
    FeatureConfig c = heng_config(2, 1); // periodic wrap needs q >= 3
    REQUIRE_THROWS_AS(plan_features(c), ConfigError);
    c.neighbor_wrap = NeighborWrap::clamped;
    REQUIRE_NOTHROW(plan_features(c));

    c = heng_config(3, 0);
    REQUIRE_THROWS_AS(plan_features(c), ConfigError);
    c = heng_config(0, 1);
    REQUIRE_THROWS_AS(plan_features(c), ConfigError);
    c = heng_config(3, 1);
    c.heng_delay_start = 2;
    REQUIRE_THROWS_AS(plan_features(c), ConfigError);
}

TEST_CASE("build_linear concatenates delays in order") {
    Eigen::MatrixXd history(2, 2);
    history << 3, 1, 4, 2; // u(t-1) = [3,4], u(t) = [1,2]
    const DelayWindow window(history);
    const Eigen::VectorXd lin = build_linear(window, 2, 1);
    REQUIRE(lin.size() == 4);
    REQUIRE(lin[0] == 1.0);
    REQUIRE(lin[1] == 2.0);
    REQUIRE(lin[2] == 3.0);
    REQUIRE(lin[3] == 4.0);

    // single block: just u(t)
    const Eigen::VectorXd now = build_linear(window, 2, 0);
    REQUIRE(now.size() == 2);
    REQUIRE(now[0] == 1.0);
    REQUIRE(now[1] == 2.0);

    const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(2, 3);
    const DelayWindow zero(zeros);
    REQUIRE(build_linear(zero, 2, 2).cwiseAbs().maxCoeff() == 0.0);

    REQUIRE_THROWS_AS(build_linear(window, 2, 5), InsufficientHistoryError);
}

TEST_CASE("ngrc nonlinear block is the upper-triangular outer product") {
    Eigen::VectorXd one(1);
    one << 3.0;
    const Eigen::VectorXd sq = build_ngrc_nonlinear(one);
    REQUIRE(sq.size() == 1);
    REQUIRE(sq[0] == 9.0);

    Eigen::VectorXd two(2);
    two << 1.0, 2.0;
    const Eigen::VectorXd pairs = build_ngrc_nonlinear(two);
    REQUIRE(pairs.size() == 3);
    REQUIRE(pairs[0] == 1.0);
    REQUIRE(pairs[1] == 2.0);
    REQUIRE(pairs[2] == 4.0);

    const Eigen::VectorXd big = build_ngrc_nonlinear(Eigen::VectorXd::Ones(128));
    REQUIRE(big.size() == 8256);
}

TEST_CASE("heng nonlinear block matches the hand enumeration") {
    // H(t-1) = [a,b,c], H(t-2) = [d,e,f]; the default start reads delays 1
    // and 2, and the first-dimension block wraps i-1 to dimension 3.
    Eigen::MatrixXd history(3, 3);
    history.col(0) << 4.0, 5.0, 6.0; // H(t-2) = [d,e,f]
    history.col(1) << 1.0, 2.0, 3.0; // H(t-1) = [a,b,c]
    history.col(2) << 9.0, 9.0, 9.0; // H(t), unused when start=1, k=1
    const double a = 1.0, b = 2.0, c = 3.0, d = 4.0, e = 5.0, f = 6.0;

    const FeatureConfig config = heng_config(3, 1);
    const Eigen::VectorXd nl = build_heng_nonlinear(DelayWindow(history), config);
    REQUIRE(nl.size() == 18);
    const double expected[6] = {a * c, a * a, a * b, a * f, a * d, a * e};
    for (int i = 0; i < 6; ++i) REQUIRE(nl[i] == expected[i]);
    // i = 2 block: center b, neighbors a and c
    const double expected2[6] = {b * a, b * b, b * c, b * d, b * e, b * f};
    for (int i = 0; i < 6; ++i) REQUIRE(nl[6 + i] == expected2[i]);
}

TEST_CASE("heng nonlinear block on constant windows") {
    const FeatureConfig config = heng_config(5, 2);
    const Eigen::MatrixXd ones_hist = Eigen::MatrixXd::Ones(5, 4);
    const Eigen::VectorXd nl = build_heng_nonlinear(DelayWindow(ones_hist), config);
    REQUIRE(nl.size() == 6 * 5 * 2);
    REQUIRE(nl.minCoeff() == 1.0);
    REQUIRE(nl.maxCoeff() == 1.0);

    const Eigen::MatrixXd zero_hist = Eigen::MatrixXd::Zero(5, 4);
    REQUIRE(build_heng_nonlinear(DelayWindow(zero_hist), config).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd shallow_hist = Eigen::MatrixXd::Ones(5, 2);
    REQUIRE_THROWS_AS(build_heng_nonlinear(DelayWindow(shallow_hist), config),
                      InsufficientHistoryError);
}

TEST_CASE("assemble keeps the constant on a zero window") {
    const FeatureMap map = plan_features(heng_config(3, 1, true));
    const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(3, 3);
    const Eigen::VectorXd s = assemble(DelayWindow(zeros), map);
    REQUIRE(s.size() == 25);
    REQUIRE(s[0] == 1.0);
    REQUIRE(s.tail(24).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("first-dimension variant reproduces the three-variable product set") {
    // with the product block anchored at the current state, the six terms are
    // X*X, X*Y, X*Z at t and at t-1 (emitted in wrap order Z, X, Y)
    Eigen::MatrixXd history(3, 2);
    history.col(0) << 7.0, 11.0, 13.0; // [X,Y,Z](t-1)
    history.col(1) << 2.0, 3.0, 5.0;   // [X,Y,Z](t)
    FeatureConfig config = heng_config(3, 1, false, 0);
    config.heng_variant = HengVariant::first_dim_only;
    const FeatureMap map = plan_features(config);
    REQUIRE(map.dim_nonlinear == 6);
    REQUIRE(map.total_dim == 12);

    const Eigen::VectorXd s = assemble(DelayWindow(history), map);
    const Eigen::VectorXd nl = s.tail(6);
    const std::multiset<double> got(nl.data(), nl.data() + 6);
    const std::multiset<double> want{2.0 * 2.0, 2.0 * 3.0,  2.0 * 5.0,
                                     2.0 * 7.0, 2.0 * 11.0, 2.0 * 13.0};
    REQUIRE(got == want);
    // canonical order: center times (i-1, i, i+1) at t, then at t-1
    REQUIRE(nl[0] == 2.0 * 5.0);
    REQUIRE(nl[1] == 2.0 * 2.0);
    REQUIRE(nl[2] == 2.0 * 3.0);
    REQUIRE(nl[3] == 2.0 * 13.0);
    REQUIRE(nl[4] == 2.0 * 7.0);
    REQUIRE(nl[5] == 2.0 * 11.0);
}

TEST_CASE("clamped wrap repeats the boundary dimension") {
    FeatureConfig config = heng_config(3, 1);
    config.neighbor_wrap = NeighborWrap::clamped;
    Eigen::MatrixXd history(3, 3);
    history.col(0) << 4.0, 5.0, 6.0;
    history.col(1) << 1.0, 2.0, 3.0;
    history.col(2) << 0.0, 0.0, 0.0;
    const Eigen::VectorXd nl = build_heng_nonlinear(DelayWindow(history), config);
    // i = 1: lower neighbor clamps to itself
    REQUIRE(nl[0] == 1.0 * 1.0);
    REQUIRE(nl[1] == 1.0 * 1.0);
    REQUIRE(nl[2] == 1.0 * 2.0);
    // i = 3 (last): upper neighbor clamps to itself
    REQUIRE(nl[12] == 3.0 * 2.0);
    REQUIRE(nl[13] == 3.0 * 3.0);
    REQUIRE(nl[14] == 3.0 * 3.0);
}

TEST_CASE("assembled length equals the plan for random configs") {
    Rng rng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        FeatureConfig c;
        c.family = rng.uniform01() < 0.5 ? FeatureFamily::heng_rc : FeatureFamily::ng_rc;
        c.q = 1 + static_cast<Index>(rng.below(8));
        c.k = 1 + static_cast<Index>(rng.below(4));
        c.include_constant = rng.uniform01() < 0.5;
        if (c.family == FeatureFamily::heng_rc) {
            c.neighbor_wrap =
                rng.uniform01() < 0.5 ? NeighborWrap::periodic : NeighborWrap::clamped;
            if (c.neighbor_wrap == NeighborWrap::periodic && c.q < 3) c.q = 3;
            c.heng_variant =
                rng.uniform01() < 0.5 ? HengVariant::full : HengVariant::first_dim_only;
            c.heng_delay_start = rng.uniform01() < 0.5 ? 0 : 1;
        }
        const FeatureMap map = plan_features(c);
        REQUIRE(map.total_dim == map.dim_constant + map.dim_linear + map.dim_nonlinear);
        REQUIRE(static_cast<Index>(map.term_index.size()) == map.total_dim);
        if (c.family == FeatureFamily::heng_rc && c.heng_variant == HengVariant::full)
            REQUIRE(map.dim_nonlinear == 6 * c.q * c.k);
        if (c.family == FeatureFamily::ng_rc) {
            const Index d = c.q * (c.k + 1);
            REQUIRE(map.dim_nonlinear == d * (d + 1) / 2);
        }

        const Eigen::MatrixXd history =
            random_history(c.q, map.required_depth, 100 + static_cast<std::uint64_t>(rep));
        const Eigen::VectorXd s = assemble(DelayWindow(history), map);
        REQUIRE(s.size() == map.total_dim);

        // determinism: identical inputs, identical output
        const Eigen::VectorXd s2 = assemble(DelayWindow(history), map);
        REQUIRE(s == s2);

        // term_index is a faithful description of every slot
        const DelayWindow window(history);
        for (Index slot = 0; slot < map.total_dim; ++slot) {
            const double expected = evaluate_term(
                window, map.term_index[static_cast<std::size_t>(slot)], c.constant_value);
            REQUIRE(s[slot] == expected);
        }
    }
}

TEST_CASE("perturbing one state only changes slots naming it") {
    const FeatureMap map = plan_features(heng_config(6, 2, true, 0));
    Eigen::MatrixXd history = random_history(6, map.required_depth, 7);
    const Eigen::VectorXd base = assemble(DelayWindow(history), map);

    const Index dim = 2, delay = 1;
    history(dim, history.cols() - 1 - delay) += 0.75;
    const Eigen::VectorXd bumped = assemble(DelayWindow(history), map);

    for (Index slot = 0; slot < map.total_dim; ++slot) {
        if (bumped[slot] == base[slot]) continue;
        const FeatureTerm& t = map.term_index[static_cast<std::size_t>(slot)];
        const bool references =
            (t.dim_a == dim && t.delay_a == delay) ||
            (t.kind == FeatureTerm::Kind::product && t.dim_b == dim && t.delay_b == delay);
        REQUIRE(references);
    }
}

TEST_CASE("ngrc quadratic block is even under negation") {
    const FeatureMap map = plan_features(ngrc_config(4, 2));
    Eigen::MatrixXd history = random_history(4, map.required_depth, 3);
    const Eigen::VectorXd plus = assemble(DelayWindow(history), map);
    history = -history;
    const Eigen::VectorXd minus = assemble(DelayWindow(history), map);
    REQUIRE(plus.tail(map.dim_nonlinear) == minus.tail(map.dim_nonlinear));
    REQUIRE(plus.head(map.dim_linear) == -minus.head(map.dim_linear));
}

TEST_CASE("neighbor products undercut the outer product on published configs") {
    const std::pair<Index, Index> configs[] = {{3, 1}, {64, 1}, {64, 2}, {256, 2}, {512, 2}};
    for (const auto& [q, k] : configs) {
        const Index d = q * (k + 1);
        REQUIRE(6 * q * k < d * (d + 1) / 2);
    }
}

TEST_CASE("featurize_series boundary and slice equivalence") {
    const FeatureMap map = plan_features(heng_config(3, 1, true));
    TimeSeries series;
    series.dt = 0.1;
    series.data = random_history(3, map.required_depth + 1, 55); // depth + 2 columns

    const FeatureDataset ds = featurize_series(series, map);
    REQUIRE(ds.features.cols() == 1);
    REQUIRE(ds.first_time == map.required_depth);

    TimeSeries longer;
    longer.dt = 0.1;
    longer.data = random_history(3, 40, 66);
    const FeatureDataset all = featurize_series(longer, map);
    REQUIRE(all.features.cols() == 40 + 1 - 1 - map.required_depth);
    for (Index c = 0; c < all.features.cols(); ++c) {
        const Index t = map.required_depth + c;
        const Eigen::VectorXd manual = assemble(DelayWindow(longer.data, t), map);
        REQUIRE(all.features.col(c) == manual);
        REQUIRE(all.targets.col(c) == longer.data.col(t + 1));
    }

    const FeatureDataset deltas = featurize_series(longer, map, TargetMode::delta);
    for (Index c = 0; c < deltas.targets.cols(); ++c) {
        const Index t = map.required_depth + c;
        REQUIRE(deltas.targets.col(c) == longer.data.col(t + 1) - longer.data.col(t));
    }

    TimeSeries tiny;
    tiny.dt = 0.1;
    tiny.data = random_history(3, map.required_depth - 1, 5); // depth + 1 columns won't fit
    REQUIRE_THROWS_AS(featurize_series(tiny, map), SeriesTooShortError);
}

TEST_CASE("featurize smoke run at production scale") {
    const FeatureMap map = plan_features(heng_config(64, 2, true, 0));
    REQUIRE(map.total_dim == 1 + 64 * 3 + 768);
    TimeSeries series;
    series.dt = 0.25;
    series.data = random_history(64, 9999, 77);
    const FeatureDataset ds = featurize_series(series, map);
    REQUIRE(ds.features.rows() == map.total_dim);
    REQUIRE(ds.features.cols() == 10000 - 1 - map.required_depth);
}

TEST_CASE("term index exports as csv") {
    const FeatureMap map = plan_features(heng_config(3, 1, true));
    const std::string csv = term_index_csv(map);
    REQUIRE(csv.rfind("slot,kind,dim_a,delay_a,dim_b,delay_b\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == map.total_dim + 1);
    REQUIRE(csv.find("constant") != std::string::npos);
    REQUIRE(csv.find("product") != std::string::npos);
}
