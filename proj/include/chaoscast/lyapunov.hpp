#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"
#include "chaoscast/kuramoto_sivashinsky.hpp"
#include "chaoscast/lorenz.hpp"
#include "chaoscast/rng.hpp"

namespace chaoscast {

enum class LyapunovMethod { benettin_twin_trajectory };

struct LyapunovEstimate {
    double lambda_max = 0.0;    // 1/seconds
    double lyapunov_time = 0.0; // 1/lambda_max
    LyapunovMethod method = LyapunovMethod::benettin_twin_trajectory;
    Index n_renormalizations = 0;
};

struct BenettinOptions {
    double delta0 = 1e-8;          // perturbation magnitude restored per interval
    double renorm_interval = 1.0;  // seconds between renormalizations
    Index min_renormalizations = 50;
    double drift_tolerance = 0.10; // running-estimate drift over the last quarter
};

/// Benettin twin-trajectory estimate of the largest Lyapunov exponent.
/// `step` advances a state vector by dt. Throws ConvergenceError when the
/// running estimate still drifts more than the tolerance over its last
/// quarter, and ConfigError when the horizon allows too few renormalizations.
template <typename StepFn>
LyapunovEstimate benettin_lyapunov(StepFn&& step, Eigen::VectorXd reference, double dt,
                                   double horizon, std::uint64_t seed,
                                   const BenettinOptions& opts = {}) {
    if (!(dt > 0.0)) throw ConfigError("benettin_lyapunov: dt must be positive");
    const Index steps_per_interval =
        std::max<Index>(1, static_cast<Index>(std::llround(opts.renorm_interval / dt)));
    const double interval = dt * static_cast<double>(steps_per_interval);
    const Index n_intervals = static_cast<Index>(horizon / interval);
    if (n_intervals < opts.min_renormalizations)
        throw ConfigError("benettin_lyapunov: horizon allows only " +
                          std::to_string(n_intervals) + " renormalizations, need >= " +
                          std::to_string(opts.min_renormalizations));

    Rng rng(derive_seed(seed, "lyapunov-perturbation"));
    Eigen::VectorXd direction(reference.size());
    for (Index i = 0; i < direction.size(); ++i) direction[i] = rng.normal();
    direction.normalize();

    Eigen::VectorXd perturbed = reference + opts.delta0 * direction;

    std::vector<double> running(static_cast<std::size_t>(n_intervals));
    double log_sum = 0.0;
    for (Index k = 0; k < n_intervals; ++k) {
        for (Index s = 0; s < steps_per_interval; ++s) {
            reference = step(reference);
            perturbed = step(perturbed);
        }
        const double d = (perturbed - reference).norm();
        if (!(d > 0.0) || !std::isfinite(d))
            throw ConvergenceError("benettin_lyapunov: separation collapsed or diverged");
        log_sum += std::log(d / opts.delta0);
        running[static_cast<std::size_t>(k)] =
            log_sum / (interval * static_cast<double>(k + 1));
        perturbed = reference + (opts.delta0 / d) * (perturbed - reference);
    }

    const double lambda = running.back();
    const Index k0 = std::max<Index>(1, (3 * n_intervals) / 4) - 1;
    const double drift = std::abs(lambda - running[static_cast<std::size_t>(k0)]) /
                         std::max(std::abs(lambda), 1e-12);
    if (drift > opts.drift_tolerance)
        throw ConvergenceError("benettin_lyapunov: estimate drifted " + std::to_string(drift) +
                               " over the last quarter");

    LyapunovEstimate est;
    est.lambda_max = lambda;
    est.lyapunov_time = 1.0 / lambda;
    est.n_renormalizations = n_intervals;
    return est;
}

/// Lorenz wrapper; the reference is settled onto the attractor first.
inline LyapunovEstimate estimate_lyapunov(const LorenzParams& params, double horizon,
                                          std::uint64_t seed, const BenettinOptions& opts = {}) {
    params.validate();
    Eigen::VectorXd u = params.initial_state;
    const Index settle = static_cast<Index>(std::llround(10.0 / params.dt));
    for (Index i = 0; i < settle; ++i)
        u = lorenz_step(Eigen::Vector3d(u), params, params.dt);
    auto step = [&params](const Eigen::VectorXd& s) -> Eigen::VectorXd {
        return lorenz_step(Eigen::Vector3d(s), params, params.dt);
    };
    return benettin_lyapunov(step, u, params.dt, horizon, seed, opts);
}

/// KS wrapper; runs the configured transient before measuring.
inline LyapunovEstimate estimate_lyapunov(const KsParams& params, double horizon,
                                          std::uint64_t seed, const BenettinOptions& opts = {}) {
    params.validate();
    KsStepper stepper(params);
    Eigen::VectorXd u = params.initial_profile.size() != 0 ? params.initial_profile
                                                           : ks_seeded_profile(params, seed);
    for (Index i = 0; i < params.transient_steps; ++i) u = stepper.step(u);
    auto step = [&stepper](const Eigen::VectorXd& s) { return stepper.step(s); };
    return benettin_lyapunov(step, u, params.dt, horizon, seed, opts);
}

} // namespace chaoscast
