#pragma once

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0; // the usual second parameter; chaotic at the defaults
    double beta = 8.0 / 3.0;
    double dt = 0.01;
    Eigen::Vector3d initial_state{1.0, 1.0, 1.0};

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("LorenzParams: dt must be positive");
        if (!initial_state.allFinite())
            throw ConfigError("LorenzParams: initial state must be finite");
    }
};

inline Eigen::Vector3d lorenz_derivative(const Eigen::Vector3d& s, const LorenzParams& p) {
    return {p.sigma * (s.y() - s.x()),
            p.rho * s.x() - s.y() - s.x() * s.z(),
            s.x() * s.y() - p.beta * s.z()};
}

/// One classical RK4 step of an autonomous system f over step h.
template <typename State, typename Deriv>
State rk4_step(const State& u, double h, Deriv&& f) {
    const State k1 = f(u);
    const State k2 = f(u + (h / 2.0) * k1);
    const State k3 = f(u + (h / 2.0) * k2);
    const State k4 = f(u + h * k3);
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline Eigen::Vector3d lorenz_step(const Eigen::Vector3d& u, const LorenzParams& p, double h) {
    return rk4_step(u, h, [&p](const Eigen::Vector3d& s) { return lorenz_derivative(s, p); });
}

/// Integrate n_steps RK4 steps; column 0 is the initial state, so the result
/// has n_steps + 1 columns. Aborts with BlowUpError past the magnitude guard.
inline TimeSeries lorenz_generate(const LorenzParams& params, Index n_steps) {
    params.validate();
    if (n_steps < 1) throw ConfigError("lorenz_generate: n_steps must be >= 1");

    TimeSeries out;
    out.dt = params.dt;
    out.data.resize(3, n_steps + 1);
    Eigen::Vector3d u = params.initial_state;
    out.data.col(0) = u;
    for (Index t = 1; t <= n_steps; ++t) {
        u = lorenz_step(u, params, params.dt);
        if (!u.allFinite() || u.cwiseAbs().maxCoeff() > kBlowUpGuard)
            throw BlowUpError("lorenz_generate: trajectory diverged at step " + std::to_string(t));
        out.data.col(t) = u;
    }
    return out;
}

} // namespace chaoscast
