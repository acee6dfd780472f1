#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "chaoscast/errors.hpp"
#include "chaoscast/rng.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

struct KsParams {
    double domain_length = 22.0;
    Index grid_points = 64;
    double dt = 0.25;
    Eigen::VectorXd initial_profile; // empty = seed a smooth random profile
    Index transient_steps = 1000;    // warm-up columns discarded by ks_generate

    void validate() const {
        if (grid_points < 8 || grid_points % 2 != 0)
            throw ConfigError("KsParams: grid_points must be even and >= 8");
        if (!(domain_length > 0.0)) throw ConfigError("KsParams: domain_length must be positive");
        if (!(dt > 0.0)) throw ConfigError("KsParams: dt must be positive");
        if (transient_steps < 0) throw ConfigError("KsParams: transient_steps must be >= 0");
        if (initial_profile.size() != 0 && initial_profile.size() != grid_points)
            throw ConfigError("KsParams: initial_profile length must equal grid_points");
        if (initial_profile.size() != 0 && !initial_profile.allFinite())
            throw ConfigError("KsParams: initial_profile must be finite");
    }
};

namespace detail {
// The FFTW planner is not thread-safe; plan creation/destruction is serialized.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Pseudo-spectral integrator for u_t = -u u_x - u_xx - u_xxxx on the
/// periodic grid x_m = m L / Q. The stiff linear part is handled exactly by a
/// fourth-order exponential time-differencing Runge-Kutta scheme; the phi
/// coefficients are averaged over a complex contour so near-zero modes stay
/// well conditioned. The quadratic term is 2/3-rule dealiased.
class KsStepper {
public:
    explicit KsStepper(const KsParams& params) : p_(params) {
        p_.validate();
        const Index q = p_.grid_points;
        n_modes_ = q / 2 + 1;
        real_buf_.resize(q);
        cplx_buf_.resize(n_modes_);
        {
            std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
            fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(q), real_buf_.data(),
                                        reinterpret_cast<fftw_complex*>(cplx_buf_.data()),
                                        FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(q),
                                        reinterpret_cast<fftw_complex*>(cplx_buf_.data()),
                                        real_buf_.data(), FFTW_ESTIMATE);
        }
        init_coefficients();
    }

    ~KsStepper() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    KsStepper(const KsStepper&) = delete;
    KsStepper& operator=(const KsStepper&) = delete;

    const KsParams& params() const { return p_; }

    /// Right-hand side -u u_x - u_xx - u_xxxx evaluated pseudo-spectrally.
    Eigen::VectorXd rhs(const Eigen::VectorXd& profile) {
        check_profile(profile);
        std::vector<std::complex<double>> v(n_modes_), n(n_modes_);
        to_spectral(profile, v);
        nonlinear(v, n);
        for (Index m = 0; m < n_modes_; ++m) n[m] += lin_[m] * v[m];
        Eigen::VectorXd out(p_.grid_points);
        from_spectral(n, out);
        return out;
    }

    /// Advance one dt.
    Eigen::VectorXd step(const Eigen::VectorXd& profile) {
        check_profile(profile);
        std::vector<std::complex<double>> v(n_modes_);
        to_spectral(profile, v);
        step_spectral(v);
        Eigen::VectorXd out(p_.grid_points);
        from_spectral(v, out);
        return out;
    }

    /// One ETDRK4 step on Fourier coefficients in place.
    void step_spectral(std::vector<std::complex<double>>& v) {
        const Index n = n_modes_;
        std::vector<std::complex<double>> nv(n), na(n), nb(n), nc(n), a(n), b(n), c(n);
        nonlinear(v, nv);
        for (Index m = 0; m < n; ++m) a[m] = e2_[m] * v[m] + qc_[m] * nv[m];
        nonlinear(a, na);
        for (Index m = 0; m < n; ++m) b[m] = e2_[m] * v[m] + qc_[m] * na[m];
        nonlinear(b, nb);
        for (Index m = 0; m < n; ++m) c[m] = e2_[m] * a[m] + qc_[m] * (2.0 * nb[m] - nv[m]);
        nonlinear(c, nc);
        for (Index m = 0; m < n; ++m)
            v[m] = e_[m] * v[m] + f1_[m] * nv[m] + 2.0 * f2_[m] * (na[m] + nb[m]) + f3_[m] * nc[m];
    }

    void to_spectral(const Eigen::VectorXd& u, std::vector<std::complex<double>>& v) {
        for (Index i = 0; i < p_.grid_points; ++i) real_buf_[static_cast<std::size_t>(i)] = u[i];
        fftw_execute(fwd_);
        v.assign(cplx_buf_.begin(), cplx_buf_.end());
    }

    void from_spectral(const std::vector<std::complex<double>>& v, Eigen::VectorXd& u) {
        std::copy(v.begin(), v.end(), cplx_buf_.begin());
        fftw_execute(bwd_);
        const double scale = 1.0 / static_cast<double>(p_.grid_points);
        u.resize(p_.grid_points);
        for (Index i = 0; i < p_.grid_points; ++i)
            u[i] = real_buf_[static_cast<std::size_t>(i)] * scale;
    }

private:
    void check_profile(const Eigen::VectorXd& profile) const {
        if (profile.size() != p_.grid_points)
            throw DimensionError("KsStepper: profile length != grid_points");
        if (!profile.allFinite()) throw BlowUpError("KsStepper: non-finite profile");
    }

    // -1/2 d/dx of the squared field, with modes above 2/3 cutoff zeroed.
    void nonlinear(const std::vector<std::complex<double>>& v,
                   std::vector<std::complex<double>>& out) {
        std::copy(v.begin(), v.end(), cplx_buf_.begin());
        fftw_execute(bwd_);
        const double scale = 1.0 / static_cast<double>(p_.grid_points);
        for (auto& x : real_buf_) {
            x *= scale;
            x *= x;
        }
        fftw_execute(fwd_);
        for (Index m = 0; m < n_modes_; ++m) out[static_cast<std::size_t>(m)] = g_[m] * cplx_buf_[static_cast<std::size_t>(m)];
    }

    void init_coefficients() {
        const Index n = n_modes_;
        const double h = p_.dt;
        const double two_pi = 2.0 * 3.14159265358979323846;
        lin_.resize(n);
        g_.resize(n);
        e_.resize(n);
        e2_.resize(n);
        qc_.resize(n);
        f1_.resize(n);
        f2_.resize(n);
        f3_.resize(n);

        const Index cutoff = p_.grid_points / 3; // 2/3 rule on the half spectrum
        for (Index m = 0; m < n; ++m) {
            const double q = two_pi * static_cast<double>(m) / p_.domain_length;
            lin_[m] = q * q - q * q * q * q;
            const bool keep = m <= cutoff && m != p_.grid_points / 2;
            g_[m] = keep ? std::complex<double>(0.0, -0.5 * q) : std::complex<double>(0.0, 0.0);
            e_[m] = std::exp(h * lin_[m]);
            e2_[m] = std::exp(0.5 * h * lin_[m]);

            // Mean over a unit circle around h*lin; exact for the analytic
            // phi functions and immune to cancellation at small arguments.
            constexpr int kContourPoints = 32;
            std::complex<double> s_q = 0.0, s_f1 = 0.0, s_f2 = 0.0, s_f3 = 0.0;
            for (int j = 1; j <= kContourPoints; ++j) {
                const double angle = 3.14159265358979323846 * (j - 0.5) / kContourPoints;
                const std::complex<double> r(std::cos(angle), std::sin(angle));
                const std::complex<double> z = h * lin_[m] + r;
                const std::complex<double> ez = std::exp(z);
                const std::complex<double> z3 = z * z * z;
                s_q += (std::exp(0.5 * z) - 1.0) / z;
                s_f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                s_f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
                s_f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            const double inv = 1.0 / kContourPoints;
            qc_[m] = h * (s_q.real() * inv);
            f1_[m] = h * (s_f1.real() * inv);
            f2_[m] = h * (s_f2.real() * inv);
            f3_[m] = h * (s_f3.real() * inv);
        }
    }

    KsParams p_;
    Index n_modes_ = 0;
    std::vector<double> real_buf_;
    std::vector<std::complex<double>> cplx_buf_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;

    std::vector<double> lin_, e_, e2_, qc_, f1_, f2_, f3_;
    std::vector<std::complex<double>> g_;
};

inline Eigen::VectorXd ks_rhs_spectral(const Eigen::VectorXd& profile, const KsParams& params) {
    KsStepper stepper(params);
    return stepper.rhs(profile);
}

/// Smooth small-amplitude start: a seeded sum of the three lowest sin/cos
/// modes with amplitude 0.1 (zero spatial mean).
inline Eigen::VectorXd ks_seeded_profile(const KsParams& params, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "ks-init"));
    const Index q = params.grid_points;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(q);
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int mode = 1; mode <= 3; ++mode) {
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        for (Index i = 0; i < q; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(q);
            u[i] += 0.1 * (a * std::cos(two_pi * mode * x) + b * std::sin(two_pi * mode * x));
        }
    }
    return u;
}

/// Integrate the KS equation, discard the transient, and return n_steps + 1
/// post-transient columns. origin_time records the discarded span.
inline TimeSeries ks_generate(const KsParams& params, Index n_steps, std::uint64_t seed) {
    params.validate();
    if (n_steps < 1) throw ConfigError("ks_generate: n_steps must be >= 1");

    KsStepper stepper(params);
    Eigen::VectorXd u = params.initial_profile.size() != 0 ? params.initial_profile
                                                           : ks_seeded_profile(params, seed);

    for (Index t = 0; t < params.transient_steps; ++t) {
        u = stepper.step(u);
        if (!u.allFinite() || u.cwiseAbs().maxCoeff() > kBlowUpGuard)
            throw BlowUpError("ks_generate: transient diverged at step " + std::to_string(t));
    }

    TimeSeries out;
    out.dt = params.dt;
    out.origin_time = params.dt * static_cast<double>(params.transient_steps);
    out.data.resize(params.grid_points, n_steps + 1);
    out.data.col(0) = u;
    for (Index t = 1; t <= n_steps; ++t) {
        u = stepper.step(u);
        if (!u.allFinite() || u.cwiseAbs().maxCoeff() > kBlowUpGuard)
            throw BlowUpError("ks_generate: trajectory diverged at step " + std::to_string(t));
        out.data.col(t) = u;
    }
    return out;
}

} // namespace chaoscast
