#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/Eigenvalues>

#include "chaoscast/errors.hpp"
#include "chaoscast/rng.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

enum class EsnActivation { tanh };

struct EsnConfig {
    Index n_nodes = 100;
    double leak_rate = 1.0; // gamma in (0, 1]
    double spectral_radius = 0.9;
    double input_scale = 0.1;
    double bias_scale = 0.1;
    double connectivity_degree = 3.0; // mean nonzeros per row of A
    EsnActivation activation = EsnActivation::tanh;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_nodes < 1) throw ConfigError("EsnConfig: n_nodes must be >= 1");
        if (!(leak_rate > 0.0) || leak_rate > 1.0)
            throw ConfigError("EsnConfig: leak_rate must be in (0, 1]");
        if (!(spectral_radius > 0.0)) throw ConfigError("EsnConfig: spectral_radius must be > 0");
        if (connectivity_degree < 0.0 || connectivity_degree > static_cast<double>(n_nodes))
            throw ConfigError("EsnConfig: connectivity_degree out of range");
        if (input_scale < 0.0 || bias_scale < 0.0)
            throw ConfigError("EsnConfig: scales must be >= 0");
    }
};

/// Node-state vector of the reservoir.
struct EsnState {
    Eigen::VectorXd s;
};

/// Largest eigenvalue modulus via restarted Arnoldi iteration (power iteration
/// with a small Krylov subspace, so complex dominant pairs converge too).
inline double estimate_spectral_radius(const Eigen::SparseMatrix<double>& a,
                                       std::uint64_t seed, double tol = 1e-6) {
    const Index n = a.rows();
    if (n != a.cols()) throw DimensionError("estimate_spectral_radius: matrix not square");
    if (n == 1) return std::abs(a.coeff(0, 0));

    const Index m = std::min<Index>(n, 60);
    Rng rng(derive_seed(seed, "spectral-radius"));
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    v.normalize();

    double estimate = 0.0;
    for (int cycle = 0; cycle < 12; ++cycle) {
        Eigen::MatrixXd basis(n, m);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
        basis.col(0) = v;
        Index built = m;
        for (Index j = 0; j < m; ++j) {
            Eigen::VectorXd w = a * basis.col(j);
            for (Index i = 0; i <= j; ++i) { // modified Gram-Schmidt
                const double h = basis.col(i).dot(w);
                hess(i, j) = h;
                w -= h * basis.col(i);
            }
            const double h_next = w.norm();
            if (j + 1 < m) {
                if (h_next < 1e-14) { // invariant subspace: Ritz values exact
                    built = j + 1;
                    break;
                }
                hess(j + 1, j) = h_next;
                basis.col(j + 1) = w / h_next;
            }
        }
        Eigen::EigenSolver<Eigen::MatrixXd> eig(hess.topLeftCorner(built, built), true);
        Index best = 0;
        double best_mod = 0.0;
        for (Index i = 0; i < built; ++i) {
            const double mod = std::abs(eig.eigenvalues()[i]);
            if (mod > best_mod) {
                best_mod = mod;
                best = i;
            }
        }
        const double prev = estimate;
        estimate = best_mod;
        if (cycle > 0 && std::abs(estimate - prev) <= tol * std::max(estimate, 1e-300))
            break;
        // restart from the dominant Ritz direction
        Eigen::VectorXd next = (basis.leftCols(built) *
                                eig.eigenvectors().col(best).real().head(built));
        if (next.norm() < 1e-14) break;
        v = next.normalized();
    }
    return estimate;
}

/// Materialized reservoir: recurrent weights, input weights and bias, built
/// deterministically from (config, input_dim). The recurrent matrix acts as
/// S(t) A for row-vector states; states are stored as columns, so the update
/// applies A^T.
class EsnReservoir {
public:
    EsnReservoir(Eigen::SparseMatrix<double> a, Eigen::MatrixXd w_in, Eigen::VectorXd bias,
                 double leak_rate)
        : a_(std::move(a)), w_in_(std::move(w_in)), bias_(std::move(bias)), leak_(leak_rate) {
        if (a_.rows() != a_.cols()) throw DimensionError("EsnReservoir: A must be square");
        if (w_in_.rows() != a_.rows() || bias_.size() != a_.rows())
            throw DimensionError("EsnReservoir: W_in/bias rows must match A");
        a_transpose_ = a_.transpose();
    }

    static EsnReservoir build(const EsnConfig& config, Index input_dim) {
        config.validate();
        if (input_dim < 1) throw ConfigError("EsnReservoir: input_dim must be >= 1");
        const Index n = config.n_nodes;

        // A: entrywise Bernoulli(degree / n) with uniform(-1, 1) values,
        // rescaled so the spectral-radius estimate hits the target exactly.
        Eigen::SparseMatrix<double> a(n, n);
        {
            Rng rng(derive_seed(config.seed, "esn-adjacency"));
            const double p = config.connectivity_degree / static_cast<double>(n);
            std::vector<Eigen::Triplet<double>> entries;
            entries.reserve(static_cast<std::size_t>(config.connectivity_degree * n * 1.3) + 16);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) {
                    const double coin = rng.uniform01();
                    if (coin < p) entries.emplace_back(i, j, rng.uniform(-1.0, 1.0));
                }
            a.setFromTriplets(entries.begin(), entries.end());
        }
        const double radius = estimate_spectral_radius(a, config.seed);
        if (radius < 1e-12)
            throw ConfigError("EsnReservoir: generated matrix has (near) zero spectral radius; "
                              "increase connectivity_degree");
        a *= config.spectral_radius / radius;

        Eigen::MatrixXd w_in(n, input_dim);
        {
            Rng rng(derive_seed(config.seed, "esn-input"));
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < input_dim; ++j)
                    w_in(i, j) = config.input_scale * rng.uniform(-1.0, 1.0);
        }
        Eigen::VectorXd bias(n);
        {
            Rng rng(derive_seed(config.seed, "esn-bias"));
            for (Index i = 0; i < n; ++i) bias[i] = config.bias_scale * rng.uniform(-1.0, 1.0);
        }
        return EsnReservoir(std::move(a), std::move(w_in), std::move(bias), config.leak_rate);
    }

    Index n_nodes() const { return a_.rows(); }
    Index input_dim() const { return w_in_.cols(); }
    const Eigen::SparseMatrix<double>& a() const { return a_; }
    const Eigen::MatrixXd& w_in() const { return w_in_; }
    const Eigen::VectorXd& bias() const { return bias_; }
    double leak_rate() const { return leak_; }

    /// S(t+1) = (1 - g) S(t) + g tanh(S(t) A + W_in u(t) + b)
    Eigen::VectorXd step(const Eigen::VectorXd& state, const Eigen::VectorXd& input) const {
        if (state.size() != n_nodes()) throw DimensionError("EsnReservoir::step: bad state size");
        if (input.size() != input_dim()) throw DimensionError("EsnReservoir::step: bad input size");
        Eigen::VectorXd drive = a_transpose_ * state;
        drive.noalias() += w_in_ * input;
        drive += bias_;
        return (1.0 - leak_) * state + leak_ * drive.array().tanh().matrix();
    }

private:
    Eigen::SparseMatrix<double> a_;
    Eigen::SparseMatrix<double> a_transpose_;
    Eigen::MatrixXd w_in_;
    Eigen::VectorXd bias_;
    double leak_ = 1.0;
};

inline EsnState esn_step(const EsnState& state, const Eigen::VectorXd& input,
                         const EsnReservoir& reservoir) {
    return EsnState{reservoir.step(state.s, input)};
}

} // namespace chaoscast
