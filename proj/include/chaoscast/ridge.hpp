#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "chaoscast/errors.hpp"
#include "chaoscast/time_series.hpp"

namespace chaoscast {

struct RidgeSolution {
    Eigen::MatrixXd w;               // q_out x f
    double normal_eq_residual = 0.0; // relative, ||W(G+lI) - C|| / ||C||
};

/// Streaming accumulator for the normal equations of W = Y S^T (S S^T + l I)^-1.
/// Chunks of feature/target columns are folded into the Gram matrix S S^T and
/// the cross product Y S^T, so the full feature matrix never has to exist.
class GramAccumulator {
public:
    GramAccumulator(Index n_features, Index n_outputs)
        : gram_(Eigen::MatrixXd::Zero(n_features, n_features)),
          cross_(Eigen::MatrixXd::Zero(n_outputs, n_features)) {}

    void add(const Eigen::Ref<const Eigen::MatrixXd>& features,
             const Eigen::Ref<const Eigen::MatrixXd>& targets) {
        if (features.rows() != gram_.rows())
            throw DimensionError("GramAccumulator: feature rows mismatch");
        if (targets.rows() != cross_.rows())
            throw DimensionError("GramAccumulator: target rows mismatch");
        if (features.cols() != targets.cols())
            throw DimensionError("GramAccumulator: feature/target column count mismatch");
        gram_.selfadjointView<Eigen::Lower>().rankUpdate(features);
        cross_.noalias() += targets * features.transpose();
        target_sq_norm_ += targets.squaredNorm();
        n_samples_ += features.cols();
    }

    Index n_samples() const { return n_samples_; }
    Index n_features() const { return gram_.rows(); }
    double target_sq_norm() const { return target_sq_norm_; }
    Eigen::MatrixXd gram() const { return gram_.selfadjointView<Eigen::Lower>(); }
    const Eigen::MatrixXd& cross() const { return cross_; }

    /// Solve the regularized normal equations via Cholesky with iterative
    /// refinement; the relative residual of accepted solutions is <= 1e-8.
    RidgeSolution solve(double lambda) const {
        if (lambda < 0.0) throw ConfigError("ridge: lambda must be >= 0");
        if (n_samples_ < 1) throw ConfigError("ridge: no samples accumulated");

        const double cross_norm = cross_.norm();
        if (cross_norm == 0.0) // zero targets: W = 0 solves exactly
            return {Eigen::MatrixXd::Zero(cross_.rows(), cross_.cols()), 0.0};

        Eigen::MatrixXd a = gram_.selfadjointView<Eigen::Lower>();
        a.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success)
            throw SingularSystemError("ridge: Gram matrix not positive definite (lambda = " +
                                      std::to_string(lambda) + ")");

        Eigen::MatrixXd w = llt.solve(cross_.transpose()).transpose();
        double residual = (w * a - cross_).norm() / cross_norm;
        for (int pass = 0; pass < 3 && residual > 1e-9; ++pass) {
            const Eigen::MatrixXd r = w * a - cross_;
            w -= llt.solve(r.transpose()).transpose();
            residual = (w * a - cross_).norm() / cross_norm;
        }
        if (residual > 1e-8 || !std::isfinite(residual)) {
            if (lambda == 0.0)
                throw SingularSystemError("ridge: rank-deficient system with lambda = 0 "
                                          "(normal-equation residual " +
                                          std::to_string(residual) + ")");
            throw ConvergenceError("ridge: normal-equation residual " + std::to_string(residual) +
                                   " exceeds 1e-8");
        }
        return {std::move(w), residual};
    }

    /// Fit residual ||W S - Y||_F^2 recovered from the accumulated products.
    double fit_sq_error(const Eigen::MatrixXd& w) const {
        const Eigen::MatrixXd gram = gram_.selfadjointView<Eigen::Lower>();
        const double value = (w * gram).cwiseProduct(w).sum() -
                             2.0 * cross_.cwiseProduct(w).sum() + target_sq_norm_;
        return std::max(0.0, value);
    }

private:
    Eigen::MatrixXd gram_;  // lower triangle accumulated
    Eigen::MatrixXd cross_; // Y S^T
    double target_sq_norm_ = 0.0;
    Index n_samples_ = 0;
};

inline RidgeSolution ridge_solve_detailed(const Eigen::Ref<const Eigen::MatrixXd>& features,
                                          const Eigen::Ref<const Eigen::MatrixXd>& targets,
                                          double lambda) {
    if (features.cols() < 1) throw ConfigError("ridge_solve: need at least one sample");
    GramAccumulator acc(features.rows(), targets.rows());
    acc.add(features, targets);
    return acc.solve(lambda);
}

/// W = Y S^T (S S^T + lambda I)^-1 for feature columns S and target columns Y.
inline Eigen::MatrixXd ridge_solve(const Eigen::Ref<const Eigen::MatrixXd>& features,
                                   const Eigen::Ref<const Eigen::MatrixXd>& targets,
                                   double lambda) {
    return ridge_solve_detailed(features, targets, lambda).w;
}

} // namespace chaoscast
