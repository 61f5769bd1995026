// Comparison methods: equal weights and random-walk-variance-minimizing
// coefficients.
#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <stdexcept>
#include <string>

#include "svo/optimize.hpp"
#include "svo/signal.hpp"

namespace svo::baselines {

/// All entries 1/p.
inline CoefficientVector equal_weights(Eigen::Index sensors) {
    if (sensors < 1) throw std::invalid_argument("equal_weights: need p >= 1");
    return CoefficientVector{Eigen::VectorXd::Constant(sensors, 1.0 / sensors)};
}

/**
 * @brief Coefficients minimizing the fused random-walk innovation variance
 *        c' Q c subject to sum(c) = 1: c = Q^{-1} 1 / (1' Q^{-1} 1).
 *
 * Same constrained minimizer as optimal_coefficients, applied to the
 * innovation covariance instead of a scale aggregate. Throws
 * DegenerateCovariance for singular Q.
 */
inline CoefficientVector rdvg_coefficients(const Eigen::MatrixXd& rw_innovation_cov) {
    return optimal_coefficients(rw_innovation_cov);
}

/// Nearest positive-semidefinite matrix by eigenvalue clipping (idempotent).
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

/**
 * @brief Moment estimate of the random-walk innovation covariance under the
 *        WN + RW model.
 *
 * With first differences D_t = X_t - X_{t-1} the model gives
 * E[D_t D_t'] = Q + 2R and E[D_t D_{t-1}'] = -R, so
 * C(0) + C(1) + C(1)' is consistent for Q. The sample version is
 * symmetrized, projected to PSD (negative eigenvalues clipped at zero) and
 * ridged with 1e-12 * trace to keep downstream solves well posed at short
 * record lengths.
 */
inline Eigen::MatrixXd estimate_rw_innovation_cov(const SignalArray& signals) {
    signals.validate();
    if (signals.length() < 3)
        throw std::invalid_argument("estimate_rw_innovation_cov: need T >= 3");
    const Eigen::Index p = signals.sensors();
    const Eigen::Index n = signals.length() - 1;

    Eigen::MatrixXd diffs =
        signals.data.rightCols(n) - signals.data.leftCols(n);
    diffs.colwise() -= diffs.rowwise().mean().eval();

    Eigen::MatrixXd lag0 = Eigen::MatrixXd::Zero(p, p);
    lag0.selfadjointView<Eigen::Lower>().rankUpdate(diffs, 1.0 / static_cast<double>(n));
    lag0.triangularView<Eigen::StrictlyUpper>() = lag0.transpose();
    const Eigen::MatrixXd lag1 =
        diffs.rightCols(n - 1) * diffs.leftCols(n - 1).transpose() / static_cast<double>(n);

    Eigen::MatrixXd q = lag0 + lag1 + lag1.transpose();
    q = project_psd(0.5 * (q + q.transpose()));
    q += (1e-12 * q.trace()) * Eigen::MatrixXd::Identity(p, p);
    return q;
}

}  // namespace svo::baselines
