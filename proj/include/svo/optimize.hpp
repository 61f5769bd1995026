// Closed-form scale-weighted variance minimization.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "svo/errors.hpp"
#include "svo/signal.hpp"
#include "svo/wavelet.hpp"
#include "svo/weights.hpp"

namespace svo {

/**
 * @brief Fusion coefficients; entries sum to 1 and may be negative.
 */
struct CoefficientVector {
    Eigen::VectorXd c;

    Eigen::Index sensors() const { return c.size(); }
};

/// Weighted sum of per-level covariance matrices: A0 = sum_j omega_j A_j.
inline Eigen::MatrixXd aggregate(const std::vector<Eigen::MatrixXd>& per_level,
                                 const WeightVector& weights) {
    if (per_level.empty()) throw std::invalid_argument("aggregate: no levels");
    if (static_cast<int>(per_level.size()) != weights.levels())
        throw std::invalid_argument("aggregate: " + std::to_string(per_level.size()) +
                                    " matrices but " + std::to_string(weights.levels()) +
                                    " weights");
    Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(per_level.front().rows(),
                                               per_level.front().cols());
    for (std::size_t j = 0; j < per_level.size(); ++j) {
        if (per_level[j].rows() != a0.rows() || per_level[j].cols() != a0.cols())
            throw std::invalid_argument("aggregate: inconsistent matrix dimensions");
        a0 += weights.omega[static_cast<Eigen::Index>(j)] * per_level[j];
    }
    return a0;
}

namespace detail {
inline constexpr double kRcondFloor = 1e-12;
}

/**
 * @brief Minimizer of c' A0 c subject to sum(c) = 1.
 *
 * Computes c = A0^{-1} 1 / (1' A0^{-1} 1) through a symmetric linear solve
 * (no explicit inverse). Requires A0 symmetric. Throws DegenerateCovariance
 * when the reciprocal condition estimate falls below 1e-12 ("degenerate scale
 * covariance") or when 1' A0^{-1} 1 <= 0 for an indefinite A0 ("aggregate
 * matrix not positive definite"). For positive definite A0 the result is the
 * unique constrained minimizer.
 */
inline CoefficientVector optimal_coefficients(const Eigen::MatrixXd& a0) {
    const Eigen::Index p = a0.rows();
    if (p < 1 || a0.cols() != p)
        throw std::invalid_argument("optimal_coefficients: matrix must be square");
    const double asym = (a0 - a0.transpose()).cwiseAbs().maxCoeff();
    const double scale = a0.cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(scale, 1e-300))
        throw std::invalid_argument("optimal_coefficients: matrix is not symmetric");

    const Eigen::MatrixXd sym = 0.5 * (a0 + a0.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const Eigen::VectorXd abs_eigs = eig.eigenvalues().cwiseAbs();
    const double emax = abs_eigs.maxCoeff();
    if (!(emax > 0.0) || abs_eigs.minCoeff() < detail::kRcondFloor * emax)
        throw DegenerateCovariance("degenerate scale covariance");

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
    Eigen::VectorXd x;
    if (eig.eigenvalues().minCoeff() > 0.0) {
        x = sym.ldlt().solve(ones);
    } else {
        // Indefinite but well-conditioned: solve through the spectral factors.
        x = eig.eigenvectors() *
            (eig.eigenvectors().transpose() * ones).cwiseQuotient(eig.eigenvalues()).eval();
    }
    const double denom = ones.dot(x);
    if (!(denom > 0.0))
        throw DegenerateCovariance("aggregate matrix not positive definite");
    return CoefficientVector{x / denom};
}

/// Virtual signal S_t = sum_i c_i X_{i,t}.
inline VirtualSignal fuse(const SignalArray& signals, const CoefficientVector& coeffs) {
    if (coeffs.sensors() != signals.sensors())
        throw std::invalid_argument("fuse: coefficient count " +
                                    std::to_string(coeffs.sensors()) +
                                    " does not match sensor count " +
                                    std::to_string(signals.sensors()));
    VirtualSignal out;
    out.samples = signals.data.transpose() * coeffs.c;
    out.coefficients = coeffs.c;
    out.sensor_labels = signals.sensor_labels;
    out.sample_rate_hz = signals.sample_rate_hz;
    return out;
}

/**
 * @brief Per-level variance of the fused signal: entry j is c' A_j c.
 *
 * Identical (as a bilinear sum) to estimating the wavelet variance directly
 * on the fused signal with the same pyramid lengths.
 */
inline Eigen::VectorXd virtual_wv(const std::vector<Eigen::MatrixXd>& per_level,
                                  const CoefficientVector& coeffs) {
    Eigen::VectorXd wv(static_cast<Eigen::Index>(per_level.size()));
    for (std::size_t j = 0; j < per_level.size(); ++j) {
        if (per_level[j].rows() != coeffs.sensors())
            throw std::invalid_argument("virtual_wv: dimension mismatch at level " +
                                        std::to_string(j + 1));
        wv[static_cast<Eigen::Index>(j)] = coeffs.c.dot(per_level[j] * coeffs.c);
    }
    return wv;
}

inline Eigen::VectorXd virtual_wv(const ScaleCovariances& cov, const CoefficientVector& coeffs) {
    return virtual_wv(cov.per_level, coeffs);
}

}  // namespace svo
