// Sandwich covariance and normal-theory intervals for the fusion coefficients.
#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "svo/errors.hpp"
#include "svo/wavelet.hpp"
#include "svo/weights.hpp"

namespace svo::inference {

/**
 * @brief Jacobian of the coefficient map with respect to the flattened WCCV
 *        vector, evaluated at gamma.
 *
 * The coefficient map sends a WCCV vector g to A(g)^{-1} 1 / (1' A(g)^{-1} 1)
 * where A(g) = sum_j omega_j G_j and G_j is the p x p matrix stored in level
 * slot j of g. The returned p x (J p^2) matrix holds in column m (level j,
 * pair (i, k), see wccv_flat_index) the derivative
 *   [ I / (1'v) - v 1' / (1'v)^2 ] ( -omega_j v_k A^{-1} e_i ),  v = A^{-1} 1.
 * Each of the duplicated (i, k) / (k, i) slots carries only its own
 * single-entry derivative. The map is scale invariant in g, so the identity
 * jacobian * gamma = 0 holds at every evaluation point.
 *
 * Throws DegenerateCovariance when A(gamma) is singular to working precision.
 */
inline Eigen::MatrixXd coefficient_jacobian(const Eigen::VectorXd& gamma,
                                            const WeightVector& weights,
                                            Eigen::Index sensors) {
    const int levels = weights.levels();
    const Eigen::Index p = sensors;
    if (gamma.size() != levels * p * p)
        throw std::invalid_argument("coefficient_jacobian: WCCV vector has " +
                                    std::to_string(gamma.size()) + " entries, expected " +
                                    std::to_string(levels * p * p));

    // A(gamma) is not symmetrized: general vectors are differentiated as-is.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (int j = 1; j <= levels; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index k = 0; k < p; ++k)
                a(i, k) += weights.omega[j - 1] * gamma[wccv_flat_index(j, i, k, p)];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const double smax = svd.singularValues().maxCoeff();
    if (!(smax > 0.0) || svd.singularValues().minCoeff() < 1e-12 * smax)
        throw DegenerateCovariance("degenerate scale covariance");

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
    const Eigen::VectorXd v = lu.solve(ones);
    const double denom = ones.dot(v);
    if (denom == 0.0) throw DegenerateCovariance("degenerate scale covariance");
    const Eigen::MatrixXd a_inv = lu.solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd projector =
        Eigen::MatrixXd::Identity(p, p) / denom - v * ones.transpose() / (denom * denom);
    const Eigen::MatrixXd pa_inv = projector * a_inv;

    Eigen::MatrixXd jac(p, levels * p * p);
    for (int j = 1; j <= levels; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index k = 0; k < p; ++k)
                jac.col(wccv_flat_index(j, i, k, p)) =
                    -weights.omega[j - 1] * v[k] * pa_inv.col(i);
    return jac;
}

/// Sandwich covariance J V J' (symmetrized against round-off).
inline Eigen::MatrixXd sandwich_covariance(const Eigen::MatrixXd& jacobian,
                                           const Eigen::MatrixXd& wccv_covariance) {
    if (jacobian.cols() != wccv_covariance.rows() ||
        wccv_covariance.rows() != wccv_covariance.cols())
        throw std::invalid_argument("sandwich_covariance: dimension mismatch");
    Eigen::MatrixXd sigma = jacobian * (wccv_covariance * jacobian.transpose());
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    const double floor = -1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < sigma.rows(); ++i)
        if (sigma(i, i) < floor)
            throw std::logic_error("sandwich_covariance: negative variance entry");
    return sigma;
}

/// Bootstrap covariance of the WCCV vector plus the plug-in pieces built on it.
struct CovarianceEstimates {
    Eigen::MatrixXd wccv_covariance;   ///< V*, (J p^2) x (J p^2), symmetric PSD
    Eigen::MatrixXd jacobian;          ///< p x (J p^2) plug-in at the estimated WCCV
    Eigen::MatrixXd coefficient_cov;   ///< sandwich p x p
};

/**
 * @brief Symmetric normal-theory confidence intervals for each coefficient.
 */
struct ConfidenceIntervals {
    Eigen::VectorXd point;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    double alpha = 0.05;
};

/**
 * @brief Interval i: point_i +/- z_{1-alpha/2} sqrt(Sigma_ii / T).
 *
 * Negative diagonal entries beyond -1e-12 (impossible for a PSD bootstrap
 * covariance) raise a logic error; round-off negatives are clamped to zero.
 */
inline ConfidenceIntervals confidence_intervals(const Eigen::VectorXd& coefficients,
                                                const Eigen::MatrixXd& coefficient_cov,
                                                double alpha, Eigen::Index samples) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("confidence_intervals: alpha must lie in (0, 1)");
    if (coefficient_cov.rows() != coefficients.size() ||
        coefficient_cov.cols() != coefficients.size())
        throw std::invalid_argument("confidence_intervals: dimension mismatch");
    if (samples < 1) throw std::invalid_argument("confidence_intervals: T must be positive");

    const boost::math::normal_distribution<double> gauss;
    const double z = boost::math::quantile(gauss, 1.0 - alpha / 2.0);

    ConfidenceIntervals out;
    out.point = coefficients;
    out.alpha = alpha;
    out.lower.resize(coefficients.size());
    out.upper.resize(coefficients.size());
    const double floor = -1e-12 * std::max(1.0, coefficient_cov.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
        const double var = coefficient_cov(i, i);
        if (var < floor)
            throw std::logic_error("confidence_intervals: negative variance entry");
        const double half = z * std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
        out.lower[i] = coefficients[i] - half;
        out.upper[i] = coefficients[i] + half;
    }
    return out;
}

}  // namespace svo::inference
