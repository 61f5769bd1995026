// Stochastic error models: simulators, closed-form wavelet covariances, and a
// two-parameter wavelet-moment fit.
#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "svo/signal.hpp"
#include "svo/wavelet.hpp"

namespace svo::models {

namespace detail {

/// Coloring matrix C with C C' = cov, tolerant of semidefinite inputs.
/// Throws when an eigenvalue is negative beyond tol * max(|eigenvalues|).
inline Eigen::MatrixXd coloring_matrix(const Eigen::MatrixXd& cov, double tol = 1e-12) {
    if (cov.rows() != cov.cols())
        throw std::invalid_argument("coloring_matrix: matrix must be square");
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
    if (asym > 1e-8 * scale)
        throw std::invalid_argument("coloring_matrix: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd clipped = eig.eigenvalues();
    for (Eigen::Index i = 0; i < clipped.size(); ++i) {
        if (clipped[i] < -tol * std::max(emax, 1.0e-300))
            throw std::invalid_argument("coloring_matrix: matrix is not positive semidefinite");
        clipped[i] = std::max(clipped[i], 0.0);
    }
    return eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
}

inline Eigen::VectorXd standard_normal_vector(Eigen::Index n, std::mt19937_64& rng,
                                              std::normal_distribution<double>& gauss) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = gauss(rng);
    return z;
}

}  // namespace detail

/**
 * @brief White noise plus random walk array model.
 *
 * X_t = 1 delta + b_t + xi_t with b_t = b_{t-1} + eta_t, b_0 = 0,
 * xi_t ~ N(0, diag(wn_variances)), eta_t ~ N(0, rw_innovation_cov).
 * The random walk starts at zero; its level does not enter any wavelet
 * covariance, so the choice is inconsequential for estimation.
 */
struct WnRwModel {
    Eigen::VectorXd wn_variances;          ///< diagonal of R, deg^2/s^2
    Eigen::MatrixXd rw_innovation_cov;     ///< Q, symmetric PSD, deg^2/s^2
    double constant_rate = 0.0;            ///< delta, deg/s

    Eigen::Index sensors() const { return wn_variances.size(); }

    void validate() const {
        if (wn_variances.size() < 1) throw std::invalid_argument("WnRwModel: empty model");
        if ((wn_variances.array() < 0.0).any())
            throw std::invalid_argument("WnRwModel: white-noise variances must be >= 0");
        if (rw_innovation_cov.rows() != wn_variances.size() ||
            rw_innovation_cov.cols() != wn_variances.size())
            throw std::invalid_argument("WnRwModel: dimension mismatch between R and Q");
        detail::coloring_matrix(rw_innovation_cov);   // throws if not PSD
    }
};

/// One first-order autoregressive component with innovation covariance.
struct Ar1Component {
    double phi = 0.0;
    Eigen::MatrixXd innovation_cov;
};

/**
 * @brief White noise plus a sum of AR(1) components.
 *
 * X_t = sum_m b_{m,t} + xi_t with b_{m,t} = phi_m b_{m,t-1} + eta_{m,t},
 * eta_{m,t} ~ N(0, P_m), |phi_m| < 1.
 */
struct WnAr1Model {
    Eigen::VectorXd wn_variances;
    std::vector<Ar1Component> components;

    Eigen::Index sensors() const { return wn_variances.size(); }

    void validate() const {
        if (wn_variances.size() < 1) throw std::invalid_argument("WnAr1Model: empty model");
        if ((wn_variances.array() < 0.0).any())
            throw std::invalid_argument("WnAr1Model: white-noise variances must be >= 0");
        for (const auto& comp : components) {
            if (!(std::abs(comp.phi) < 1.0))
                throw std::invalid_argument("WnAr1Model: |phi| must be < 1");
            if (comp.innovation_cov.rows() != wn_variances.size() ||
                comp.innovation_cov.cols() != wn_variances.size())
                throw std::invalid_argument("WnAr1Model: component dimension mismatch");
            detail::coloring_matrix(comp.innovation_cov);
        }
    }
};

/**
 * @brief Simulate the white-noise + random-walk array model.
 *
 * Draw order per epoch: the p random-walk innovations, then the p white-noise
 * samples, sensors ascending. Identical (model, T, rng state) inputs give
 * identical output.
 */
inline SignalArray simulate_wn_rw(const WnRwModel& model, Eigen::Index samples,
                                  std::mt19937_64& rng,
                                  double sample_rate_hz = 1.0,
                                  std::vector<std::string> labels = {}) {
    model.validate();
    if (samples < 2) throw std::invalid_argument("simulate_wn_rw: need T >= 2");
    const Eigen::Index p = model.sensors();
    const Eigen::MatrixXd color_q = detail::coloring_matrix(model.rw_innovation_cov);
    const Eigen::VectorXd wn_sd = model.wn_variances.cwiseSqrt();

    std::normal_distribution<double> gauss;
    Eigen::MatrixXd data(p, samples);
    Eigen::VectorXd walk = Eigen::VectorXd::Zero(p);
    for (Eigen::Index t = 0; t < samples; ++t) {
        walk += color_q * detail::standard_normal_vector(p, rng, gauss);
        data.col(t) = walk + wn_sd.cwiseProduct(detail::standard_normal_vector(p, rng, gauss));
        data.col(t).array() += model.constant_rate;
    }
    return make_signal_array(std::move(data), sample_rate_hz, std::move(labels));
}

/**
 * @brief Simulate the white-noise + sum-of-AR(1) array model.
 *
 * Each AR component starts from its stationary distribution (covariance
 * P_m / (1 - phi_m^2)); pass burn_in > 0 to instead advance that many warmup
 * epochs before recording. Draw order: per component stationary start
 * (components ascending), then per epoch each component's innovations
 * followed by the white noise.
 */
inline SignalArray simulate_wn_ar1(const WnAr1Model& model, Eigen::Index samples,
                                   std::mt19937_64& rng,
                                   double sample_rate_hz = 1.0,
                                   std::vector<std::string> labels = {},
                                   Eigen::Index burn_in = 0) {
    model.validate();
    if (samples < 2) throw std::invalid_argument("simulate_wn_ar1: need T >= 2");
    const Eigen::Index p = model.sensors();
    const std::size_t m = model.components.size();

    std::vector<Eigen::MatrixXd> colors;
    colors.reserve(m);
    for (const auto& comp : model.components)
        colors.push_back(detail::coloring_matrix(comp.innovation_cov));
    const Eigen::VectorXd wn_sd = model.wn_variances.cwiseSqrt();

    std::normal_distribution<double> gauss;
    std::vector<Eigen::VectorXd> state(m);
    for (std::size_t c = 0; c < m; ++c) {
        const double phi = model.components[c].phi;
        const double stationary_scale = 1.0 / std::sqrt(1.0 - phi * phi);
        state[c] = stationary_scale * (colors[c] * detail::standard_normal_vector(p, rng, gauss));
    }
    for (Eigen::Index t = 0; t < burn_in; ++t)
        for (std::size_t c = 0; c < m; ++c)
            state[c] = model.components[c].phi * state[c] +
                       colors[c] * detail::standard_normal_vector(p, rng, gauss);

    Eigen::MatrixXd data(p, samples);
    for (Eigen::Index t = 0; t < samples; ++t) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
        for (std::size_t c = 0; c < m; ++c) {
            state[c] = model.components[c].phi * state[c] +
                       colors[c] * detail::standard_normal_vector(p, rng, gauss);
            x += state[c];
        }
        x += wn_sd.cwiseProduct(detail::standard_normal_vector(p, rng, gauss));
        data.col(t) = x;
    }
    return make_signal_array(std::move(data), sample_rate_hz, std::move(labels));
}

/// Scale factor mapping a white-noise covariance to its level-j Haar wavelet
/// covariance: 1 / tau_j.
inline double haar_wn_factor(double tau) { return 1.0 / tau; }

/// Scale factor mapping a random-walk innovation covariance to its level-j
/// Haar wavelet covariance: (tau_j^2 + 2) / (12 tau_j).
inline double haar_rw_factor(double tau) { return (tau * tau + 2.0) / (12.0 * tau); }

/**
 * @brief Exact level-j wavelet covariance matrix of the WN + RW model:
 *        A_j = R / tau_j + Q (tau_j^2 + 2) / (12 tau_j), tau_j = 2^j.
 */
inline Eigen::MatrixXd wn_rw_wccv(const WnRwModel& model, int level) {
    if (level < 1) throw std::invalid_argument("wn_rw_wccv: level must be >= 1");
    const double tau = haar_scale(level);
    Eigen::MatrixXd a = model.wn_variances.asDiagonal();
    a *= haar_wn_factor(tau);
    a += haar_rw_factor(tau) * model.rw_innovation_cov;
    return a;
}

/// All closed-form matrices A_1..A_J.
inline std::vector<Eigen::MatrixXd> wn_rw_wccv_all(const WnRwModel& model, int levels) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(levels));
    for (int j = 1; j <= levels; ++j) out.push_back(wn_rw_wccv(model, j));
    return out;
}

/**
 * @brief Scalar white-noise variance and random-walk innovation variance fit.
 */
struct ScalarWnRwFit {
    double wn_variance = 0.0;   ///< sigma^2
    double rw_variance = 0.0;   ///< gamma^2
};

/**
 * @brief Fit (sigma^2, gamma^2) to an estimated wavelet-variance curve by
 *        nonnegative least squares against the WN + RW model curve.
 *
 * Minimizes sum_j (nu_j - sigma^2 / tau_j - gamma^2 (tau_j^2+2)/(12 tau_j))^2
 * over sigma^2, gamma^2 >= 0. The problem is linear in the two parameters;
 * when the unconstrained solution leaves the quadrant, each coordinate is
 * clamped at zero in turn, the free coordinate re-solved, and the feasible
 * candidate with the smaller residual returned.
 */
inline ScalarWnRwFit gmwm_fit_wn_rw_from_wv(const Eigen::VectorXd& wv_curve) {
    const Eigen::Index levels = wv_curve.size();
    if (levels < 2) throw std::invalid_argument("gmwm fit: need at least two levels");
    Eigen::VectorXd a(levels), b(levels);
    for (Eigen::Index j = 0; j < levels; ++j) {
        const double tau = haar_scale(static_cast<int>(j) + 1);
        a[j] = haar_wn_factor(tau);
        b[j] = haar_rw_factor(tau);
    }
    const double aa = a.squaredNorm(), bb = b.squaredNorm(), ab = a.dot(b);
    const double ay = a.dot(wv_curve), by = b.dot(wv_curve);

    auto residual = [&](double s, double g) {
        return (wv_curve - s * a - g * b).squaredNorm();
    };

    const double det = aa * bb - ab * ab;
    double s = 0.0, g = 0.0;
    if (det > 0.0) {
        s = (bb * ay - ab * by) / det;
        g = (aa * by - ab * ay) / det;
    }
    if (s >= 0.0 && g >= 0.0 && det > 0.0) return {s, g};

    const double s_only = std::max(0.0, ay / aa);
    const double g_only = std::max(0.0, by / bb);
    if (residual(s_only, 0.0) <= residual(0.0, g_only)) return {s_only, 0.0};
    return {0.0, g_only};
}

/// Fit from a raw single-sensor signal: estimates the wavelet variances up to
/// `levels` and runs the curve fit above.
inline ScalarWnRwFit gmwm_fit_wn_rw(const Eigen::VectorXd& signal, int levels) {
    Eigen::MatrixXd row(1, signal.size());
    row.row(0) = signal;
    const WaveletPyramid pyr = modwt(make_signal_array(std::move(row)), levels);
    Eigen::VectorXd wv(levels);
    for (int j = 1; j <= levels; ++j) wv[j - 1] = wccv_hat(pyr, 0, 0, j);
    return gmwm_fit_wn_rw_from_wv(wv);
}

}  // namespace svo::models
