// Haar maximal-overlap wavelet transform and wavelet (cross-)covariance.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "svo/signal.hpp"
#include "svo/weights.hpp"

namespace svo {

/// Filter length at level j (Haar): L_j = 2^j.
inline Eigen::Index haar_filter_length(int level) {
    if (level < 1) throw std::invalid_argument("wavelet: level must be >= 1");
    if (level > 62) throw std::invalid_argument("wavelet: level too large");
    return Eigen::Index{1} << level;
}

/// Dyadic scale tau_j = 2^j associated with level j.
inline double haar_scale(int level) { return static_cast<double>(haar_filter_length(level)); }

/**
 * @brief Level-j Haar wavelet filter taps.
 *
 * The first 2^(j-1) taps are +2^(-j), the last 2^(j-1) are -2^(-j): the
 * filter contrasts two adjacent block averages scaled by 1/2. Taps sum to
 * zero and their squares sum to 2^(-j), so the wavelet variance of unit white
 * noise at level j is exactly 2^(-j).
 */
inline Eigen::VectorXd haar_filter(int level) {
    const Eigen::Index len = haar_filter_length(level);
    const double tap = 1.0 / static_cast<double>(len);
    Eigen::VectorXd h(len);
    h.head(len / 2).setConstant(tap);
    h.tail(len / 2).setConstant(-tap);
    return h;
}

/// Largest J with at least one full-support coefficient: floor(log2(T)).
inline int max_decomposition_level(Eigen::Index samples) {
    if (samples < 2) throw std::invalid_argument("wavelet: need at least two samples");
    int j = 0;
    while ((Eigen::Index{1} << (j + 1)) <= samples) ++j;
    return j;
}

/// Default J used when unspecified: floor(log2(T)) - 1, at least 1. Keeps the
/// coarsest level populated with enough coefficients for resampling.
inline int default_decomposition_level(Eigen::Index samples) {
    return std::max(1, max_decomposition_level(samples) - 1);
}

/**
 * @brief Full-support Haar MODWT coefficients of a signal array.
 *
 * levels[j-1] is the p x M_j matrix of level-j coefficients with
 * M_j = T - 2^j + 1; only windows entirely inside the record are kept (no
 * circular extension), and coefficients are re-indexed to t = 1..M_j.
 */
struct WaveletPyramid {
    std::vector<Eigen::MatrixXd> levels;
    Eigen::Index signal_length = 0;

    int max_level() const { return static_cast<int>(levels.size()); }
    Eigen::Index sensors() const { return levels.empty() ? 0 : levels.front().rows(); }
    Eigen::Index coefficient_count(int level) const {
        return levels.at(static_cast<std::size_t>(level - 1)).cols();
    }
};

/**
 * @brief Haar MODWT up to level J.
 *
 * Coefficient t (1-based) at level j is
 *   W_{i,j,t} = sum_{l=0}^{L_j-1} h_{j,l} X_{i,t+L_j-1-l},
 * i.e. the difference of the two adjacent half-window means scaled by 1/2,
 * evaluated via cumulative sums so every level costs O(T). A constant signal
 * maps to all-zero coefficients at every level.
 *
 * Throws when 2^J > T, naming the largest admissible J.
 */
inline WaveletPyramid modwt(const SignalArray& signals, int max_level) {
    signals.validate();
    const Eigen::Index p = signals.sensors();
    const Eigen::Index T = signals.length();
    if (max_level < 1) throw std::invalid_argument("modwt: J must be >= 1");
    const int admissible = max_decomposition_level(T);
    if (max_level > admissible)
        throw std::invalid_argument("modwt: J = " + std::to_string(max_level) +
                                    " needs 2^J <= T = " + std::to_string(T) +
                                    "; the maximum admissible J is " +
                                    std::to_string(admissible));

    WaveletPyramid pyr;
    pyr.signal_length = T;
    pyr.levels.reserve(static_cast<std::size_t>(max_level));

    // prefix[i](t) = sum of the first t samples of sensor i
    Eigen::MatrixXd prefix(p, T + 1);
    prefix.col(0).setZero();
    for (Eigen::Index t = 0; t < T; ++t)
        prefix.col(t + 1) = prefix.col(t) + signals.data.col(t);

    for (int j = 1; j <= max_level; ++j) {
        const Eigen::Index len = haar_filter_length(j);
        const Eigen::Index half = len / 2;
        const Eigen::Index count = T - len + 1;
        const double inv_scale = 1.0 / static_cast<double>(len);
        Eigen::MatrixXd coeffs(p, count);
        for (Eigen::Index t = 0; t < count; ++t)
            coeffs.col(t) =
                (prefix.col(t + len) - 2.0 * prefix.col(t + half) + prefix.col(t)) * inv_scale;
        pyr.levels.push_back(std::move(coeffs));
    }
    return pyr;
}

inline WaveletPyramid modwt(const SignalArray& signals) {
    return modwt(signals, default_decomposition_level(signals.length()));
}

namespace detail {
inline void check_level(const WaveletPyramid& pyr, int level) {
    if (level < 1 || level > pyr.max_level())
        throw std::invalid_argument("wavelet: level " + std::to_string(level) +
                                    " outside 1.." + std::to_string(pyr.max_level()));
}
inline void check_sensor(const WaveletPyramid& pyr, Eigen::Index sensor) {
    if (sensor < 0 || sensor >= pyr.sensors())
        throw std::invalid_argument("wavelet: sensor index out of range");
}
}  // namespace detail

/**
 * @brief Lag-zero wavelet cross-covariance estimate at one level.
 *
 * Returns (1/M_j) sum_t W_{i,j,t} W_{k,j,t}; symmetric in (i, k) and equal to
 * the level-j wavelet variance estimate when i == k. Sensors are 0-based,
 * levels 1-based.
 */
inline double wccv_hat(const WaveletPyramid& pyramid, Eigen::Index sensor_i,
                       Eigen::Index sensor_k, int level) {
    detail::check_level(pyramid, level);
    detail::check_sensor(pyramid, sensor_i);
    detail::check_sensor(pyramid, sensor_k);
    const Eigen::MatrixXd& w = pyramid.levels[static_cast<std::size_t>(level - 1)];
    return w.row(sensor_i).dot(w.row(sensor_k)) / static_cast<double>(w.cols());
}

/**
 * @brief Per-level wavelet cross-covariance matrices and their weighted sum.
 *
 * per_level[j-1] is the symmetric p x p matrix of lag-zero wavelet
 * (cross-)covariances at level j; `weighted` is sum_j omega_j per_level[j-1].
 */
struct ScaleCovariances {
    std::vector<Eigen::MatrixXd> per_level;
    Eigen::MatrixXd weighted;
    WeightVector weights;

    int levels() const { return static_cast<int>(per_level.size()); }
};

/// Symmetric p x p WCCV matrix estimate at one level (computed once per pair,
/// mirrored).
inline Eigen::MatrixXd wccv_matrix(const WaveletPyramid& pyramid, int level) {
    detail::check_level(pyramid, level);
    const Eigen::MatrixXd& w = pyramid.levels[static_cast<std::size_t>(level - 1)];
    const Eigen::Index p = w.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    a.selfadjointView<Eigen::Lower>().rankUpdate(w, 1.0 / static_cast<double>(w.cols()));
    a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
    return a;
}

inline ScaleCovariances wccv_matrices(const WaveletPyramid& pyramid,
                                      const WeightVector& weights) {
    if (weights.levels() != pyramid.max_level())
        throw std::invalid_argument("wccv_matrices: weight vector has " +
                                    std::to_string(weights.levels()) + " entries but J = " +
                                    std::to_string(pyramid.max_level()));
    ScaleCovariances out;
    out.weights = weights;
    const Eigen::Index p = pyramid.sensors();
    out.weighted = Eigen::MatrixXd::Zero(p, p);
    out.per_level.reserve(static_cast<std::size_t>(pyramid.max_level()));
    for (int j = 1; j <= pyramid.max_level(); ++j) {
        out.per_level.push_back(wccv_matrix(pyramid, j));
        out.weighted += weights.omega[j - 1] * out.per_level.back();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flattened WCCV vector
// ---------------------------------------------------------------------------

/// 0-based slot of (level j, sensors i, k) in the flattened WCCV vector:
/// level-major, then row-major over (i, k). Both (i, k) and (k, i) slots are
/// carried, so the vector has J * p^2 entries.
inline Eigen::Index wccv_flat_index(int level, Eigen::Index sensor_i, Eigen::Index sensor_k,
                                    Eigen::Index sensors) {
    return (static_cast<Eigen::Index>(level) - 1) * sensors * sensors + sensor_i * sensors +
           sensor_k;
}

/// Flattened estimate (length J * p^2) of all per-level WCCV matrices.
inline Eigen::VectorXd wccv_vector(const WaveletPyramid& pyramid) {
    const Eigen::Index p = pyramid.sensors();
    const int levels = pyramid.max_level();
    Eigen::VectorXd gamma(levels * p * p);
    for (int j = 1; j <= levels; ++j) {
        const Eigen::MatrixXd a = wccv_matrix(pyramid, j);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index k = 0; k < p; ++k)
                gamma[wccv_flat_index(j, i, k, p)] = a(i, k);
    }
    return gamma;
}

/// Rebuild the weighted aggregate matrix from a flattened WCCV vector.
inline Eigen::MatrixXd aggregate_from_wccv_vector(const Eigen::VectorXd& gamma,
                                                  const WeightVector& weights,
                                                  Eigen::Index sensors) {
    const int levels = weights.levels();
    if (gamma.size() != levels * sensors * sensors)
        throw std::invalid_argument("aggregate_from_wccv_vector: vector length mismatch");
    Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(sensors, sensors);
    for (int j = 1; j <= levels; ++j)
        for (Eigen::Index i = 0; i < sensors; ++i)
            for (Eigen::Index k = 0; k < sensors; ++k)
                a0(i, k) += weights.omega[j - 1] * gamma[wccv_flat_index(j, i, k, sensors)];
    return a0;
}

}  // namespace svo
