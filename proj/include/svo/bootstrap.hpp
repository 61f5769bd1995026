// Moving block bootstrap for the flattened WCCV estimator.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "svo/parallel.hpp"
#include "svo/rng.hpp"
#include "svo/wavelet.hpp"

namespace svo::inference {

/**
 * @brief Moving-block-bootstrap parameters.
 */
struct BootstrapConfig {
    Eigen::Index block_size = 0;   ///< l; 0 selects default_block_size(T, M_J)
    int replicates = 500;          ///< H
    std::uint64_t rng_seed = 0;
};

/// ceil(T^(1/3)) clamped below at 2; exact at perfect cubes.
inline Eigen::Index default_block_size(Eigen::Index samples) {
    if (samples < 8) throw std::invalid_argument("default_block_size: need T >= 8");
    const double root = std::cbrt(static_cast<double>(samples));
    Eigen::Index l = static_cast<Eigen::Index>(std::llround(std::floor(root)));
    while ((l + 1) * (l + 1) * (l + 1) <= samples) ++l;   // guard cbrt round-off
    if (l * l * l < samples) ++l;                         // ceiling
    return std::max<Eigen::Index>(l, 2);
}

/// As above, additionally clamped to the number of coarsest-level coefficients.
inline Eigen::Index default_block_size(Eigen::Index samples, Eigen::Index coarsest_count) {
    return std::min(default_block_size(samples), coarsest_count);
}

/**
 * @brief Wavelet coefficients cut to a common length across levels.
 *
 * per_sensor[i] is the J x M_J matrix whose row j holds the first M_J
 * level-j coefficients of sensor i; removed[j-1] = D_j = M_j - M_J counts
 * the coefficients dropped from level j (D_J = 0).
 */
struct TrimmedCoefficients {
    std::vector<Eigen::MatrixXd> per_sensor;
    std::vector<Eigen::Index> removed;

    Eigen::Index common_length() const {
        return per_sensor.empty() ? 0 : per_sensor.front().cols();
    }
};

inline TrimmedCoefficients trim(const WaveletPyramid& pyramid) {
    const int levels = pyramid.max_level();
    if (levels < 1) throw std::invalid_argument("trim: empty pyramid");
    const Eigen::Index p = pyramid.sensors();
    const Eigen::Index m_coarse = pyramid.coefficient_count(levels);

    TrimmedCoefficients out;
    out.per_sensor.assign(static_cast<std::size_t>(p),
                          Eigen::MatrixXd(levels, m_coarse));
    out.removed.resize(static_cast<std::size_t>(levels));
    for (int j = 1; j <= levels; ++j) {
        const Eigen::MatrixXd& w = pyramid.levels[static_cast<std::size_t>(j - 1)];
        out.removed[static_cast<std::size_t>(j - 1)] = w.cols() - m_coarse;
        for (Eigen::Index i = 0; i < p; ++i)
            out.per_sensor[static_cast<std::size_t>(i)].row(j - 1) =
                w.row(i).head(m_coarse);
    }
    return out;
}

/**
 * @brief One replicate's resampling indices.
 *
 * Draw order within a replicate is fixed: the B block starting points first,
 * then one completion starting point per level j = 1..J in ascending order
 * (drawn even when D_j = 0 so the stream layout is level-independent). All
 * indices are 0-based.
 */
struct MbbDraw {
    std::vector<Eigen::Index> block_starts;        ///< size B
    std::vector<Eigen::Index> completion_starts;   ///< size J
};

namespace detail {

/// Number of blocks: M_J / l when divisible, floor(M_J / l) + 1 otherwise
/// (the final block is truncated to the leftover columns).
inline Eigen::Index block_count(Eigen::Index common_length, Eigen::Index block_size) {
    const Eigen::Index whole = common_length / block_size;
    return (common_length % block_size == 0) ? whole : whole + 1;
}

inline Eigen::Index block_length(Eigen::Index b, Eigen::Index block_count,
                                 Eigen::Index common_length, Eigen::Index block_size) {
    if (b + 1 < block_count || common_length % block_size == 0) return block_size;
    return common_length - (block_count - 1) * block_size;
}

}  // namespace detail

inline MbbDraw draw_mbb(std::mt19937_64& rng, const std::vector<Eigen::Index>& level_counts,
                        Eigen::Index block_size) {
    if (level_counts.empty()) throw std::invalid_argument("draw_mbb: no levels");
    const Eigen::Index m_coarse = level_counts.back();
    if (block_size < 1 || block_size > m_coarse)
        throw std::invalid_argument("draw_mbb: block size " + std::to_string(block_size) +
                                    " must lie in 1..M_J = " + std::to_string(m_coarse));
    MbbDraw draw;
    const Eigen::Index blocks = detail::block_count(m_coarse, block_size);
    draw.block_starts.resize(static_cast<std::size_t>(blocks));
    std::uniform_int_distribution<Eigen::Index> start_dist(0, m_coarse - block_size);
    for (auto& s : draw.block_starts) s = start_dist(rng);

    draw.completion_starts.resize(level_counts.size());
    for (std::size_t j = 0; j < level_counts.size(); ++j) {
        const Eigen::Index removed = level_counts[j] - m_coarse;
        std::uniform_int_distribution<Eigen::Index> comp_dist(0, level_counts[j] - removed);
        draw.completion_starts[j] = comp_dist(rng);
    }
    return draw;
}

/**
 * @brief Materialized block-bootstrap resample of the full pyramid.
 *
 * Columns t = 1..M_J are taken jointly across all sensors and levels from the
 * trimmed matrices using shared block starting points; columns M_J+1..M_j of
 * each level are completed with a contiguous run of length D_j from the
 * original (untrimmed) level-j coefficients, one starting point per level
 * shared across sensors. Returns per-level p x M_j matrices.
 */
inline std::vector<Eigen::MatrixXd> mbb_resample(const TrimmedCoefficients& trimmed,
                                                 const WaveletPyramid& pyramid,
                                                 const BootstrapConfig& config,
                                                 std::mt19937_64& rng) {
    const int levels = pyramid.max_level();
    const Eigen::Index p = pyramid.sensors();
    const Eigen::Index m_coarse = trimmed.common_length();
    const Eigen::Index block =
        config.block_size > 0 ? config.block_size
                              : default_block_size(pyramid.signal_length, m_coarse);

    std::vector<Eigen::Index> level_counts(static_cast<std::size_t>(levels));
    for (int j = 1; j <= levels; ++j)
        level_counts[static_cast<std::size_t>(j - 1)] = pyramid.coefficient_count(j);
    const MbbDraw draw = draw_mbb(rng, level_counts, block);

    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(levels));
    for (int j = 1; j <= levels; ++j)
        out.emplace_back(p, level_counts[static_cast<std::size_t>(j - 1)]);

    // Joint block part over t = 1..M_J.
    Eigen::Index written = 0;
    const Eigen::Index blocks = static_cast<Eigen::Index>(draw.block_starts.size());
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index len = detail::block_length(b, blocks, m_coarse, block);
        const Eigen::Index src = draw.block_starts[static_cast<std::size_t>(b)];
        for (int j = 0; j < levels; ++j)
            for (Eigen::Index i = 0; i < p; ++i)
                out[static_cast<std::size_t>(j)].row(i).segment(written, len) =
                    trimmed.per_sensor[static_cast<std::size_t>(i)].row(j).segment(src, len);
        written += len;
    }

    // Per-level completion from the original coefficients.
    for (int j = 0; j < levels; ++j) {
        const Eigen::Index removed = level_counts[static_cast<std::size_t>(j)] - m_coarse;
        if (removed == 0) continue;
        const Eigen::Index src = draw.completion_starts[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(j)].rightCols(removed) =
            pyramid.levels[static_cast<std::size_t>(j)].middleCols(src, removed);
    }
    return out;
}

namespace detail {

/// Flattened WCCV vector of one resample, accumulated directly from the
/// stored coefficients (the resampled streams are only ever used through
/// outer products, so they are never materialized).
inline Eigen::VectorXd resampled_wccv_vector(const WaveletPyramid& pyramid,
                                             const MbbDraw& draw, Eigen::Index block_size,
                                             Eigen::Index m_coarse) {
    const int levels = pyramid.max_level();
    const Eigen::Index p = pyramid.sensors();
    Eigen::VectorXd gamma(levels * p * p);
    Eigen::MatrixXd acc(p, p);
    const Eigen::Index blocks = static_cast<Eigen::Index>(draw.block_starts.size());

    for (int j = 1; j <= levels; ++j) {
        const Eigen::MatrixXd& w = pyramid.levels[static_cast<std::size_t>(j - 1)];
        acc.setZero();
        for (Eigen::Index b = 0; b < blocks; ++b) {
            const Eigen::Index len = block_length(b, blocks, m_coarse, block_size);
            const Eigen::Index src = draw.block_starts[static_cast<std::size_t>(b)];
            acc.selfadjointView<Eigen::Lower>().rankUpdate(w.middleCols(src, len), 1.0);
        }
        const Eigen::Index removed = w.cols() - m_coarse;
        if (removed > 0) {
            const Eigen::Index src = draw.completion_starts[static_cast<std::size_t>(j - 1)];
            acc.selfadjointView<Eigen::Lower>().rankUpdate(w.middleCols(src, removed), 1.0);
        }
        acc /= static_cast<double>(w.cols());
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index k = 0; k < p; ++k)
                gamma[wccv_flat_index(j, i, k, p)] = i >= k ? acc(i, k) : acc(k, i);
    }
    return gamma;
}

}  // namespace detail

/**
 * @brief Moving-block-bootstrap estimate of the sampling covariance of the
 *        flattened WCCV vector.
 *
 * Runs H replicates; replicate h uses the RNG substream (rng_seed, h) with
 * the draw order documented on MbbDraw, computes the resample's WCCV vector
 * over the full per-level lengths M_j, and the estimate is
 *   V* = (T/H) sum_h (g*_h - g)(g*_h - g)'
 * with g the WCCV vector of the original untrimmed coefficients. Replicates
 * may run on several threads; the reduction is performed in replicate order,
 * so the result is bit-identical for every thread count. The returned matrix
 * is symmetric positive semidefinite by construction.
 */
inline Eigen::MatrixXd bootstrap_wccv_covariance(const WaveletPyramid& pyramid,
                                                 const BootstrapConfig& config,
                                                 int threads = 1) {
    const int levels = pyramid.max_level();
    const Eigen::Index p = pyramid.sensors();
    if (config.replicates < 2)
        throw std::invalid_argument("bootstrap: need at least 2 replicates");
    const Eigen::Index m_coarse = pyramid.coefficient_count(levels);
    const Eigen::Index block =
        config.block_size > 0 ? config.block_size
                              : default_block_size(pyramid.signal_length, m_coarse);
    if (block < 1 || block > m_coarse)
        throw std::invalid_argument("bootstrap: block size " + std::to_string(block) +
                                    " must lie in 1..M_J = " + std::to_string(m_coarse));

    std::vector<Eigen::Index> level_counts(static_cast<std::size_t>(levels));
    for (int j = 1; j <= levels; ++j)
        level_counts[static_cast<std::size_t>(j - 1)] = pyramid.coefficient_count(j);

    const Eigen::VectorXd gamma_hat = wccv_vector(pyramid);
    const Eigen::Index dim = gamma_hat.size();
    const int reps = config.replicates;

    Eigen::MatrixXd deviations(dim, reps);
    svo::detail::parallel_for(reps, threads, [&](std::int64_t h) {
        auto stream = rng::substream(config.rng_seed, {static_cast<std::uint32_t>(h)});
        const MbbDraw draw = draw_mbb(stream, level_counts, block);
        deviations.col(static_cast<Eigen::Index>(h)) =
            detail::resampled_wccv_vector(pyramid, draw, block, m_coarse) - gamma_hat;
    });

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, dim);
    v.selfadjointView<Eigen::Lower>().rankUpdate(
        deviations, static_cast<double>(pyramid.signal_length) / static_cast<double>(reps));
    v.triangularView<Eigen::StrictlyUpper>() = v.transpose();

    // Cheap sanity probes: an outer-product sum cannot have a negative
    // quadratic form beyond round-off.
    auto probe_rng = rng::substream(config.rng_seed, {0x50534Du});
    std::normal_distribution<double> gauss;
    const double tol = 1e-10 * std::max(1.0, v.trace());
    for (int probe = 0; probe < 3; ++probe) {
        Eigen::VectorXd x(dim);
        for (Eigen::Index q = 0; q < dim; ++q) x[q] = gauss(probe_rng);
        x /= x.norm();
        if (x.dot(v * x) < -tol)
            throw std::logic_error("bootstrap: covariance lost positive semidefiniteness");
    }
    return v;
}

}  // namespace svo::inference
