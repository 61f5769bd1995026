// Monte Carlo study harnesses: out-of-sample method comparison and interval
// coverage.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svo/baselines.hpp"
#include "svo/bootstrap.hpp"
#include "svo/inference.hpp"
#include "svo/models.hpp"
#include "svo/optimize.hpp"
#include "svo/parallel.hpp"
#include "svo/presets.hpp"
#include "svo/rng.hpp"
#include "svo/wavelet.hpp"
#include "svo/weights.hpp"

namespace svo::protocol {

// ---------------------------------------------------------------------------
// Two-stage comparison study
// ---------------------------------------------------------------------------

struct StudyConfig {
    models::PresetArrayModel model;
    Eigen::Index samples = 1 << 15;   ///< T per simulated array
    int levels = 0;                   ///< J; 0 selects the default for T
    int fit_arrays = 10;              ///< arrays used to estimate coefficients
    int eval_arrays = 3;              ///< fresh arrays per fitted coefficient vector
    bool with_gmwm = true;            ///< also fit (sigma^2, gamma^2) per fused signal
    int gmwm_levels = 0;              ///< levels for the fit; 0 = study levels
    std::uint64_t seed = 1;
    int threads = 1;
};

struct MethodStudyResult {
    std::string name;
    std::vector<Eigen::VectorXd> coefficients;   ///< one per fit array
    Eigen::MatrixXd fused_wv;                    ///< (fit*eval) x J out-of-sample WV
    Eigen::VectorXd mean_wv;                     ///< per level
    Eigen::VectorXd se_wv;                       ///< standard error of the mean
    std::vector<double> gmwm_wn;                 ///< sigma^2 per fused signal
    std::vector<double> gmwm_rw;                 ///< gamma^2 per fused signal
};

struct StudyResult {
    int levels = 0;
    Eigen::VectorXd taus;                        ///< 2^j
    std::vector<MethodStudyResult> methods;

    const MethodStudyResult& method(std::string_view name) const {
        for (const auto& m : methods)
            if (m.name == name) return m;
        throw std::invalid_argument("study: no method named '" + std::string(name) + "'");
    }
};

/**
 * @brief Run the two-stage out-of-sample protocol.
 *
 * Stage 1 simulates `fit_arrays` independent arrays and estimates, per array,
 * the coefficients of every method: equal weights, the scale-weighted optimum
 * under the long-scale and short-scale presets (adapted to J), the
 * random-walk minimizer with the model's true innovation covariance (WN + RW
 * models only) and with the moment-estimated covariance. Stage 2 simulates
 * `eval_arrays` fresh arrays per fit array — shared across methods so the
 * comparison is paired — and records each method's fused wavelet variance per
 * level, plus optional white-noise / random-walk parameter fits of the fused
 * curves. Seeds are derived per array index, so results do not depend on the
 * thread count.
 */
inline StudyResult run_study(const StudyConfig& config) {
    const Eigen::Index p = config.model.sensors();
    const int levels = config.levels > 0
                           ? config.levels
                           : default_decomposition_level(config.samples);
    const WeightVector omega_long = preset_weights_for("long-scale", levels);
    const WeightVector omega_short = preset_weights_for("short-scale", levels);
    const bool has_oracle_q = std::holds_alternative<models::WnRwModel>(config.model.model);

    std::vector<std::string> names = {"eq", "svo-long", "svo-short", "rdvg-est"};
    if (has_oracle_q) names.insert(names.begin() + 3, "rdvg-oracle");
    const int n_methods = static_cast<int>(names.size());
    const int n_fit = config.fit_arrays;
    const int n_eval = config.eval_arrays;
    if (n_fit < 1 || n_eval < 1)
        throw std::invalid_argument("study: need at least one fit and one eval array");

    // Stage 1: coefficients per fit array and method.
    std::vector<std::vector<Eigen::VectorXd>> coeffs(
        static_cast<std::size_t>(n_methods),
        std::vector<Eigen::VectorXd>(static_cast<std::size_t>(n_fit)));
    svo::detail::parallel_for(n_fit, config.threads, [&](std::int64_t r) {
        auto stream = rng::substream(config.seed, {1u, static_cast<std::uint32_t>(r)});
        const SignalArray arr = models::simulate(config.model, config.samples, stream);
        const WaveletPyramid pyr = modwt(arr, levels);
        const ScaleCovariances cov = wccv_matrices(pyr, omega_long);

        auto store = [&](std::string_view name, Eigen::VectorXd c) {
            for (int m = 0; m < n_methods; ++m)
                if (names[static_cast<std::size_t>(m)] == name)
                    coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)] =
                        std::move(c);
        };
        store("eq", baselines::equal_weights(p).c);
        store("svo-long", optimal_coefficients(aggregate(cov.per_level, omega_long)).c);
        store("svo-short", optimal_coefficients(aggregate(cov.per_level, omega_short)).c);
        if (has_oracle_q)
            store("rdvg-oracle",
                  baselines::rdvg_coefficients(
                      std::get<models::WnRwModel>(config.model.model).rw_innovation_cov)
                      .c);
        store("rdvg-est", baselines::rdvg_coefficients(
                              baselines::estimate_rw_innovation_cov(arr))
                              .c);
    });

    // Stage 2: fresh arrays, one per (fit array, eval index), shared across
    // methods; fused WV per level via the quadratic form identity.
    const int cells = n_fit * n_eval;
    std::vector<Eigen::MatrixXd> fused(static_cast<std::size_t>(n_methods),
                                       Eigen::MatrixXd(cells, levels));
    const int gmwm_levels = config.gmwm_levels > 0 ? config.gmwm_levels : levels;
    std::vector<Eigen::MatrixXd> fits_wn(static_cast<std::size_t>(n_methods),
                                         Eigen::MatrixXd(cells, 1));
    std::vector<Eigen::MatrixXd> fits_rw = fits_wn;

    svo::detail::parallel_for(cells, config.threads, [&](std::int64_t cell) {
        const int r = static_cast<int>(cell) / n_eval;
        const int e = static_cast<int>(cell) % n_eval;
        auto stream = rng::substream(
            config.seed, {2u, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(e)});
        const SignalArray arr = models::simulate(config.model, config.samples, stream);
        const WaveletPyramid pyr = modwt(arr, levels);
        std::vector<Eigen::MatrixXd> per_level;
        per_level.reserve(static_cast<std::size_t>(levels));
        for (int j = 1; j <= levels; ++j) per_level.push_back(wccv_matrix(pyr, j));

        for (int m = 0; m < n_methods; ++m) {
            const CoefficientVector c{
                coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)]};
            const Eigen::VectorXd wv = virtual_wv(per_level, c);
            fused[static_cast<std::size_t>(m)].row(cell) = wv.transpose();
            if (config.with_gmwm) {
                const auto fit =
                    models::gmwm_fit_wn_rw_from_wv(wv.head(std::min(gmwm_levels, levels)));
                fits_wn[static_cast<std::size_t>(m)](cell, 0) = fit.wn_variance;
                fits_rw[static_cast<std::size_t>(m)](cell, 0) = fit.rw_variance;
            }
        }
    });

    StudyResult result;
    result.levels = levels;
    result.taus.resize(levels);
    for (int j = 1; j <= levels; ++j) result.taus[j - 1] = haar_scale(j);
    for (int m = 0; m < n_methods; ++m) {
        MethodStudyResult mr;
        mr.name = names[static_cast<std::size_t>(m)];
        mr.coefficients = coeffs[static_cast<std::size_t>(m)];
        mr.fused_wv = fused[static_cast<std::size_t>(m)];
        mr.mean_wv = mr.fused_wv.colwise().mean();
        mr.se_wv.resize(levels);
        for (int j = 0; j < levels; ++j) {
            const Eigen::VectorXd col = mr.fused_wv.col(j);
            const double mean = mr.mean_wv[j];
            const double var =
                (col.array() - mean).square().sum() / static_cast<double>(cells - 1);
            mr.se_wv[j] = std::sqrt(var / static_cast<double>(cells));
        }
        if (config.with_gmwm) {
            mr.gmwm_wn.assign(fits_wn[static_cast<std::size_t>(m)].data(),
                              fits_wn[static_cast<std::size_t>(m)].data() + cells);
            mr.gmwm_rw.assign(fits_rw[static_cast<std::size_t>(m)].data(),
                              fits_rw[static_cast<std::size_t>(m)].data() + cells);
        }
        result.methods.push_back(std::move(mr));
    }
    return result;
}

inline double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---------------------------------------------------------------------------
// Confidence interval coverage study
// ---------------------------------------------------------------------------

struct CoverageConfig {
    models::WnRwModel model;          ///< needs the closed-form WCCV for truth
    WeightVector omega;
    Eigen::Index samples = 1 << 15;
    int levels = 0;                   ///< 0 selects omega.levels()
    double alpha = 0.05;
    Eigen::Index block_size = 0;      ///< 0 selects the default for T
    int bootstrap_replicates = 200;
    int mc_replicates = 300;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct CoverageResult {
    Eigen::VectorXd true_coefficients;   ///< c0 from the closed-form aggregate
    Eigen::VectorXd coverage;            ///< per-coefficient hit rate
    Eigen::VectorXd mean_halfwidth;      ///< average interval half width
    int mc_replicates = 0;
};

/**
 * @brief Empirical coverage of the normal-theory intervals against the
 *        model-implied true coefficients.
 *
 * The true vector c0 comes from the closed-form per-level covariances of the
 * WN + RW model aggregated with the study weights. Each Monte Carlo replicate
 * simulates an array, estimates the coefficients, runs the block bootstrap
 * and checks which intervals capture c0. Replicate m uses seed substreams
 * tagged by m, so the result is thread-count independent.
 */
inline CoverageResult run_coverage(const CoverageConfig& config) {
    config.model.validate();
    const Eigen::Index p = config.model.sensors();
    const int levels = config.levels > 0 ? config.levels : config.omega.levels();
    if (config.omega.levels() != levels)
        throw std::invalid_argument("coverage: weight vector has " +
                                    std::to_string(config.omega.levels()) +
                                    " entries but J = " + std::to_string(levels));
    if (config.mc_replicates < 1)
        throw std::invalid_argument("coverage: need at least one MC replicate");

    const Eigen::MatrixXd a0_true =
        aggregate(models::wn_rw_wccv_all(config.model, levels), config.omega);
    const Eigen::VectorXd c0 = optimal_coefficients(a0_true).c;

    const int n = config.mc_replicates;
    Eigen::MatrixXd hits(p, n);
    Eigen::MatrixXd widths(p, n);
    svo::detail::parallel_for(n, config.threads, [&](std::int64_t m) {
        auto sim_stream = rng::substream(config.seed, {3u, static_cast<std::uint32_t>(m)});
        const SignalArray arr =
            models::simulate_wn_rw(config.model, config.samples, sim_stream);
        const WaveletPyramid pyr = modwt(arr, levels);
        const Eigen::VectorXd gamma_hat = wccv_vector(pyr);
        const Eigen::MatrixXd a0 =
            aggregate_from_wccv_vector(gamma_hat, config.omega, p);
        const Eigen::VectorXd c_hat = optimal_coefficients(a0).c;

        inference::BootstrapConfig boot;
        boot.block_size = config.block_size;
        boot.replicates = config.bootstrap_replicates;
        // Per-replicate bootstrap seed, fixed relative to the MC index.
        auto seed_stream = rng::substream(config.seed, {4u, static_cast<std::uint32_t>(m)});
        boot.rng_seed = seed_stream();

        const Eigen::MatrixXd v_star = inference::bootstrap_wccv_covariance(pyr, boot);
        const Eigen::MatrixXd jac =
            inference::coefficient_jacobian(gamma_hat, config.omega, p);
        const Eigen::MatrixXd sigma = inference::sandwich_covariance(jac, v_star);
        const auto ci =
            inference::confidence_intervals(c_hat, sigma, config.alpha, config.samples);
        for (Eigen::Index i = 0; i < p; ++i) {
            hits(i, static_cast<Eigen::Index>(m)) =
                (ci.lower[i] <= c0[i] && c0[i] <= ci.upper[i]) ? 1.0 : 0.0;
            widths(i, static_cast<Eigen::Index>(m)) = 0.5 * (ci.upper[i] - ci.lower[i]);
        }
    });

    CoverageResult result;
    result.true_coefficients = c0;
    result.coverage = hits.rowwise().mean();
    result.mean_halfwidth = widths.rowwise().mean();
    result.mc_replicates = n;
    return result;
}

}  // namespace svo::protocol
