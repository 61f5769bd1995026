// Statistical validation suite. Each criterion prints one [PASS]/[FAIL] line;
// the exit code is the number of failures. An optional comma-separated list
// of criterion numbers runs a subset, e.g. `svo_acceptance 1,2,9`.
#include <Eigen/LU>

#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svo/svo.hpp"

using namespace svo;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

int g_threads = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// --------------------------------------------------------------------------
// 1. closed-form optimizer vs an independent KKT solve
// --------------------------------------------------------------------------

Eigen::VectorXd kkt_oracle(const Eigen::MatrixXd& a) {
    const Eigen::Index p = a.rows();
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(p + 1, p + 1);
    kkt.topLeftCorner(p, p) = 2.0 * a;
    kkt.topRightCorner(p, 1).setOnes();
    kkt.bottomLeftCorner(1, p).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
    rhs[p] = 1.0;
    return kkt.fullPivLu().solve(rhs).head(p);
}

Outcome criterion_optimizer_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng() % 7);
        Eigen::MatrixXd b(p, p);
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = gauss(rng);
        const Eigen::MatrixXd a =
            b * b.transpose() + 0.05 * Eigen::MatrixXd::Identity(p, p);
        const Eigen::VectorXd mine = optimal_coefficients(a).c;
        worst = std::max(worst, (mine - kkt_oracle(a)).cwiseAbs().maxCoeff());
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "max |c - oracle| = " << worst << " (tol 1e-10), " << elapsed << " s";
    return {worst < 1e-10 && elapsed < 1.0, detail.str()};
}

// --------------------------------------------------------------------------
// 2. transform and covariance estimator vs brute force
// --------------------------------------------------------------------------

Outcome criterion_transform_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(202);
    std::normal_distribution<double> gauss;
    double worst_w = 0.0, worst_g = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng() % 4);
        const Eigen::Index t = 64 + static_cast<Eigen::Index>(rng() % 193);
        const int levels = std::min(6, max_decomposition_level(t));
        Eigen::MatrixXd data(p, t);
        for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = gauss(rng);
        const SignalArray x = make_signal_array(data);
        const WaveletPyramid pyr = modwt(x, levels);
        for (int j = 1; j <= levels; ++j) {
            const Eigen::VectorXd taps = haar_filter(j);
            const Eigen::Index len = taps.size();
            const Eigen::Index count = t - len + 1;
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index s = 0; s < count; ++s) {
                    double acc = 0.0;
                    for (Eigen::Index l = 0; l < len; ++l)
                        acc += taps[l] * data(i, s + len - 1 - l);
                    worst_w = std::max(worst_w, std::abs(pyr.levels[j - 1](i, s) - acc));
                }
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index k = 0; k < p; ++k) {
                    double acc = 0.0;
                    for (Eigen::Index s = 0; s < count; ++s)
                        acc += pyr.levels[j - 1](i, s) * pyr.levels[j - 1](k, s);
                    acc /= static_cast<double>(count);
                    worst_g = std::max(worst_g, std::abs(wccv_hat(pyr, i, k, j) - acc));
                }
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "max transform dev = " << worst_w << ", max wccv dev = " << worst_g
           << " (tol 1e-12), " << elapsed << " s";
    return {worst_w < 1e-12 && worst_g < 1e-12 && elapsed < 5.0, detail.str()};
}

// --------------------------------------------------------------------------
// 3. estimated scale covariances vs the closed form (case 1)
// --------------------------------------------------------------------------

Outcome criterion_closed_form_wccv() {
    constexpr int kReps = 50;
    constexpr int kLevels = 10;
    constexpr Eigen::Index kT = Eigen::Index{1} << 18;
    const auto model = std::get<models::WnRwModel>(models::preset_model("case1").model);

    std::vector<std::vector<Eigen::MatrixXd>> estimates(
        kReps, std::vector<Eigen::MatrixXd>(kLevels));
    svo::detail::parallel_for(kReps, g_threads, [&](std::int64_t rep) {
        auto rng = rng::substream(303, {static_cast<std::uint32_t>(rep)});
        const WaveletPyramid pyr = modwt(models::simulate_wn_rw(model, kT, rng), kLevels);
        for (int j = 1; j <= kLevels; ++j)
            estimates[static_cast<std::size_t>(rep)][static_cast<std::size_t>(j - 1)] =
                wccv_matrix(pyr, j);
    });

    int violations = 0;
    double worst_z = 0.0;
    for (int j = 1; j <= kLevels; ++j) {
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(6, 6);
        for (int rep = 0; rep < kReps; ++rep)
            mean += estimates[static_cast<std::size_t>(rep)][static_cast<std::size_t>(j - 1)];
        mean /= kReps;
        Eigen::MatrixXd var = Eigen::MatrixXd::Zero(6, 6);
        for (int rep = 0; rep < kReps; ++rep) {
            const Eigen::MatrixXd d =
                estimates[static_cast<std::size_t>(rep)][static_cast<std::size_t>(j - 1)] -
                mean;
            var += d.cwiseProduct(d);
        }
        var /= (kReps - 1);
        const Eigen::MatrixXd truth = models::wn_rw_wccv(model, j);
        for (Eigen::Index i = 0; i < 6; ++i)
            for (Eigen::Index k = 0; k < 6; ++k) {
                const double se = std::sqrt(var(i, k) / kReps);
                const double z = std::abs(mean(i, k) - truth(i, k)) / (se + 1e-300);
                worst_z = std::max(worst_z, z);
                if (z > 3.0) ++violations;
            }
    }
    std::ostringstream detail;
    detail << "levels 1.." << kLevels << ", T = 2^18, " << kReps
           << " replicates: max |z| = " << worst_z << ", entries beyond 3 SE: " << violations
           << "/360";
    return {violations == 0, detail.str()};
}

// --------------------------------------------------------------------------
// 4. interval coverage (case 1, short-scale weights)
// --------------------------------------------------------------------------

Outcome criterion_coverage() {
    protocol::CoverageConfig config;
    config.model = std::get<models::WnRwModel>(models::preset_model("case1").model);
    config.samples = Eigen::Index{1} << 15;
    config.levels = default_decomposition_level(config.samples);   // 14
    config.omega = preset_weights_for("short-scale", config.levels);
    config.alpha = 0.05;
    config.block_size = 0;   // default ceil(T^(1/3)) = 32
    config.bootstrap_replicates = 200;
    config.mc_replicates = 300;
    config.seed = 404;
    config.threads = g_threads;
    const protocol::CoverageResult result = protocol::run_coverage(config);

    bool ok = true;
    std::ostringstream detail;
    detail << "coverage per coefficient (band [0.91, 0.98]):";
    for (Eigen::Index i = 0; i < result.coverage.size(); ++i) {
        detail << ' ' << result.coverage[i];
        if (result.coverage[i] < 0.91 || result.coverage[i] > 0.98) ok = false;
    }
    return {ok, detail.str()};
}

// --------------------------------------------------------------------------
// 5. consistency of the coefficient estimator (case 1)
// --------------------------------------------------------------------------

Outcome criterion_consistency() {
    constexpr int kLevels = 12;   // fixed across lengths so c0 is one target
    constexpr int kReps = 50;
    const auto model = std::get<models::WnRwModel>(models::preset_model("case1").model);
    const WeightVector omega = preset_weights_for("short-scale", kLevels);
    const Eigen::VectorXd c0 =
        optimal_coefficients(aggregate(models::wn_rw_wccv_all(model, kLevels), omega)).c;

    std::vector<double> medians;
    for (const Eigen::Index t : {Eigen::Index{1} << 13, Eigen::Index{1} << 15,
                                 Eigen::Index{1} << 17}) {
        std::vector<double> errors(kReps);
        svo::detail::parallel_for(kReps, g_threads, [&](std::int64_t rep) {
            auto rng = rng::substream(505, {static_cast<std::uint32_t>(t),
                                            static_cast<std::uint32_t>(rep)});
            const WaveletPyramid pyr = modwt(models::simulate_wn_rw(model, t, rng), kLevels);
            const Eigen::VectorXd c_hat =
                optimal_coefficients(wccv_matrices(pyr, omega).weighted).c;
            errors[static_cast<std::size_t>(rep)] = (c_hat - c0).norm();
        });
        medians.push_back(protocol::median(errors));
    }
    const bool ok = medians[0] > medians[1] && medians[1] > medians[2];
    std::ostringstream detail;
    detail << "median |c_hat - c0| at T = 2^13, 2^15, 2^17: " << medians[0] << " > "
           << medians[1] << " > " << medians[2];
    return {ok, detail.str()};
}

// --------------------------------------------------------------------------
// 6 & 7. out-of-sample ordering studies
// --------------------------------------------------------------------------

struct Comparison {
    std::string label;
    int level;        // 1-based
    double mean_low;  // method expected to be lower
    double se_low;
    double mean_high;
    double se_high;
    double paired_mean_diff;   // low - high over shared eval arrays

    bool ordered() const { return paired_mean_diff <= 0.0; }
    bool clear() const { return mean_low + se_low < mean_high - se_high; }
};

Comparison compare_level(const protocol::StudyResult& study, const std::string& low,
                         const std::string& high, int level) {
    const auto& a = study.method(low);
    const auto& b = study.method(high);
    const Eigen::VectorXd diff = a.fused_wv.col(level - 1) - b.fused_wv.col(level - 1);
    return Comparison{low + " < " + high,
                      level,
                      a.mean_wv[level - 1],
                      a.se_wv[level - 1],
                      b.mean_wv[level - 1],
                      b.se_wv[level - 1],
                      diff.mean()};
}

void describe(std::ostringstream& out, const Comparison& c, bool& all_ok) {
    const char* status = !c.ordered() ? "VIOLATED" : (c.clear() ? "clear" : "marginal");
    if (!c.ordered()) all_ok = false;
    out << "\n    level " << c.level << ' ' << c.label << ": " << c.mean_low << " vs "
        << c.mean_high << " [" << status << "]";
}

Outcome criterion_fig2_orderings() {
    protocol::StudyConfig config;
    config.model = models::preset_model("case1");
    config.samples = Eigen::Index{1} << 15;
    // The reference protocol takes every admissible level; the orderings at
    // the coarsest scales only hold once those scales are included.
    config.levels = max_decomposition_level(config.samples);   // 15
    config.fit_arrays = 10;
    config.eval_arrays = 3;
    config.with_gmwm = false;
    config.seed = 606;
    config.threads = g_threads;
    const protocol::StudyResult study = protocol::run_study(config);
    const int top = study.levels;

    bool ok = true;
    std::ostringstream detail;
    detail << "T = 2^15, J = " << study.levels << ", 10 x 3 arrays";
    for (int level : {1, 2, 3}) describe(detail, compare_level(study, "svo-short", "eq", level), ok);
    for (int level : {top - 2, top - 1, top}) {
        describe(detail, compare_level(study, "svo-long", "eq", level), ok);
        describe(detail, compare_level(study, "rdvg-oracle", "eq", level), ok);
    }
    for (int level : {top - 1, top})
        describe(detail, compare_level(study, "rdvg-oracle", "svo-long", level), ok);
    return {ok, detail.str()};
}

Outcome criterion_case2_misspecification() {
    protocol::StudyConfig config;
    config.model = models::preset_model("case2");
    config.samples = Eigen::Index{1} << 15;
    config.levels = max_decomposition_level(config.samples);
    config.fit_arrays = 10;
    config.eval_arrays = 3;
    config.with_gmwm = false;
    config.seed = 707;
    config.threads = g_threads;
    const protocol::StudyResult study = protocol::run_study(config);
    const int top = study.levels;

    bool ok = true;
    std::ostringstream detail;
    detail << "T = 2^15, J = " << study.levels << ", 10 x 3 arrays";
    // the estimated-covariance baseline must NOT beat the long-scale fit at
    // the coarse scales (the misspecification penalty)
    for (int level : {top - 2, top - 1, top})
        describe(detail, compare_level(study, "svo-long", "rdvg-est", level), ok);
    int rdvg_above_eq = 0;
    for (int level = 1; level <= top; ++level) {
        const Comparison c = compare_level(study, "eq", "rdvg-est", level);
        if (c.paired_mean_diff <= 0.0) ++rdvg_above_eq;
    }
    detail << "\n    rdvg-est above eq at " << rdvg_above_eq << "/" << top << " levels";
    if (rdvg_above_eq * 2 <= top) ok = false;
    return {ok, detail.str()};
}

// --------------------------------------------------------------------------
// 8. parameter-fit orderings on fused signals (case 1)
// --------------------------------------------------------------------------

Outcome criterion_fig3_orderings() {
    protocol::StudyConfig config;
    config.model = models::preset_model("case1");
    // Longer records than the WV study so the coarse-scale random-walk
    // parameter is identifiable; 10 x 3 = 30 fused signals per method.
    config.samples = Eigen::Index{1} << 17;
    config.levels = default_decomposition_level(config.samples);   // 16
    config.fit_arrays = 10;
    config.eval_arrays = 3;
    config.with_gmwm = true;
    config.gmwm_levels = 14;
    config.seed = 808;
    config.threads = g_threads;
    const protocol::StudyResult study = protocol::run_study(config);

    const double rw_rdvg = protocol::median(study.method("rdvg-oracle").gmwm_rw);
    const double rw_eq = protocol::median(study.method("eq").gmwm_rw);
    const double rw_short = protocol::median(study.method("svo-short").gmwm_rw);
    const double wn_short = protocol::median(study.method("svo-short").gmwm_wn);
    const double wn_long = protocol::median(study.method("svo-long").gmwm_wn);
    const double wn_rdvg = protocol::median(study.method("rdvg-oracle").gmwm_wn);

    const bool ok =
        rw_rdvg < rw_eq && rw_rdvg < rw_short && wn_short < wn_long && wn_short < wn_rdvg;
    std::ostringstream detail;
    detail << "median rw variance: rdvg " << rw_rdvg << " vs eq " << rw_eq << ", svo-short "
           << rw_short << "; median wn variance: svo-short " << wn_short << " vs svo-long "
           << wn_long << ", rdvg " << wn_rdvg;
    return {ok, detail.str()};
}

// --------------------------------------------------------------------------
// 9. invariant suite
// --------------------------------------------------------------------------

Outcome criterion_invariants() {
    std::ostringstream detail;
    bool ok = true;
    auto check = [&](bool cond, const std::string& what) {
        detail << "\n    " << (cond ? "ok  " : "FAIL") << ' ' << what;
        if (!cond) ok = false;
    };

    // Euler identity on random symmetric WCCV vectors.
    {
        const Eigen::Index p = 4;
        const int levels = 3;
        const WeightVector w = preset_weights_for("short-scale", levels);
        double worst = 0.0;
        for (unsigned seed = 1; seed <= 10; ++seed) {
            auto rng = rng::substream(909, {seed});
            std::normal_distribution<double> gauss;
            Eigen::VectorXd gamma(levels * p * p);
            for (int j = 1; j <= levels; ++j)
                for (Eigen::Index i = 0; i < p; ++i)
                    for (Eigen::Index k = i; k < p; ++k) {
                        const double v =
                            (i == k) ? 2.0 + std::abs(gauss(rng)) : 0.3 * gauss(rng);
                        gamma[wccv_flat_index(j, i, k, p)] = v;
                        gamma[wccv_flat_index(j, k, i, p)] = v;
                    }
            const Eigen::MatrixXd jac = inference::coefficient_jacobian(gamma, w, p);
            worst = std::max(worst, (jac * gamma).cwiseAbs().maxCoeff());
        }
        check(worst < 1e-10, "Euler identity |J gamma| = " + std::to_string(worst));
    }

    // Scale invariance and permutation equivariance of the optimizer.
    {
        std::mt19937_64 rng(910);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd b(6, 6);
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = gauss(rng);
        const Eigen::MatrixXd a = b * b.transpose() + Eigen::MatrixXd::Identity(6, 6);
        const Eigen::VectorXd c = optimal_coefficients(a).c;
        check((optimal_coefficients(17.25 * a).c - c).cwiseAbs().maxCoeff() < 1e-12,
              "argmin scale invariance");
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
        perm.setIdentity();
        std::shuffle(perm.indices().data(), perm.indices().data() + 6, rng);
        const Eigen::VectorXd cp =
            optimal_coefficients(Eigen::MatrixXd(perm.transpose() * a * perm)).c;
        check((cp - Eigen::VectorXd(perm.transpose() * c)).cwiseAbs().maxCoeff() < 1e-12,
              "permutation equivariance");
    }

    // Quadratic-form / fused-signal wavelet variance identity.
    {
        auto rng = rng::substream(911);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd data(3, 500);
        for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = gauss(rng);
        const SignalArray arr = make_signal_array(data);
        const int levels = 5;
        const WaveletPyramid pyr = modwt(arr, levels);
        const ScaleCovariances cov = wccv_matrices(pyr, make_weights("equal", levels));
        Eigen::VectorXd raw(3);
        raw << 0.4, 0.35, 0.25;
        const CoefficientVector c{raw};
        const Eigen::VectorXd via_form = virtual_wv(cov, c);
        Eigen::MatrixXd fused_row(1, arr.length());
        fused_row.row(0) = fuse(arr, c).samples.transpose();
        const WaveletPyramid direct = modwt(make_signal_array(fused_row), levels);
        double worst = 0.0;
        for (int j = 1; j <= levels; ++j)
            worst = std::max(worst,
                             std::abs(via_form[j - 1] - wccv_hat(direct, 0, 0, j)) /
                                 std::max(1.0, std::abs(via_form[j - 1])));
        check(worst < 1e-12, "quadratic-form identity, rel dev " + std::to_string(worst));
    }

    // Bootstrap determinism across thread counts and PSD-ness.
    {
        auto rng = rng::substream(912);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd data(2, 2048);
        for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = gauss(rng);
        const WaveletPyramid pyr = modwt(make_signal_array(data), 5);
        inference::BootstrapConfig config;
        config.replicates = 100;
        config.rng_seed = 99;
        const Eigen::MatrixXd v1 = inference::bootstrap_wccv_covariance(pyr, config, 1);
        const Eigen::MatrixXd v2 = inference::bootstrap_wccv_covariance(pyr, config, 2);
        const Eigen::MatrixXd v3 = inference::bootstrap_wccv_covariance(pyr, config, 3);
        check((v1 - v2).cwiseAbs().maxCoeff() == 0.0 &&
                  (v1 - v3).cwiseAbs().maxCoeff() == 0.0,
              "bootstrap bit-identical across 1/2/3 threads");
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v1);
        check(eig.eigenvalues().minCoeff() > -1e-10 * std::max(1.0, v1.trace()),
              "bootstrap covariance PSD");
        check((v1 - v1.transpose()).cwiseAbs().maxCoeff() == 0.0,
              "bootstrap covariance symmetric");
    }
    return {ok, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const std::vector<Criterion> criteria = {
        {1, "closed-form optimizer matches the KKT oracle", criterion_optimizer_oracle},
        {2, "transform and covariance match brute force", criterion_transform_oracle},
        {3, "estimated scale covariances match the closed form", criterion_closed_form_wccv},
        {4, "bootstrap interval coverage", criterion_coverage},
        {5, "coefficient estimator consistency", criterion_consistency},
        {6, "out-of-sample wavelet variance orderings (case 1)", criterion_fig2_orderings},
        {7, "misspecified baseline penalty (case 2)", criterion_case2_misspecification},
        {8, "fused-signal parameter-fit orderings (case 1)", criterion_fig3_orderings},
        {9, "invariant suite", criterion_invariants},
    };

    std::set<int> selected;
    if (argc > 1) {
        std::stringstream ss(argv[1]);
        std::string tok;
        while (std::getline(ss, tok, ',')) selected.insert(std::stoi(tok));
    }
    g_threads = svo::detail::resolve_threads(0);

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (!selected.empty() && !selected.count(criterion.id)) continue;
        const auto start = Clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = seconds_since(start);
        std::printf("[%s] criterion %d: %s (%.1f s)\n  %s\n",
                    outcome.passed ? "PASS" : "FAIL", criterion.id, criterion.name, elapsed,
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.passed) ++failures;
    }
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "SUCCESS" : "FAILURE",
                failures);
    return failures;
}
