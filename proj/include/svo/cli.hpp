// Command-line front end: simulation, fitting, bootstrap inference, method
// comparison and coverage studies.
#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "svo/baselines.hpp"
#include "svo/bootstrap.hpp"
#include "svo/errors.hpp"
#include "svo/inference.hpp"
#include "svo/io/csv.hpp"
#include "svo/models.hpp"
#include "svo/optimize.hpp"
#include "svo/presets.hpp"
#include "svo/protocol.hpp"
#include "svo/rng.hpp"
#include "svo/version.hpp"
#include "svo/wavelet.hpp"
#include "svo/weights.hpp"

namespace svo::cli {

using nlohmann::json;

// Exit codes: 0 success, 2 input/configuration errors, 3 numeric degeneracy,
// 1 anything else.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDegenerate = 3;

namespace detail {

inline json to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::VectorXd vector_from_json(const json& arr, const std::string& what) {
    if (!arr.is_array() || arr.empty())
        throw std::invalid_argument(what + ": expected a non-empty array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty())
        throw std::invalid_argument(what + ": expected a non-empty array of rows");
    const std::size_t n = rows.size();
    const std::size_t m = rows.front().size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != m) throw std::invalid_argument(what + ": ragged matrix rows");
        for (std::size_t c = 0; c < m; ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return out;
}

inline json model_to_json(const models::ArrayModel& model) {
    json j;
    if (const auto* wn_rw = std::get_if<models::WnRwModel>(&model)) {
        j["type"] = "wn_rw";
        j["wn_variances"] = to_json(wn_rw->wn_variances);
        j["rw_innovation_cov"] = to_json(wn_rw->rw_innovation_cov);
        j["delta"] = wn_rw->constant_rate;
    } else {
        const auto& ar = std::get<models::WnAr1Model>(model);
        j["type"] = "wn_ar1";
        j["wn_variances"] = to_json(ar.wn_variances);
        json comps = json::array();
        for (const auto& c : ar.components)
            comps.push_back({{"phi", c.phi}, {"innovation_cov", to_json(c.innovation_cov)}});
        j["components"] = std::move(comps);
    }
    return j;
}

inline models::PresetArrayModel model_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
    json j;
    in >> j;
    models::PresetArrayModel preset;
    preset.name = "file:" + path;
    preset.sample_rate_hz = j.value("sample_rate_hz", 1.0);
    const std::string type = j.at("type");
    if (type == "wn_rw") {
        models::WnRwModel m;
        m.wn_variances = vector_from_json(j.at("wn_variances"), "wn_variances");
        m.rw_innovation_cov = matrix_from_json(j.at("rw_innovation_cov"), "rw_innovation_cov");
        m.constant_rate = j.value("delta", 0.0);
        m.validate();
        preset.model = std::move(m);
    } else if (type == "wn_ar1") {
        models::WnAr1Model m;
        m.wn_variances = vector_from_json(j.at("wn_variances"), "wn_variances");
        for (const auto& c : j.at("components"))
            m.components.push_back(models::Ar1Component{
                c.at("phi"), matrix_from_json(c.at("innovation_cov"), "innovation_cov")});
        m.validate();
        preset.model = std::move(m);
    } else {
        throw std::invalid_argument("model file '" + path + "': unknown type '" + type + "'");
    }
    if (j.contains("labels"))
        for (const auto& l : j["labels"]) preset.labels.push_back(l.get<std::string>());
    else
        preset.labels = models::preset_detail::gyro_labels(static_cast<int>(preset.sensors()));
    return preset;
}

/// --omega accepts a preset name (adapted to J, see preset_weights_for) or a
/// comma-separated list of nonnegative values of length J.
inline WeightVector parse_omega(const std::string& spec, int levels) {
    if (spec == "equal" || spec == "long-scale" || spec == "short-scale")
        return preset_weights_for(spec, levels);
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t comma = spec.find(',', start);
        const std::string tok =
            spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("--omega: cannot parse '" + tok +
                                        "' (expected a preset name or comma list)");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    Eigen::VectorXd omega(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) omega[static_cast<Eigen::Index>(i)] = values[i];
    return make_weights(omega, levels);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

inline json report_skeleton(const std::string& command, json config) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = command;
    j["config"] = std::move(config);
    j["meta"] = {{"tool", "svo"}, {"version", kVersion}};
    return j;
}

struct FitOptions {
    std::string input;
    double rate = 1.0;
    int levels = 0;
    std::string omega = "equal";
    bool demean_signals = false;
    bool split_halves = false;
    bool with_gmwm = false;
    std::string out_dir = ".";
};

inline SignalArray split_halves(const SignalArray& signals) {
    const Eigen::Index half = signals.length() / 2;
    if (half < 2) throw std::invalid_argument("--split-halves: record too short to split");
    const Eigen::Index p = signals.sensors();
    Eigen::MatrixXd data(2 * p, half);
    data.topRows(p) = signals.data.leftCols(half);
    data.bottomRows(p) = signals.data.middleCols(half, half);
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(2 * p));
    for (const auto& l : signals.sensor_labels) labels.push_back(l + "_a");
    for (const auto& l : signals.sensor_labels) labels.push_back(l + "_b");
    return make_signal_array(std::move(data), signals.sample_rate_hz, std::move(labels));
}

struct FitArtifacts {
    SignalArray signals;
    WaveletPyramid pyramid;
    ScaleCovariances covariances;
    WeightVector omega;
    CoefficientVector coefficients;
    json report;
};

/// Shared pipeline behind `fit` and `ci`.
inline FitArtifacts run_fit_pipeline(const FitOptions& opt) {
    SignalArray signals = io::read_signal_csv(opt.input, opt.rate);
    if (opt.split_halves) signals = split_halves(signals);
    if (opt.demean_signals) signals = demean(signals);
    const int levels =
        opt.levels > 0 ? opt.levels : default_decomposition_level(signals.length());
    const WeightVector omega = parse_omega(opt.omega, levels);

    FitArtifacts art{std::move(signals), {}, {}, omega, {}, {}};
    art.pyramid = modwt(art.signals, levels);
    art.covariances = wccv_matrices(art.pyramid, omega);
    art.coefficients = optimal_coefficients(art.covariances.weighted);

    const Eigen::Index p = art.signals.sensors();
    const CoefficientVector eq = baselines::equal_weights(p);
    const Eigen::VectorXd fused_svo = virtual_wv(art.covariances, art.coefficients);
    const Eigen::VectorXd fused_eq = virtual_wv(art.covariances, eq);

    json config{{"input", opt.input},
                {"sample_rate_hz", opt.rate},
                {"J", levels},
                {"omega", opt.omega},
                {"demean", opt.demean_signals},
                {"split_halves", opt.split_halves}};
    json report = report_skeleton("fit", config);

    json res;
    res["sensors"] = art.signals.sensor_labels;
    res["T"] = art.signals.length();
    res["p"] = p;
    json levels_json = json::array();
    for (int j = 1; j <= levels; ++j) {
        json lv;
        lv["level"] = j;
        lv["tau_samples"] = haar_scale(j);
        lv["tau_seconds"] = haar_scale(j) / art.signals.sample_rate_hz;
        json sensor_wv = json::array();
        for (Eigen::Index i = 0; i < p; ++i)
            sensor_wv.push_back(art.covariances.per_level[static_cast<std::size_t>(j - 1)](i, i));
        lv["sensor_wv"] = std::move(sensor_wv);
        lv["fused_wv_svo"] = fused_svo[j - 1];
        lv["fused_wv_eq"] = fused_eq[j - 1];
        lv["wv_ratio_svo_vs_eq"] = fused_svo[j - 1] / fused_eq[j - 1];
        levels_json.push_back(std::move(lv));
    }
    res["levels"] = std::move(levels_json);
    res["omega"] = to_json(omega.omega);
    res["coefficients_svo"] = to_json(art.coefficients.c);
    res["coefficients_eq"] = to_json(eq.c);

    if (opt.with_gmwm) {
        json fits;
        auto fit_to_json = [](const models::ScalarWnRwFit& f) {
            return json{{"wn_variance", f.wn_variance}, {"rw_variance", f.rw_variance}};
        };
        fits["fused_svo"] = fit_to_json(models::gmwm_fit_wn_rw_from_wv(fused_svo));
        fits["fused_eq"] = fit_to_json(models::gmwm_fit_wn_rw_from_wv(fused_eq));
        json per_sensor = json::array();
        for (Eigen::Index i = 0; i < p; ++i) {
            Eigen::VectorXd wv(levels);
            for (int j = 1; j <= levels; ++j)
                wv[j - 1] = art.covariances.per_level[static_cast<std::size_t>(j - 1)](i, i);
            per_sensor.push_back(fit_to_json(models::gmwm_fit_wn_rw_from_wv(wv)));
        }
        fits["per_sensor"] = std::move(per_sensor);
        res["gmwm"] = std::move(fits);
    }
    report["results"] = std::move(res);
    art.report = std::move(report);
    return art;
}

inline void write_fit_tables(const FitArtifacts& art, const std::filesystem::path& dir,
                             const std::string& prefix) {
    const Eigen::Index p = art.signals.sensors();
    const int levels = art.pyramid.max_level();
    io::Table wv_table;
    wv_table.columns = {"level", "tau_samples", "tau_seconds"};
    for (const auto& label : art.signals.sensor_labels) wv_table.columns.push_back("wv_" + label);
    wv_table.columns.push_back("fused_wv_svo");
    wv_table.columns.push_back("fused_wv_eq");
    wv_table.columns.push_back("wv_ratio_svo_vs_eq");
    const CoefficientVector eq = baselines::equal_weights(p);
    const Eigen::VectorXd fused_svo = virtual_wv(art.covariances, art.coefficients);
    const Eigen::VectorXd fused_eq = virtual_wv(art.covariances, eq);
    for (int j = 1; j <= levels; ++j) {
        std::vector<double> row{static_cast<double>(j), haar_scale(j),
                                haar_scale(j) / art.signals.sample_rate_hz};
        for (Eigen::Index i = 0; i < p; ++i)
            row.push_back(art.covariances.per_level[static_cast<std::size_t>(j - 1)](i, i));
        row.push_back(fused_svo[j - 1]);
        row.push_back(fused_eq[j - 1]);
        row.push_back(fused_svo[j - 1] / fused_eq[j - 1]);
        wv_table.add_row(std::move(row));
    }
    io::write_table_csv((dir / (prefix + "_wv.csv")).string(), wv_table);

    io::Table coef_table;
    coef_table.columns = {"sensor_index", "coefficient_svo", "coefficient_eq"};
    for (Eigen::Index i = 0; i < p; ++i)
        coef_table.add_row({static_cast<double>(i + 1), art.coefficients.c[i], eq.c[i]});
    io::write_table_csv((dir / (prefix + "_coefficients.csv")).string(), coef_table);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int cmd_simulate(const std::string& preset_name, const std::string& model_file,
                        Eigen::Index samples, std::uint64_t seed, double rate_override,
                        bool export_model, const std::string& out_dir) {
    models::PresetArrayModel preset = model_file.empty()
                                          ? models::preset_model(preset_name)
                                          : detail::model_from_file(model_file);
    if (rate_override > 0.0) preset.sample_rate_hz = rate_override;

    auto rng = rng::substream(seed);
    const SignalArray signals = models::simulate(preset, samples, rng);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto csv_path = dir / "signals.csv";
    io::write_signal_csv(csv_path.string(), signals);

    json meta = detail::report_skeleton(
        "simulate", json{{"preset", preset.name},
                         {"T", samples},
                         {"seed", seed},
                         {"sample_rate_hz", preset.sample_rate_hz}});
    meta["model"] = detail::model_to_json(preset.model);
    meta["labels"] = preset.labels;
    detail::write_json(dir / "signals.meta.json", meta);

    if (export_model) {
        if (const auto* wn_rw = std::get_if<models::WnRwModel>(&preset.model)) {
            io::write_matrix_csv((dir / "model_R.csv").string(),
                                 Eigen::MatrixXd(wn_rw->wn_variances.asDiagonal()));
            io::write_matrix_csv((dir / "model_Q.csv").string(), wn_rw->rw_innovation_cov);
        } else {
            const auto& ar = std::get<models::WnAr1Model>(preset.model);
            io::write_matrix_csv((dir / "model_R.csv").string(),
                                 Eigen::MatrixXd(ar.wn_variances.asDiagonal()));
            for (std::size_t c = 0; c < ar.components.size(); ++c)
                io::write_matrix_csv(
                    (dir / ("model_P" + std::to_string(c + 1) + ".csv")).string(),
                    ar.components[c].innovation_cov);
        }
    }
    std::cout << "wrote " << csv_path.string() << " (" << signals.sensors() << " sensors x "
              << signals.length() << " samples)\n";
    return kExitOk;
}

inline int cmd_fit(const detail::FitOptions& opt) {
    const detail::FitArtifacts art = detail::run_fit_pipeline(opt);
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    detail::write_json(dir / "fit_report.json", art.report);
    detail::write_fit_tables(art, dir, "fit");
    std::cout << "coefficients:";
    for (Eigen::Index i = 0; i < art.coefficients.c.size(); ++i)
        std::cout << ' ' << io::format_double(art.coefficients.c[i]);
    std::cout << "\nwrote " << (dir / "fit_report.json").string() << '\n';
    return kExitOk;
}

inline int cmd_ci(const detail::FitOptions& opt, double alpha, Eigen::Index block_size,
                  int replicates, std::uint64_t seed, int threads, bool diagnostics) {
    detail::FitArtifacts art = detail::run_fit_pipeline(opt);
    const Eigen::Index p = art.signals.sensors();

    inference::BootstrapConfig boot;
    boot.block_size = block_size;
    boot.replicates = replicates;
    boot.rng_seed = seed;
    const Eigen::MatrixXd v_star = inference::bootstrap_wccv_covariance(
        art.pyramid, boot, svo::detail::resolve_threads(threads));
    const Eigen::VectorXd gamma_hat = wccv_vector(art.pyramid);
    const Eigen::MatrixXd jac = inference::coefficient_jacobian(gamma_hat, art.omega, p);
    const Eigen::MatrixXd sigma = inference::sandwich_covariance(jac, v_star);
    const auto ci = inference::confidence_intervals(art.coefficients.c, sigma, alpha,
                                                    art.signals.length());

    json& report = art.report;
    report["command"] = "ci";
    report["config"]["alpha"] = alpha;
    report["config"]["block_size"] =
        boot.block_size > 0
            ? boot.block_size
            : inference::default_block_size(
                  art.signals.length(), art.pyramid.coefficient_count(art.pyramid.max_level()));
    report["config"]["replicates"] = replicates;
    report["config"]["seed"] = seed;

    json intervals = json::array();
    for (Eigen::Index i = 0; i < p; ++i)
        intervals.push_back({{"sensor", art.signals.sensor_labels[static_cast<std::size_t>(i)]},
                             {"point", ci.point[i]},
                             {"lower", ci.lower[i]},
                             {"upper", ci.upper[i]}});
    report["results"]["intervals"] = std::move(intervals);
    report["results"]["coefficient_cov"] = detail::to_json(sigma);

    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    detail::write_json(dir / "ci_report.json", report);
    detail::write_fit_tables(art, dir, "ci");

    io::Table ci_table;
    ci_table.columns = {"sensor_index", "point", "lower", "upper"};
    for (Eigen::Index i = 0; i < p; ++i)
        ci_table.add_row({static_cast<double>(i + 1), ci.point[i], ci.lower[i], ci.upper[i]});
    io::write_table_csv((dir / "ci_intervals.csv").string(), ci_table);

    if (diagnostics) io::write_matrix_csv((dir / "ci_vstar.csv").string(), v_star);

    std::cout << "intervals (alpha = " << alpha << "):\n";
    for (Eigen::Index i = 0; i < p; ++i)
        std::cout << "  " << art.signals.sensor_labels[static_cast<std::size_t>(i)] << ": "
                  << ci.point[i] << " [" << ci.lower[i] << ", " << ci.upper[i] << "]\n";
    std::cout << "wrote " << (dir / "ci_report.json").string() << '\n';
    return kExitOk;
}

inline int cmd_compare(const std::string& preset_name, Eigen::Index samples, int levels,
                       int n_fit, int n_eval, int gmwm_levels, std::uint64_t seed, int threads,
                       const std::string& out_dir) {
    protocol::StudyConfig config;
    config.model = models::preset_model(preset_name);
    config.samples = samples;
    config.levels = levels;
    config.fit_arrays = n_fit;
    config.eval_arrays = n_eval;
    config.gmwm_levels = gmwm_levels;
    config.seed = seed;
    config.threads = svo::detail::resolve_threads(threads);
    const protocol::StudyResult study = protocol::run_study(config);

    json report = detail::report_skeleton(
        "compare", json{{"preset", preset_name},
                        {"T", samples},
                        {"J", study.levels},
                        {"n_fit", n_fit},
                        {"n_eval", n_eval},
                        {"gmwm_levels", gmwm_levels > 0 ? gmwm_levels : study.levels},
                        {"seed", seed}});
    json methods = json::array();
    for (const auto& m : study.methods) {
        json jm;
        jm["name"] = m.name;
        jm["mean_wv"] = detail::to_json(m.mean_wv);
        jm["se_wv"] = detail::to_json(m.se_wv);
        json coefs = json::array();
        for (const auto& c : m.coefficients) coefs.push_back(detail::to_json(c));
        jm["coefficients"] = std::move(coefs);
        if (!m.gmwm_wn.empty()) {
            jm["gmwm_median_wn_variance"] = protocol::median(m.gmwm_wn);
            jm["gmwm_median_rw_variance"] = protocol::median(m.gmwm_rw);
        }
        methods.push_back(std::move(jm));
    }
    report["results"]["taus"] = detail::to_json(study.taus);
    report["results"]["methods"] = std::move(methods);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    detail::write_json(dir / "compare_report.json", report);

    io::Table wv_table;
    wv_table.columns = {"level", "tau_samples"};
    for (const auto& m : study.methods) {
        wv_table.columns.push_back("mean_wv_" + m.name);
        wv_table.columns.push_back("se_wv_" + m.name);
    }
    for (int j = 0; j < study.levels; ++j) {
        std::vector<double> row{static_cast<double>(j + 1), study.taus[j]};
        for (const auto& m : study.methods) {
            row.push_back(m.mean_wv[j]);
            row.push_back(m.se_wv[j]);
        }
        wv_table.add_row(std::move(row));
    }
    io::write_table_csv((dir / "compare_wv.csv").string(), wv_table);

    io::Table coef_table;
    coef_table.columns = {"fit_array"};
    const Eigen::Index p = config.model.sensors();
    for (const auto& m : study.methods)
        for (Eigen::Index i = 0; i < p; ++i)
            coef_table.columns.push_back(m.name + "_c" + std::to_string(i + 1));
    for (int r = 0; r < n_fit; ++r) {
        std::vector<double> row{static_cast<double>(r + 1)};
        for (const auto& m : study.methods)
            for (Eigen::Index i = 0; i < p; ++i)
                row.push_back(m.coefficients[static_cast<std::size_t>(r)][i]);
        coef_table.add_row(std::move(row));
    }
    io::write_table_csv((dir / "compare_coefficients.csv").string(), coef_table);

    if (!study.methods.front().gmwm_wn.empty()) {
        io::Table gmwm_table;
        gmwm_table.columns = {"signal_index"};
        for (const auto& m : study.methods) {
            gmwm_table.columns.push_back(m.name + "_wn_variance");
            gmwm_table.columns.push_back(m.name + "_rw_variance");
        }
        const std::size_t cells = study.methods.front().gmwm_wn.size();
        for (std::size_t cell = 0; cell < cells; ++cell) {
            std::vector<double> row{static_cast<double>(cell + 1)};
            for (const auto& m : study.methods) {
                row.push_back(m.gmwm_wn[cell]);
                row.push_back(m.gmwm_rw[cell]);
            }
            gmwm_table.add_row(std::move(row));
        }
        io::write_table_csv((dir / "compare_gmwm.csv").string(), gmwm_table);
    }

    std::cout << "compared " << study.methods.size() << " methods over " << n_fit << " x "
              << n_eval << " arrays (J = " << study.levels << ")\nwrote "
              << (dir / "compare_report.json").string() << '\n';
    return kExitOk;
}

inline int cmd_coverage(const std::string& preset_name, Eigen::Index samples, int levels,
                        const std::string& omega_spec, double alpha, Eigen::Index block_size,
                        int replicates, int mc_replicates, std::uint64_t seed, int threads,
                        const std::string& out_dir) {
    const models::PresetArrayModel preset = models::preset_model(preset_name);
    const auto* wn_rw = std::get_if<models::WnRwModel>(&preset.model);
    if (!wn_rw)
        throw std::invalid_argument(
            "coverage needs a white-noise + random-walk preset (its closed-form scale "
            "covariances define the true coefficients); '" +
            preset_name + "' is not one");

    protocol::CoverageConfig config;
    config.model = *wn_rw;
    config.samples = samples;
    config.levels = levels > 0 ? levels : default_decomposition_level(samples);
    config.omega = detail::parse_omega(omega_spec, config.levels);
    config.alpha = alpha;
    config.block_size = block_size;
    config.bootstrap_replicates = replicates;
    config.mc_replicates = mc_replicates;
    config.seed = seed;
    config.threads = svo::detail::resolve_threads(threads);
    const protocol::CoverageResult cov = protocol::run_coverage(config);

    json report = detail::report_skeleton(
        "coverage", json{{"preset", preset_name},
                         {"T", samples},
                         {"J", config.levels},
                         {"omega", omega_spec},
                         {"alpha", alpha},
                         {"block_size", block_size > 0
                                            ? block_size
                                            : inference::default_block_size(samples)},
                         {"replicates", replicates},
                         {"mc_replicates", mc_replicates},
                         {"seed", seed}});
    report["results"]["true_coefficients"] = detail::to_json(cov.true_coefficients);
    report["results"]["coverage"] = detail::to_json(cov.coverage);
    report["results"]["mean_halfwidth"] = detail::to_json(cov.mean_halfwidth);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    detail::write_json(dir / "coverage_report.json", report);

    io::Table table;
    table.columns = {"sensor_index", "true_coefficient", "coverage", "mean_halfwidth"};
    for (Eigen::Index i = 0; i < cov.true_coefficients.size(); ++i)
        table.add_row({static_cast<double>(i + 1), cov.true_coefficients[i], cov.coverage[i],
                       cov.mean_halfwidth[i]});
    io::write_table_csv((dir / "coverage.csv").string(), table);

    std::cout << "coverage (target " << 1.0 - alpha << "):";
    for (Eigen::Index i = 0; i < cov.coverage.size(); ++i) std::cout << ' ' << cov.coverage[i];
    std::cout << "\nwrote " << (dir / "coverage_report.json").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
    CLI::App app{"Scale-wise variance optimization for redundant sensor arrays"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a sensor-array model to CSV");
    std::string sim_preset = "case1", sim_model_file, sim_out = ".";
    std::int64_t sim_samples = 0;
    std::uint64_t sim_seed = 1;
    double sim_rate = 0.0;
    bool sim_export_model = false;
    sim->add_option("--preset", sim_preset, "Built-in model preset (case1, case2)");
    sim->add_option("--model", sim_model_file, "JSON model file (overrides --preset)")
        ->check(CLI::ExistingFile);
    sim->add_option("--T", sim_samples, "Number of samples per sensor")->required();
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--rate", sim_rate, "Override the sample rate [Hz]");
    sim->add_flag("--export-model", sim_export_model, "Also dump model matrices as CSV");
    sim->add_option("--out-dir", sim_out, "Output directory");

    // shared fit/ci options
    detail::FitOptions fit_opt;
    auto add_fit_options = [&](CLI::App* cmd) {
        cmd->add_option("--input", fit_opt.input, "Input signal CSV")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--rate", fit_opt.rate, "Sample rate of the input [Hz]");
        cmd->add_option("--J", fit_opt.levels,
                        "Decomposition levels (default floor(log2 T) - 1)");
        cmd->add_option("--omega", fit_opt.omega,
                        "Scale weights: equal, long-scale, short-scale, or comma list");
        cmd->add_flag("--demean", fit_opt.demean_signals, "Remove each sensor's mean first");
        cmd->add_flag("--split-halves", fit_opt.split_halves,
                      "Split records in half and treat the halves as extra sensors");
        cmd->add_flag("--gmwm", fit_opt.with_gmwm,
                      "Include white-noise/random-walk parameter fits");
        cmd->add_option("--out-dir", fit_opt.out_dir, "Output directory");
    };

    auto* fit = app.add_subcommand("fit", "Estimate fusion coefficients from a CSV");
    add_fit_options(fit);

    auto* ci = app.add_subcommand("ci", "Fit plus bootstrap confidence intervals");
    add_fit_options(ci);
    double ci_alpha = 0.05;
    std::int64_t ci_block = 0;
    int ci_replicates = 500, ci_threads = 0;
    std::uint64_t ci_seed = 1;
    bool ci_diagnostics = false;
    ci->add_option("--alpha", ci_alpha, "Significance level");
    ci->add_option("--block-size", ci_block, "Bootstrap block size (default ceil(T^(1/3)))");
    ci->add_option("--replicates", ci_replicates, "Bootstrap replicates");
    ci->add_option("--seed", ci_seed, "Bootstrap RNG seed");
    ci->add_option("--threads", ci_threads, "Worker threads (0 = all cores)");
    ci->add_flag("--diagnostics", ci_diagnostics, "Also dump the bootstrap WCCV covariance");

    // compare
    auto* cmp = app.add_subcommand("compare",
                                   "Out-of-sample comparison of fusion methods on a preset");
    std::string cmp_preset = "case1", cmp_out = ".";
    std::int64_t cmp_samples = 1 << 15;
    int cmp_levels = 0, cmp_nfit = 10, cmp_neval = 3, cmp_gmwm_levels = 0, cmp_threads = 0;
    std::uint64_t cmp_seed = 1;
    cmp->add_option("--preset", cmp_preset, "Model preset (case1, case2)");
    cmp->add_option("--T", cmp_samples, "Samples per simulated array");
    cmp->add_option("--J", cmp_levels, "Decomposition levels (default floor(log2 T) - 1)");
    cmp->add_option("--n-fit", cmp_nfit, "Arrays used to estimate coefficients");
    cmp->add_option("--n-eval", cmp_neval, "Fresh arrays per coefficient vector");
    cmp->add_option("--gmwm-levels", cmp_gmwm_levels, "Levels used by the parameter fits");
    cmp->add_option("--seed", cmp_seed, "RNG seed");
    cmp->add_option("--threads", cmp_threads, "Worker threads (0 = all cores)");
    cmp->add_option("--out-dir", cmp_out, "Output directory");

    // coverage
    auto* cvg = app.add_subcommand("coverage",
                                   "Empirical confidence-interval coverage on a preset");
    std::string cvg_preset = "case1", cvg_omega = "short-scale", cvg_out = ".";
    std::int64_t cvg_samples = 1 << 15, cvg_block = 0;
    int cvg_levels = 0, cvg_replicates = 200, cvg_mc = 300, cvg_threads = 0;
    double cvg_alpha = 0.05;
    std::uint64_t cvg_seed = 1;
    cvg->add_option("--preset", cvg_preset, "Model preset (must be white noise + random walk)");
    cvg->add_option("--T", cvg_samples, "Samples per simulated array");
    cvg->add_option("--J", cvg_levels, "Decomposition levels (default floor(log2 T) - 1)");
    cvg->add_option("--omega", cvg_omega, "Scale weights (preset name or comma list)");
    cvg->add_option("--alpha", cvg_alpha, "Significance level");
    cvg->add_option("--block-size", cvg_block, "Bootstrap block size");
    cvg->add_option("--replicates", cvg_replicates, "Bootstrap replicates per MC run");
    cvg->add_option("--mc", cvg_mc, "Monte Carlo replicates");
    cvg->add_option("--seed", cvg_seed, "RNG seed");
    cvg->add_option("--threads", cvg_threads, "Worker threads (0 = all cores)");
    cvg->add_option("--out-dir", cvg_out, "Output directory");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_preset, sim_model_file, sim_samples, sim_seed, sim_rate,
                                sim_export_model, sim_out);
        if (fit->parsed()) return cmd_fit(fit_opt);
        if (ci->parsed())
            return cmd_ci(fit_opt, ci_alpha, ci_block, ci_replicates, ci_seed, ci_threads,
                          ci_diagnostics);
        if (cmp->parsed())
            return cmd_compare(cmp_preset, cmp_samples, cmp_levels, cmp_nfit, cmp_neval,
                               cmp_gmwm_levels, cmp_seed, cmp_threads, cmp_out);
        if (cvg->parsed())
            return cmd_coverage(cvg_preset, cvg_samples, cvg_levels, cvg_omega, cvg_alpha,
                                cvg_block, cvg_replicates, cvg_mc, cvg_seed, cvg_threads,
                                cvg_out);
    } catch (const DegenerateCovariance& e) {
        std::cerr << "error (degenerate): " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error (input): " << e.what() << '\n';
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "error (io): " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitOther;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace svo::cli
