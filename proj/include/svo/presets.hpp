// Built-in six-gyroscope benchmark array models.
#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svo/models.hpp"

namespace svo::models {

/// Either supported array model.
using ArrayModel = std::variant<WnRwModel, WnAr1Model>;

/// A registry entry: the model plus the acquisition metadata it was
/// calibrated at.
struct PresetArrayModel {
    std::string name;
    ArrayModel model;
    double sample_rate_hz = 10.0;
    std::vector<std::string> labels;

    Eigen::Index sensors() const {
        return std::visit([](const auto& m) { return m.sensors(); }, model);
    }
};

namespace preset_detail {

// All matrices are stored in base deg^2/s^2; the listed figures carry the
// display scale that is applied here at load.

inline Eigen::VectorXd case_wn_variances() {
    Eigen::VectorXd r(6);
    r << 2.805556, 1.977778, 1.361111, 1.063889, 1.069444, 2.538889;
    return r * 1e-7;
}

inline Eigen::MatrixXd case1_rw_innovation_cov() {
    Eigen::MatrixXd q(6, 6);
    q <<  0.255058, -0.008573,  0.102881, -0.162894, -0.240055, -0.055727,
         -0.008573,  0.471536,  0.199331,  0.010717,  0.032150,  0.207905,
          0.102881,  0.199331,  3.489369, -1.281722,  0.055727, -0.302212,
         -0.162894,  0.010717, -1.281722,  2.091907,  0.409379,  0.544410,
         -0.240055,  0.032150,  0.055727,  0.409379,  0.555127,  0.244342,
         -0.055727,  0.207905, -0.302212,  0.544410,  0.244342,  2.501286;
    return q * 1e-13;
}

inline Eigen::MatrixXd case2_ar1_cov_1() {
    Eigen::MatrixXd p(6, 6);
    p <<  0.400813, -0.018061, -0.044770, -0.104857,  0.254671, -0.234950,
         -0.018061,  1.177847, -0.012905, -0.374198, -0.051101,  0.284942,
         -0.044770, -0.012905,  1.965775,  0.202629, -0.175089,  0.144629,
         -0.104857, -0.374198,  0.202629,  1.309887,  0.023176,  0.412761,
          0.254671, -0.051101, -0.175089,  0.023176,  1.928375,  0.571453,
         -0.234950,  0.284942,  0.144629,  0.412761,  0.571453,  1.434466;
    return p * 1e-11;
}

inline Eigen::MatrixXd case2_ar1_cov_2() {
    Eigen::MatrixXd p(6, 6);
    p <<  6.713833,  1.515552,  1.245013, -0.071179,  0.428489,  0.957757,
          1.515552,  5.607230,  2.264650, -0.773724,  0.281054,  1.440987,
          1.245013,  2.264650,  7.499051, -0.162687, -0.529317, -0.999575,
         -0.071179, -0.773724, -0.162687,  1.207920, -0.187305,  0.681702,
          0.428489,  0.281054, -0.529317, -0.187305,  7.499327,  2.414762,
          0.957757,  1.440987, -0.999575,  0.681702,  2.414762,  6.461646;
    return p * 1e-13;
}

inline Eigen::MatrixXd case2_ar1_cov_3() {
    Eigen::MatrixXd p(6, 6);
    p <<  5.062006, -0.643280,  0.326013,  0.697800,  1.727949,  0.738584,
         -0.643280,  1.612038, -0.318449, -0.383634, -0.768214, -0.100044,
          0.326013, -0.318449,  2.102923,  0.091458,  0.398505, -0.137760,
          0.697800, -0.383634,  0.091458,  0.788177, -0.129179,  0.519119,
          1.727949, -0.768214,  0.398505, -0.129179,  5.442670,  0.378632,
          0.738584, -0.100044, -0.137760,  0.519119,  0.378632,  4.990004;
    return p * 1e-14;
}

inline std::vector<std::string> gyro_labels(int count) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(count));
    for (int i = 1; i <= count; ++i) labels.push_back("gyro" + std::to_string(i));
    return labels;
}

}  // namespace preset_detail

/// Six navigation-grade gyroscopes with correlated rate-random-walk
/// innovations ("case1": white noise + random walk).
inline PresetArrayModel case1_preset() {
    WnRwModel model;
    model.wn_variances = preset_detail::case_wn_variances();
    model.rw_innovation_cov = preset_detail::case1_rw_innovation_cov();
    model.constant_rate = 0.0;
    return PresetArrayModel{"case1", std::move(model), 10.0, preset_detail::gyro_labels(6)};
}

/// Six low-cost MEMS gyroscopes ("case2": white noise + three AR(1)
/// components with near-unit autoregression).
inline PresetArrayModel case2_preset() {
    WnAr1Model model;
    model.wn_variances = preset_detail::case_wn_variances();
    model.components = {
        Ar1Component{0.9975214, preset_detail::case2_ar1_cov_1()},
        Ar1Component{0.9998705, preset_detail::case2_ar1_cov_2()},
        Ar1Component{0.9999933, preset_detail::case2_ar1_cov_3()},
    };
    return PresetArrayModel{"case2", std::move(model), 10.0, preset_detail::gyro_labels(6)};
}

/// Registry lookup by name ("case1" or "case2").
inline PresetArrayModel preset_model(std::string_view name) {
    if (name == "case1") return case1_preset();
    if (name == "case2") return case2_preset();
    throw std::invalid_argument("unknown model preset '" + std::string(name) +
                                "' (available: case1, case2)");
}

/// Simulate whichever model the variant holds.
inline SignalArray simulate(const ArrayModel& model, Eigen::Index samples,
                            std::mt19937_64& rng, double sample_rate_hz = 1.0,
                            std::vector<std::string> labels = {}) {
    if (const auto* wn_rw = std::get_if<WnRwModel>(&model))
        return simulate_wn_rw(*wn_rw, samples, rng, sample_rate_hz, std::move(labels));
    return simulate_wn_ar1(std::get<WnAr1Model>(model), samples, rng, sample_rate_hz,
                           std::move(labels));
}

inline SignalArray simulate(const PresetArrayModel& preset, Eigen::Index samples,
                            std::mt19937_64& rng) {
    return simulate(preset.model, samples, rng, preset.sample_rate_hz, preset.labels);
}

}  // namespace svo::models
