// Multivariate sensor signal containers.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svo {

/**
 * @brief An array of p redundant sensor signals sampled jointly over T epochs.
 *
 * Row i of `data` holds the i-th sensor's samples (units deg/s for gyroscope
 * rate signals). All consumers require p >= 1, T >= 2 and finite entries;
 * call validate() after filling the fields by hand.
 */
struct SignalArray {
    Eigen::MatrixXd data;                     ///< p x T samples
    double sample_rate_hz = 1.0;              ///< sampling frequency
    std::vector<std::string> sensor_labels;   ///< one label per row

    Eigen::Index sensors() const { return data.rows(); }
    Eigen::Index length() const { return data.cols(); }

    void validate() const {
        if (data.rows() < 1) throw std::invalid_argument("SignalArray: need at least one sensor");
        if (data.cols() < 2) throw std::invalid_argument("SignalArray: need at least two samples");
        if (!(sample_rate_hz > 0.0))
            throw std::invalid_argument("SignalArray: sample rate must be positive");
        if (!data.allFinite())
            throw std::invalid_argument("SignalArray: samples must be finite");
        if (!sensor_labels.empty() &&
            sensor_labels.size() != static_cast<std::size_t>(data.rows()))
            throw std::invalid_argument("SignalArray: label count does not match sensor count");
    }
};

inline SignalArray make_signal_array(Eigen::MatrixXd data, double sample_rate_hz = 1.0,
                                     std::vector<std::string> labels = {}) {
    SignalArray s;
    s.data = std::move(data);
    s.sample_rate_hz = sample_rate_hz;
    if (labels.empty()) {
        labels.reserve(static_cast<std::size_t>(s.data.rows()));
        for (Eigen::Index i = 0; i < s.data.rows(); ++i)
            labels.push_back("sensor" + std::to_string(i + 1));
    }
    s.sensor_labels = std::move(labels);
    s.validate();
    return s;
}

/// Remove each sensor's sample mean. Idempotent; row-wise variance unchanged.
inline SignalArray demean(const SignalArray& signals) {
    SignalArray out = signals;
    out.data.colwise() -= signals.data.rowwise().mean();
    return out;
}

/**
 * @brief Fused virtual signal together with the combination that produced it.
 */
struct VirtualSignal {
    Eigen::VectorXd samples;                  ///< length T
    Eigen::VectorXd coefficients;             ///< the c applied to each sensor
    std::vector<std::string> sensor_labels;   ///< provenance
    double sample_rate_hz = 1.0;
};

}  // namespace svo
