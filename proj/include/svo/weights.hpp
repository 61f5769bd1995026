// Scale weight vectors for the variance objective.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace svo {

/**
 * @brief Nonnegative weights over decomposition levels, normalized to sum 1.
 *
 * The weights select which time-scales the fused signal's variance is
 * minimized over: concentrating mass on low levels targets short-scale
 * (white-noise-like) variance, mass on high levels targets long-scale
 * (random-walk-like) variance.
 */
struct WeightVector {
    Eigen::VectorXd omega;

    int levels() const { return static_cast<int>(omega.size()); }
};

namespace weight_presets {

// Reference weight profiles for 19- and 21-level decompositions. The
// long-scale profile ramps up to the largest scales; the short-scale profile
// concentrates on the smallest. Values are kept as published (they sum to 1
// only up to rounding; make_weights renormalizes).
inline constexpr std::array<double, 19> kLongScale19 = {
    0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.001, 0.003, 0.007,
    0.018, 0.041, 0.077, 0.112, 0.135, 0.147, 0.151, 0.153, 0.153};

inline constexpr std::array<double, 19> kShortScale19 = {
    0.118, 0.118, 0.117, 0.117, 0.116, 0.112, 0.104, 0.086, 0.059, 0.032,
    0.014, 0.006, 0.002, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000};

inline constexpr std::array<double, 21> kLongScale21 = {
    0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.001,
    0.003, 0.007, 0.018, 0.041, 0.077, 0.112, 0.135, 0.147, 0.151, 0.153,
    0.153};

inline constexpr std::array<double, 21> kShortScale21 = {
    0.105, 0.105, 0.105, 0.105, 0.105, 0.103, 0.100, 0.093, 0.077, 0.053,
    0.028, 0.013, 0.005, 0.002, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000,
    0.000};

}  // namespace weight_presets

namespace detail {

inline WeightVector normalize_weights(Eigen::VectorXd omega) {
    for (Eigen::Index j = 0; j < omega.size(); ++j) {
        if (!(omega[j] >= 0.0))
            throw std::invalid_argument("weights: entry " + std::to_string(j + 1) +
                                        " is negative or not finite");
    }
    const double total = omega.sum();
    if (!(total > 0.0)) throw std::invalid_argument("weights: entries sum to zero");
    omega /= total;
    return WeightVector{std::move(omega)};
}

template <std::size_t N>
Eigen::VectorXd to_vector(const std::array<double, N>& a) {
    return Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(N));
}

}  // namespace detail

/**
 * @brief Build a weight vector from an explicit nonnegative profile.
 *
 * The profile is normalized to sum 1. Throws if any entry is negative or the
 * length does not match the requested number of levels.
 */
inline WeightVector make_weights(const Eigen::VectorXd& omega, int levels) {
    if (omega.size() != levels)
        throw std::invalid_argument("weights: explicit vector has " +
                                    std::to_string(omega.size()) + " entries but J = " +
                                    std::to_string(levels));
    return detail::normalize_weights(omega);
}

/**
 * @brief Build a named preset weight vector.
 *
 * Presets: "equal" (any J), "long-scale" and "short-scale" (shipped for
 * J = 19 and J = 21 only; other lengths throw, see preset_weights_for for a
 * preset adapted to arbitrary J).
 */
inline WeightVector make_weights(std::string_view preset, int levels) {
    if (levels < 1) throw std::invalid_argument("weights: J must be >= 1");
    using namespace weight_presets;
    if (preset == "equal")
        return WeightVector{Eigen::VectorXd::Constant(levels, 1.0 / levels)};
    if (preset == "long-scale" || preset == "short-scale") {
        const bool long_scale = (preset == "long-scale");
        if (levels == 19)
            return detail::normalize_weights(
                detail::to_vector(long_scale ? kLongScale19 : kShortScale19));
        if (levels == 21)
            return detail::normalize_weights(
                detail::to_vector(long_scale ? kLongScale21 : kShortScale21));
        throw std::invalid_argument("weights: preset '" + std::string(preset) +
                                    "' is shipped with 19 or 21 entries but J = " +
                                    std::to_string(levels));
    }
    throw std::invalid_argument("weights: unknown preset '" + std::string(preset) + "'");
}

/**
 * @brief Preset weights adapted to an arbitrary number of levels.
 *
 * For J in {19, 21} this returns the shipped profile unchanged. Otherwise the
 * 19-entry profile is cropped keeping its characteristic end: the short-scale
 * profile keeps its first min(J,19) entries, the long-scale profile keeps its
 * last min(J,19) entries (zero-padded on the matching side when J > 19), and
 * the result is renormalized. This preserves each profile's scale emphasis on
 * the levels that exist at reduced record lengths.
 */
inline WeightVector preset_weights_for(std::string_view preset, int levels) {
    if (preset == "equal" || levels == 19 || levels == 21)
        return make_weights(preset, levels);
    if (preset != "long-scale" && preset != "short-scale")
        throw std::invalid_argument("weights: unknown preset '" + std::string(preset) + "'");
    const bool long_scale = (preset == "long-scale");
    const Eigen::VectorXd base =
        detail::to_vector(long_scale ? weight_presets::kLongScale19
                                     : weight_presets::kShortScale19);
    Eigen::VectorXd omega = Eigen::VectorXd::Zero(levels);
    const int keep = std::min(levels, 19);
    if (long_scale)
        omega.tail(keep) = base.tail(keep);
    else
        omega.head(keep) = base.head(keep);
    return detail::normalize_weights(std::move(omega));
}

}  // namespace svo
