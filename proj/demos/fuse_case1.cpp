// Simulate a six-gyroscope array, fuse it with short-scale weights and print
// the resulting wavelet-variance table.
#include <cstdio>

#include "svo/svo.hpp"

int main() {
    const auto preset = svo::models::preset_model("case1");
    auto rng = svo::rng::substream(42);
    const svo::SignalArray array = svo::models::simulate(preset, 1 << 14, rng);

    const svo::WaveletPyramid pyramid = svo::modwt(array);
    const int levels = pyramid.max_level();
    const svo::WeightVector omega = svo::preset_weights_for("short-scale", levels);
    const svo::ScaleCovariances cov = svo::wccv_matrices(pyramid, omega);
    const svo::CoefficientVector c = svo::optimal_coefficients(cov.weighted);
    const svo::CoefficientVector eq = svo::baselines::equal_weights(array.sensors());

    std::printf("fusion coefficients (short-scale weights):\n");
    for (Eigen::Index i = 0; i < c.c.size(); ++i)
        std::printf("  %-8s %+.5f\n", array.sensor_labels[(std::size_t)i].c_str(), c.c[i]);

    const Eigen::VectorXd wv_svo = svo::virtual_wv(cov, c);
    const Eigen::VectorXd wv_eq = svo::virtual_wv(cov, eq);
    std::printf("\n%6s %10s %14s %14s %8s\n", "level", "tau [s]", "fused WV", "equal WV",
                "ratio");
    for (int j = 1; j <= levels; ++j)
        std::printf("%6d %10.1f %14.5e %14.5e %8.3f\n", j,
                    svo::haar_scale(j) / array.sample_rate_hz, wv_svo[j - 1], wv_eq[j - 1],
                    wv_svo[j - 1] / wv_eq[j - 1]);
    return 0;
}
