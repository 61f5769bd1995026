// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace svo {

/// Thrown when a scale-covariance (or innovation-covariance) matrix is too
/// ill-conditioned or indefinite for the closed-form coefficient solution.
class DegenerateCovariance : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace svo
