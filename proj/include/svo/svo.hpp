// Umbrella header.
#pragma once

#include "svo/baselines.hpp"      // IWYU pragma: export
#include "svo/bootstrap.hpp"      // IWYU pragma: export
#include "svo/errors.hpp"         // IWYU pragma: export
#include "svo/inference.hpp"      // IWYU pragma: export
#include "svo/models.hpp"         // IWYU pragma: export
#include "svo/optimize.hpp"       // IWYU pragma: export
#include "svo/presets.hpp"        // IWYU pragma: export
#include "svo/protocol.hpp"       // IWYU pragma: export
#include "svo/signal.hpp"         // IWYU pragma: export
#include "svo/version.hpp"        // IWYU pragma: export
#include "svo/wavelet.hpp"        // IWYU pragma: export
#include "svo/weights.hpp"        // IWYU pragma: export
