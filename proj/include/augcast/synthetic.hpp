#pragma once

#include "augcast/data.hpp"

#include <cstdint>

namespace augcast {

/// Seasonal series with a linear trend and Gaussian noise, for smoke tests and demos.
struct SyntheticSpec {
    int series = 20;
    int length = 120;
    int seasonality = 12;
    int horizon = 12;
    double noise = 0.05;  ///< noise standard deviation relative to the series level
    Paradigm paradigm = Paradigm::DS;
    std::uint64_t seed = 42;
};

/// level * (1 + amp * sin(2 pi (t + phase) / S)) + slope * t + N(0, (noise * level)^2), clamped at 0.
Dataset make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace augcast
