#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace augcast {

/// Additive split x = seasonal + trend + remainder.
struct Decomposition {
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> remainder;

    std::size_t size() const noexcept { return trend.size(); }
};

struct DecomposeConfig {
    int inner_iterations = 2;
    /// Overrides the automatic trend span (must be odd and >= 3).
    std::optional<int> trend_span;
};

/**
 * @brief Periodic-seasonal STL without robustness weights.
 *
 * Each inner pass detrends, averages every cycle sub-series (periodic mode),
 * removes the cycle mean (the low-pass component of a periodic series is constant),
 * and smooths the deseasonalised series with a local-linear tricube loess.
 * The remainder is defined last as x - seasonal - trend, so reconstruction holds
 * up to a single rounding per element.
 *
 * Requires x.size() >= 2 * period when period > 1.
 */
Decomposition stl_decompose(std::span<const double> x, int period, const DecomposeConfig& cfg = {});

/// Trend span used by stl_decompose for a series of `length` with the given period.
int default_trend_span(int period, std::size_t length);

/// Local-linear loess with tricube weights over the `span` nearest neighbours of every point.
std::vector<double> loess_smooth(std::span<const double> x, int span);

/// Seasonal value at position t; positions past the end continue the last cycle.
double seasonal_at(const Decomposition& d, int period, std::size_t t);

}  // namespace augcast
