#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace augcast {

/// Monotone alignment from (0, 0) to (len_a - 1, len_b - 1) using unit steps.
struct WarpPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct DtwResult {
    double cost = 0.0;  ///< sum of squared differences along the optimal path
    WarpPath path;
};

/// Full DTW with traceback. Ties prefer the diagonal step, then (1, 0).
DtwResult dtw(std::span<const double> a, std::span<const double> b);

/// DTW cost only, in O(len_b) memory.
double dtw_cost(std::span<const double> a, std::span<const double> b);

struct DbaResult {
    std::vector<double> barycenter;
    /// Weighted DTW cost of the inputs to the barycenter: entry 0 is the initial
    /// barycenter, entry k the barycenter after k updates.
    std::vector<double> cost_history;
};

/**
 * @brief Weighted DTW barycentre averaging.
 *
 * Every iteration aligns each series to the current barycentre and replaces each
 * barycentre coordinate by the weighted mean of the points aligned to it. Stops
 * after `iterations` updates or when the cost improves by less than `tolerance`.
 */
DbaResult dba_average(std::span<const std::vector<double>> series, std::span<const double> weights,
                      std::span<const double> init, int iterations, double tolerance = 1e-10);

}  // namespace augcast
