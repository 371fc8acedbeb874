#pragma once

#include "augcast/data.hpp"
#include "augcast/decompose.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace augcast {

/// Everything needed to map network outputs of one series back to original units.
struct PreprocessState {
    std::string series_id;
    double scale = 1.0;       ///< training-portion mean
    bool log_offset = false;  ///< log(x + 1) instead of log(x); dataset-global
    Decomposition decomposition;
    Paradigm paradigm = Paradigm::DS;
    /// Period actually used for decomposition (1 when the series is shorter than two cycles).
    int seasonality = 1;
};

/**
 * One moving-window sample. `input` and `target` are locally normalised
 * (norm_factor already subtracted). `position` is the index of the last input
 * point in the modelled sequence; targets cover position+1 .. position+m.
 */
struct Window {
    std::vector<double> input;
    std::vector<double> target;
    std::vector<double> seasonal_exo;  ///< SE only: seasonal values at the target positions
    double norm_factor = 0.0;
    std::size_t position = 0;

    /// Network input: input followed by seasonal_exo.
    std::vector<double> features() const;
};

struct WindowSet {
    std::string series_id;
    /// Stride-1, chronological. The last window is held out for validation.
    std::vector<Window> windows;
    /// Input ending at the last observation; target is empty.
    Window forecast_window;

    const Window& validation_window() const { return windows.back(); }
    std::span<const Window> training_windows() const {
        return std::span<const Window>(windows).first(windows.size() - 1);
    }
};

struct Preprocessed {
    std::map<std::string, PreprocessState> states;
    std::map<std::string, WindowSet> windowsets;
    bool log_offset = false;
    int input_width = 0;   ///< n (+ m for SE)
    int output_width = 0;  ///< m
};

/**
 * @brief Mean-scale, log-transform, decompose and window every series of `d`.
 *
 * Series must hold at least n + m observations and may not be identically zero.
 */
Preprocessed preprocess(const Dataset& d);

/// Inverse of the preprocessing chain for one window's prediction.
std::vector<double> postprocess(std::span<const double> pred, const Window& w, const PreprocessState& st);

/// Number of windows a modelled sequence of length p yields.
std::size_t window_count(std::size_t p, int n, int m);

}  // namespace augcast
