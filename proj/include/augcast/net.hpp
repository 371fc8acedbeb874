#pragma once

#include "augcast/pipeline.hpp"
#include "augcast/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace augcast {

/// Model and training settings; every field has a closed admissible range.
struct Hyperparameters {
    int cell_dim = 20;
    int minibatch = 10;    ///< series per optimizer step
    int epoch_size = 2;    ///< dataset passes per validation checkpoint
    int max_epochs = 10;
    int layers = 2;
    double noise_std = 1e-4;
    double init_std = 1e-4;
    double l2_weight = 1e-4;

    struct IntRange {
        int lo, hi;
    };
    struct RealRange {
        double lo, hi;
    };
    static constexpr IntRange kCellDim{20, 50};
    static constexpr IntRange kMinibatch{1, 100};
    static constexpr IntRange kEpochSize{2, 5};
    static constexpr IntRange kMaxEpochs{2, 50};
    static constexpr IntRange kLayers{1, 5};
    static constexpr RealRange kNoiseStd{1e-4, 8e-4};
    static constexpr RealRange kInitStd{1e-4, 8e-4};
    static constexpr RealRange kL2Weight{1e-4, 8e-4};

    /// Throws std::invalid_argument naming the first out-of-range field.
    void validate() const;
    bool operator==(const Hyperparameters&) const = default;
};

/**
 * LSTM layer. Gate rows are stacked as [input, forget, cell, output], each
 * `hidden` rows tall. A residual layer emits h_t + x_t, which requires
 * input width == hidden.
 */
struct LstmLayer {
    Eigen::MatrixXd W;  ///< 4H x input
    Eigen::MatrixXd U;  ///< 4H x H
    Eigen::VectorXd b;  ///< 4H
    bool residual = false;
    bool frozen = false;

    int input_width() const { return static_cast<int>(W.cols()); }
    int hidden() const { return static_cast<int>(U.cols()); }
};

/// Bias-free linear map.
struct DenseLayer {
    Eigen::MatrixXd D;  ///< out x in
    bool frozen = false;
};

/**
 * Residual stack of LSTM layers followed by a chain of bias-free dense layers.
 * The first dense layer consumes the top LSTM output; the last emits the horizon.
 */
struct Network {
    std::vector<LstmLayer> lstm;
    std::vector<DenseLayer> head;
    Hyperparameters hp;

    int input_width() const;
    int output_width() const;
    std::size_t parameter_count() const;
    /// Same shapes and flags, all parameters zero.
    Network zeros_like() const;
    void set_frozen(bool frozen);
};

/// Mutable view over one parameter block, in a fixed order shared by all views of equally shaped networks.
struct ParamBlock {
    std::string name;
    std::span<double> values;
    bool frozen;
    bool weight;  ///< subject to L2 (false for biases)
};

struct ConstParamBlock {
    std::string name;
    std::span<const double> values;
    bool frozen;
    bool weight;
};

std::vector<ParamBlock> parameter_blocks(Network& net);
std::vector<ConstParamBlock> parameter_blocks(const Network& net);

LstmLayer make_lstm_layer(int input_width, int hidden, bool residual, double init_std, Rng& rng);
DenseLayer make_dense_layer(int input_width, int output_width, double init_std, Rng& rng);

/// hp.layers LSTM layers (all but the first residual) and one projection to `output_width`.
Network make_network(int input_width, int output_width, const Hyperparameters& hp, Rng& rng);

/// One series as matrices: column t is window t.
struct SeriesData {
    Eigen::MatrixXd inputs;   ///< input_width x T
    Eigen::MatrixXd targets;  ///< m x T (may have zero columns for inference-only data)
};

/// Windows [0, count) of a window set; count defaults to all windows.
SeriesData series_data(const WindowSet& ws, std::size_t count);
SeriesData training_data(const WindowSet& ws);

/// Runs the network over one series from a zero state; returns m x T predictions.
Eigen::MatrixXd predict_sequence(const Network& net, const Eigen::MatrixXd& inputs);

/**
 * @brief Mean absolute error over every window and horizon step of the batch plus
 * l2_weight * sum of squared unfrozen weights.
 *
 * With `grad` non-null, writes the exact gradient (frozen blocks get zero).
 * With `rng` non-null, Gaussian noise of hp.noise_std is added to every input.
 */
double loss_and_gradient(const Network& net, std::span<const SeriesData> batch, Rng* rng, Network* grad);

/// L2 term alone.
double l2_penalty(const Network& net);

// Window-level entry points.

/// Predictions for every window of `ws`, in order.
std::vector<std::vector<double>> forward(const Network& net, const WindowSet& ws, bool inject_noise, Rng& rng);

/// Mean |pred - target| over all entries plus the L2 term of `net`.
double loss(std::span<const std::vector<double>> preds, std::span<const std::vector<double>> targets,
            const Network& net);

/// Gradient of the training loss of the given series (training windows only).
Network backward(const Network& net, std::span<const WindowSet> series);

/// Normalised-space forecast: runs all windows, then the forecast window.
std::vector<double> forecast(const Network& net, const WindowSet& ws);

}  // namespace augcast
