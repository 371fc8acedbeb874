#pragma once

#include "augcast/net.hpp"
#include "augcast/pipeline.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace augcast {

struct TrainResult {
    Network net;                            ///< parameters of the best validation epoch
    std::vector<double> validation_losses;  ///< one entry per epoch
    int best_epoch = 0;                     ///< 0-based
};

/**
 * @brief Trains `net` with COCOB on the training windows of every series.
 *
 * An epoch is net.hp.epoch_size shuffled passes over the series, grouped into
 * minibatches of net.hp.minibatch series; each minibatch is one optimizer step.
 * After each epoch the mean L1 error on the validation windows is recorded.
 * Deterministic in (net, data, seed).
 */
TrainResult train(Network net, std::span<const WindowSet> data, std::uint64_t seed);

/// Mean over series of the L1 error on each series' validation window.
double validation_loss(const Network& net, std::span<const WindowSet> data);

}  // namespace augcast
