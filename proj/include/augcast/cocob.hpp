#pragma once

#include "augcast/net.hpp"

#include <span>
#include <vector>

namespace augcast {

/**
 * @brief Coin-betting optimizer (COCOB-Backprop) over a flat parameter vector.
 *
 * Per coordinate with gradient g:
 *   L <- max(L, |g|);  G <- G + |g|;  reward <- max(reward - (w - w1) g, 0);
 *   theta <- theta - g;  w <- w1 + theta / (L max(G + L, alpha L)) * (L + reward)
 * Coordinates that have only seen zero gradients keep their initial value.
 */
class Cocob {
public:
    explicit Cocob(std::span<const double> initial, double alpha = 100.0);

    void step(std::span<double> params, std::span<const double> grads);

    std::span<const double> max_grad() const { return l_; }
    std::span<const double> grad_norm_sum() const { return g_; }
    std::span<const double> reward() const { return reward_; }

private:
    double alpha_;
    std::vector<double> w1_;
    std::vector<double> l_;
    std::vector<double> g_;
    std::vector<double> reward_;
    std::vector<double> theta_;
};

/// One Cocob per parameter block; frozen blocks are never touched.
class NetworkOptimizer {
public:
    explicit NetworkOptimizer(const Network& net, double alpha = 100.0);

    void step(Network& net, const Network& grad);

private:
    std::vector<Cocob> blocks_;
};

}  // namespace augcast
