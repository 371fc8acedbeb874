#include "augcast/cocob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace augcast {

Cocob::Cocob(std::span<const double> initial, double alpha)
    : alpha_(alpha),
      w1_(initial.begin(), initial.end()),
      l_(initial.size(), 0.0),
      g_(initial.size(), 0.0),
      reward_(initial.size(), 0.0),
      theta_(initial.size(), 0.0) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("Cocob: alpha must be positive");
    }
}

void Cocob::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != w1_.size() || grads.size() != w1_.size()) {
        throw std::invalid_argument("Cocob::step: size mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        const double a = std::abs(g);
        l_[i] = std::max(l_[i], a);
        g_[i] += a;
        reward_[i] = std::max(reward_[i] - (params[i] - w1_[i]) * g, 0.0);
        theta_[i] -= g;
        if (l_[i] > 0.0) {
            const double denom = l_[i] * std::max(g_[i] + l_[i], alpha_ * l_[i]);
            params[i] = w1_[i] + theta_[i] / denom * (l_[i] + reward_[i]);
        }
    }
}

NetworkOptimizer::NetworkOptimizer(const Network& net, double alpha) {
    for (const auto& b : parameter_blocks(net)) {
        blocks_.emplace_back(b.values, alpha);
    }
}

void NetworkOptimizer::step(Network& net, const Network& grad) {
    auto params = parameter_blocks(net);
    const auto grads = parameter_blocks(grad);
    if (params.size() != blocks_.size() || grads.size() != blocks_.size()) {
        throw std::invalid_argument("NetworkOptimizer::step: network shape changed");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i].frozen) {
            blocks_[i].step(params[i].values, grads[i].values);
        }
    }
}

}  // namespace augcast
