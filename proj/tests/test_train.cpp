#include "augcast/cocob.hpp"
#include "augcast/pipeline.hpp"
#include "augcast/train.hpp"

#include <doctest.h>

#include <cmath>

using namespace augcast;

namespace {

std::vector<WindowSet> toy_windows(int count = 6) {
    Dataset d;
    d.name = "trend";
    d.seasonality = 1;
    d.horizon = 3;
    d.input_window = 4;
    for (int i = 0; i < count; ++i) {
        TimeSeries s{"t" + std::to_string(i), {}};
        for (int t = 0; t < 30; ++t) {
            s.values.push_back(10.0 + (1.0 + 0.2 * i) * t);
        }
        d.series.push_back(s);
    }
    const auto pre = preprocess(d);
    std::vector<WindowSet> out;
    for (const auto& [id, ws] : pre.windowsets) {
        out.push_back(ws);
    }
    return out;
}

Network toy_net(int max_epochs) {
    Hyperparameters hp;
    hp.max_epochs = max_epochs;
    hp.minibatch = 2;
    Rng rng(3);
    return make_network(4, 3, hp, rng);
}

}  // namespace

TEST_CASE("COCOB: zero gradient leaves parameters unchanged") {
    std::vector<double> w{1.5, -2.0, 0.0};
    Cocob opt(w);
    const std::vector<double> zero(3, 0.0);
    for (int i = 0; i < 5; ++i) {
        opt.step(w, zero);
    }
    CHECK(w == std::vector<double>{1.5, -2.0, 0.0});
}

TEST_CASE("COCOB minimises |w - 10| from 0") {
    std::vector<double> w{0.0};
    Cocob opt(w);
    for (int i = 0; i < 500; ++i) {
        const std::vector<double> g{w[0] > 10.0 ? 1.0 : (w[0] < 10.0 ? -1.0 : 0.0)};
        opt.step(w, g);
    }
    CHECK(std::abs(w[0] - 10.0) < 0.5);
}

TEST_CASE("COCOB first step arithmetic") {
    // L = 1, G = 1, reward 0, theta = 1: w = 0 + 1 / (1 * max(2, 100)) * 1
    std::vector<double> w{0.0};
    Cocob opt(w);
    opt.step(w, std::vector<double>{-1.0});
    CHECK(w[0] == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(opt.max_grad()[0] == 1.0);
    CHECK(opt.grad_norm_sum()[0] == 1.0);
}

TEST_CASE("COCOB coordinates with identical histories evolve identically") {
    std::vector<double> w{0.3, 0.3};
    Cocob opt(w);
    for (int i = 0; i < 50; ++i) {
        const double g = std::sin(0.7 * i);
        opt.step(w, std::vector<double>{g, g});
        CHECK(w[0] == w[1]);
    }
    CHECK_THROWS_AS(opt.step(w, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("network optimizer skips frozen blocks") {
    auto net = toy_net(2);
    net.lstm[0].frozen = true;
    const Network before = net;
    NetworkOptimizer opt(net);
    const auto windows = toy_windows();
    for (int i = 0; i < 5; ++i) {
        const auto grad = backward(net, windows);
        opt.step(net, grad);
    }
    CHECK(net.lstm[0].W == before.lstm[0].W);
    CHECK(net.lstm[0].b == before.lstm[0].b);
    CHECK(net.head[0].D != before.head[0].D);
}

TEST_CASE("training loop contract") {
    const auto windows = toy_windows();
    const auto r = train(toy_net(2), windows, 11);
    CHECK(r.validation_losses.size() == 2);
    CHECK(r.best_epoch >= 0);
    CHECK(r.best_epoch < 2);
    const double best = r.validation_losses[static_cast<std::size_t>(r.best_epoch)];
    CHECK(validation_loss(r.net, windows) == best);
    for (double v : r.validation_losses) {
        CHECK(best <= v);
    }
}

TEST_CASE("training is deterministic per seed") {
    const auto windows = toy_windows();
    const auto a = train(toy_net(3), windows, 5);
    const auto b = train(toy_net(3), windows, 5);
    const auto pa = parameter_blocks(a.net);
    const auto pb = parameter_blocks(b.net);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(std::equal(pa[i].values.begin(), pa[i].values.end(), pb[i].values.begin()));
    }
    CHECK(a.validation_losses == b.validation_losses);
}

TEST_CASE("training reduces the validation loss on a trend") {
    const auto windows = toy_windows();
    const auto r = train(toy_net(20), windows, 1);
    CHECK(r.validation_losses[static_cast<std::size_t>(r.best_epoch)] < r.validation_losses.front());
}

TEST_CASE("training input checks") {
    CHECK_THROWS_AS(train(toy_net(2), std::vector<WindowSet>{}, 0), std::invalid_argument);
    auto net = toy_net(2);
    net.hp.max_epochs = 0;
    CHECK_THROWS_AS(train(net, toy_windows(), 0), std::invalid_argument);
}
