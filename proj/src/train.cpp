#include "augcast/train.hpp"

#include "augcast/cocob.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace augcast {

double validation_loss(const Network& net, std::span<const WindowSet> data) {
    if (data.empty()) {
        throw std::invalid_argument("validation_loss: no series");
    }
    double sum = 0.0;
    for (const auto& ws : data) {
        const auto d = series_data(ws, ws.windows.size());
        const Eigen::MatrixXd p = predict_sequence(net, d.inputs);
        const auto last = p.cols() - 1;
        sum += (p.col(last) - d.targets.col(last)).cwiseAbs().mean();
    }
    return sum / static_cast<double>(data.size());
}

TrainResult train(Network net, std::span<const WindowSet> data, std::uint64_t seed) {
    net.hp.validate();
    if (data.empty()) {
        throw std::invalid_argument("train: empty window sets");
    }
    std::vector<SeriesData> series;
    series.reserve(data.size());
    std::vector<std::size_t> trainable;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].windows.empty()) {
            throw std::invalid_argument("train: series '" + data[i].series_id + "' has no windows");
        }
        series.push_back(training_data(data[i]));
        if (series.back().targets.cols() > 0) {
            trainable.push_back(i);
        }
    }
    if (trainable.empty()) {
        throw std::invalid_argument("train: no series has a training window besides its validation window");
    }

    Rng rng(seed);
    NetworkOptimizer opt(net);
    Network grad;
    TrainResult result;
    double best = std::numeric_limits<double>::infinity();
    const auto batch_size = static_cast<std::size_t>(net.hp.minibatch);
    std::vector<SeriesData> batch;

    for (int epoch = 0; epoch < net.hp.max_epochs; ++epoch) {
        for (int pass = 0; pass < net.hp.epoch_size; ++pass) {
            std::shuffle(trainable.begin(), trainable.end(), rng);
            for (std::size_t start = 0; start < trainable.size(); start += batch_size) {
                const auto end = std::min(start + batch_size, trainable.size());
                batch.clear();
                for (std::size_t k = start; k < end; ++k) {
                    batch.push_back(series[trainable[k]]);
                }
                loss_and_gradient(net, batch, &rng, &grad);
                opt.step(net, grad);
            }
        }
        const double vl = validation_loss(net, data);
        result.validation_losses.push_back(vl);
        if (vl < best) {
            best = vl;
            result.best_epoch = epoch;
            result.net = net;
        }
    }
    if (!std::isfinite(best)) {
        throw std::domain_error("train: validation loss never finite");
    }
    return result;
}

}  // namespace augcast
