#include "augcast/net.hpp"

#include <cmath>
#include <stdexcept>

namespace augcast {

void Hyperparameters::validate() const {
    auto check_int = [](const char* name, int v, IntRange r) {
        if (v < r.lo || v > r.hi) {
            throw std::invalid_argument(std::string("hyperparameter ") + name + " = " + std::to_string(v) +
                                        " outside [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
        }
    };
    auto check_real = [](const char* name, double v, RealRange r) {
        if (!(v >= r.lo && v <= r.hi)) {
            throw std::invalid_argument(std::string("hyperparameter ") + name + " = " + std::to_string(v) +
                                        " outside its admissible range");
        }
    };
    check_int("cell_dim", cell_dim, kCellDim);
    check_int("minibatch", minibatch, kMinibatch);
    check_int("epoch_size", epoch_size, kEpochSize);
    check_int("max_epochs", max_epochs, kMaxEpochs);
    check_int("layers", layers, kLayers);
    check_real("noise_std", noise_std, kNoiseStd);
    check_real("init_std", init_std, kInitStd);
    check_real("l2_weight", l2_weight, kL2Weight);
}

int Network::input_width() const {
    if (!lstm.empty()) {
        return lstm.front().input_width();
    }
    return head.empty() ? 0 : static_cast<int>(head.front().D.cols());
}

int Network::output_width() const {
    if (!head.empty()) {
        return static_cast<int>(head.back().D.rows());
    }
    return lstm.empty() ? 0 : lstm.back().hidden();
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& b : parameter_blocks(*this)) {
        n += b.values.size();
    }
    return n;
}

Network Network::zeros_like() const {
    Network z = *this;
    for (auto& b : parameter_blocks(z)) {
        std::fill(b.values.begin(), b.values.end(), 0.0);
    }
    return z;
}

void Network::set_frozen(bool frozen) {
    for (auto& l : lstm) {
        l.frozen = frozen;
    }
    for (auto& d : head) {
        d.frozen = frozen;
    }
}

namespace {

template <typename Net, typename Block>
std::vector<Block> blocks_of(Net& net) {
    std::vector<Block> out;
    for (std::size_t l = 0; l < net.lstm.size(); ++l) {
        auto& layer = net.lstm[l];
        const auto prefix = "lstm" + std::to_string(l) + ".";
        out.push_back({prefix + "W", {layer.W.data(), static_cast<std::size_t>(layer.W.size())}, layer.frozen, true});
        out.push_back({prefix + "U", {layer.U.data(), static_cast<std::size_t>(layer.U.size())}, layer.frozen, true});
        out.push_back({prefix + "b", {layer.b.data(), static_cast<std::size_t>(layer.b.size())}, layer.frozen, false});
    }
    for (std::size_t k = 0; k < net.head.size(); ++k) {
        auto& d = net.head[k];
        out.push_back({"dense" + std::to_string(k) + ".D", {d.D.data(), static_cast<std::size_t>(d.D.size())}, d.frozen,
                       true});
    }
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LayerTrace {
    Eigen::MatrixXd gates;  // activated [i; f; g; o]
    Eigen::MatrixXd c;
    Eigen::MatrixXd tanh_c;
    Eigen::MatrixXd h;
    Eigen::MatrixXd out;
};

struct SeriesTrace {
    Eigen::MatrixXd x;
    std::vector<LayerTrace> layers;
    std::vector<Eigen::MatrixXd> head;  // head[0] = stack output, head.back() = predictions
};

void run_layer(const LstmLayer& layer, const Eigen::MatrixXd& in, LayerTrace& tr) {
    const Eigen::Index H = layer.hidden();
    const Eigen::Index T = in.cols();
    tr.gates.noalias() = layer.W * in;
    tr.gates.colwise() += layer.b;
    tr.c.resize(H, T);
    tr.tanh_c.resize(H, T);
    tr.h.resize(H, T);

    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd z(4 * H);
    for (Eigen::Index t = 0; t < T; ++t) {
        z.noalias() = layer.U * h_prev;
        z += tr.gates.col(t);
        auto g = tr.gates.col(t);
        for (Eigen::Index k = 0; k < H; ++k) {
            const double i = sigmoid(z(k));
            const double f = sigmoid(z(H + k));
            const double cand = std::tanh(z(2 * H + k));
            const double o = sigmoid(z(3 * H + k));
            g(k) = i;
            g(H + k) = f;
            g(2 * H + k) = cand;
            g(3 * H + k) = o;
            const double c = f * c_prev(k) + i * cand;
            const double tc = std::tanh(c);
            tr.c(k, t) = c;
            tr.tanh_c(k, t) = tc;
            tr.h(k, t) = o * tc;
        }
        h_prev = tr.h.col(t);
        c_prev = tr.c.col(t);
    }
    tr.out = tr.h;
    if (layer.residual) {
        tr.out += in;
    }
}

void run_forward(const Network& net, SeriesTrace& tr) {
    if (tr.x.rows() != net.input_width()) {
        throw std::invalid_argument("network input width " + std::to_string(net.input_width()) +
                                    " does not match data width " + std::to_string(tr.x.rows()));
    }
    tr.layers.resize(net.lstm.size());
    const Eigen::MatrixXd* in = &tr.x;
    for (std::size_t l = 0; l < net.lstm.size(); ++l) {
        if (net.lstm[l].residual && net.lstm[l].input_width() != net.lstm[l].hidden()) {
            throw std::logic_error("residual layer with mismatched widths");
        }
        run_layer(net.lstm[l], *in, tr.layers[l]);
        in = &tr.layers[l].out;
    }
    tr.head.resize(net.head.size() + 1);
    tr.head[0] = *in;
    for (std::size_t k = 0; k < net.head.size(); ++k) {
        tr.head[k + 1].noalias() = net.head[k].D * tr.head[k];
    }
}

void run_backward(const Network& net, const SeriesTrace& tr, const Eigen::MatrixXd& d_pred, Network& grad) {
    const std::size_t L = net.lstm.size();
    std::size_t lowest = L;
    for (std::size_t l = 0; l < L; ++l) {
        if (!net.lstm[l].frozen) {
            lowest = l;
            break;
        }
    }

    Eigen::MatrixXd d_a = d_pred;
    for (std::size_t k = net.head.size(); k-- > 0;) {
        if (!net.head[k].frozen) {
            grad.head[k].D.noalias() += d_a * tr.head[k].transpose();
        }
        bool needed = lowest < L;
        for (std::size_t j = 0; j < k && !needed; ++j) {
            needed = !net.head[j].frozen;
        }
        if (!needed) {
            return;
        }
        Eigen::MatrixXd next = net.head[k].D.transpose() * d_a;
        d_a.swap(next);
    }

    Eigen::MatrixXd d_out = std::move(d_a);
    for (std::size_t l = L; l-- > lowest;) {
        const auto& layer = net.lstm[l];
        const auto& lt = tr.layers[l];
        const Eigen::MatrixXd& in = l == 0 ? tr.x : tr.layers[l - 1].out;
        const Eigen::Index H = layer.hidden();
        const Eigen::Index T = in.cols();

        Eigen::MatrixXd d_z(4 * H, T);
        Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
        Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
        for (Eigen::Index t = T; t-- > 0;) {
            const auto g = lt.gates.col(t);
            for (Eigen::Index k = 0; k < H; ++k) {
                const double i = g(k);
                const double f = g(H + k);
                const double cand = g(2 * H + k);
                const double o = g(3 * H + k);
                const double tc = lt.tanh_c(k, t);
                const double c_prev = t > 0 ? lt.c(k, t - 1) : 0.0;
                const double dh = d_out(k, t) + dh_next(k);
                const double dc = dh * o * (1.0 - tc * tc) + dc_next(k);
                d_z(k, t) = dc * cand * i * (1.0 - i);
                d_z(H + k, t) = dc * c_prev * f * (1.0 - f);
                d_z(2 * H + k, t) = dc * i * (1.0 - cand * cand);
                d_z(3 * H + k, t) = dh * tc * o * (1.0 - o);
                dc_next(k) = dc * f;
            }
            dh_next.noalias() = layer.U.transpose() * d_z.col(t);
        }

        if (!layer.frozen) {
            auto& gl = grad.lstm[l];
            gl.W.noalias() += d_z * in.transpose();
            if (T > 1) {
                gl.U.noalias() += d_z.rightCols(T - 1) * lt.h.leftCols(T - 1).transpose();
            }
            gl.b += d_z.rowwise().sum();
        }
        if (l > lowest) {
            Eigen::MatrixXd d_in = layer.W.transpose() * d_z;
            if (layer.residual) {
                d_in += d_out;
            }
            d_out.swap(d_in);
        }
    }
}

void add_noise(Eigen::MatrixXd& x, double std_dev, Rng& rng) {
    if (std_dev <= 0.0) {
        return;
    }
    std::normal_distribution<double> noise(0.0, std_dev);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x.data()[i] += noise(rng);
    }
}

}  // namespace

std::vector<ParamBlock> parameter_blocks(Network& net) { return blocks_of<Network, ParamBlock>(net); }

std::vector<ConstParamBlock> parameter_blocks(const Network& net) {
    return blocks_of<const Network, ConstParamBlock>(net);
}

LstmLayer make_lstm_layer(int input_width, int hidden, bool residual, double init_std, Rng& rng) {
    if (input_width < 1 || hidden < 1) {
        throw std::invalid_argument("make_lstm_layer: widths must be positive");
    }
    if (residual && input_width != hidden) {
        throw std::invalid_argument("make_lstm_layer: residual layers need input width == hidden");
    }
    std::normal_distribution<double> init(0.0, init_std);
    LstmLayer l;
    l.W.resize(4 * hidden, input_width);
    l.U.resize(4 * hidden, hidden);
    for (Eigen::Index i = 0; i < l.W.size(); ++i) {
        l.W.data()[i] = init(rng);
    }
    for (Eigen::Index i = 0; i < l.U.size(); ++i) {
        l.U.data()[i] = init(rng);
    }
    l.b = Eigen::VectorXd::Zero(4 * hidden);
    l.b.segment(hidden, hidden).setOnes();
    l.residual = residual;
    return l;
}

DenseLayer make_dense_layer(int input_width, int output_width, double init_std, Rng& rng) {
    if (input_width < 1 || output_width < 1) {
        throw std::invalid_argument("make_dense_layer: widths must be positive");
    }
    std::normal_distribution<double> init(0.0, init_std);
    DenseLayer d;
    d.D.resize(output_width, input_width);
    for (Eigen::Index i = 0; i < d.D.size(); ++i) {
        d.D.data()[i] = init(rng);
    }
    return d;
}

Network make_network(int input_width, int output_width, const Hyperparameters& hp, Rng& rng) {
    if (hp.layers < 1 || hp.cell_dim < 1) {
        throw std::invalid_argument("make_network: need at least one layer of positive width");
    }
    Network net;
    net.hp = hp;
    for (int l = 0; l < hp.layers; ++l) {
        net.lstm.push_back(make_lstm_layer(l == 0 ? input_width : hp.cell_dim, hp.cell_dim, l > 0, hp.init_std, rng));
    }
    net.head.push_back(make_dense_layer(hp.cell_dim, output_width, hp.init_std, rng));
    return net;
}

SeriesData series_data(const WindowSet& ws, std::size_t count) {
    if (count > ws.windows.size()) {
        throw std::out_of_range("series_data: more windows requested than available");
    }
    SeriesData d;
    if (count == 0) {
        return d;
    }
    const auto& first = ws.windows.front();
    const auto in_w = static_cast<Eigen::Index>(first.input.size() + first.seasonal_exo.size());
    const auto m = static_cast<Eigen::Index>(first.target.size());
    d.inputs.resize(in_w, static_cast<Eigen::Index>(count));
    d.targets.resize(m, static_cast<Eigen::Index>(count));
    for (std::size_t t = 0; t < count; ++t) {
        const auto f = ws.windows[t].features();
        d.inputs.col(static_cast<Eigen::Index>(t)) = Eigen::Map<const Eigen::VectorXd>(f.data(), in_w);
        d.targets.col(static_cast<Eigen::Index>(t)) =
            Eigen::Map<const Eigen::VectorXd>(ws.windows[t].target.data(), m);
    }
    return d;
}

SeriesData training_data(const WindowSet& ws) { return series_data(ws, ws.windows.size() - 1); }

Eigen::MatrixXd predict_sequence(const Network& net, const Eigen::MatrixXd& inputs) {
    SeriesTrace tr;
    tr.x = inputs;
    run_forward(net, tr);
    return std::move(tr.head.back());
}

double l2_penalty(const Network& net) {
    double sum = 0.0;
    for (const auto& b : parameter_blocks(net)) {
        if (b.weight && !b.frozen) {
            for (double v : b.values) {
                sum += v * v;
            }
        }
    }
    return net.hp.l2_weight * sum;
}

double loss_and_gradient(const Network& net, std::span<const SeriesData> batch, Rng* rng, Network* grad) {
    double entries = 0.0;
    for (const auto& s : batch) {
        if (s.inputs.cols() != s.targets.cols()) {
            throw std::invalid_argument("loss_and_gradient: inputs and targets disagree on window count");
        }
        if (s.targets.cols() > 0 && s.targets.rows() != net.output_width()) {
            throw std::invalid_argument("loss_and_gradient: target width does not match network output");
        }
        entries += static_cast<double>(s.targets.size());
    }
    if (entries == 0.0) {
        throw std::invalid_argument("loss_and_gradient: batch has no training windows");
    }
    if (grad != nullptr) {
        *grad = net.zeros_like();
    }

    double abs_sum = 0.0;
    SeriesTrace tr;
    for (const auto& s : batch) {
        if (s.targets.cols() == 0) {
            continue;
        }
        tr.x = s.inputs;
        if (rng != nullptr) {
            add_noise(tr.x, net.hp.noise_std, *rng);
        }
        run_forward(net, tr);
        const Eigen::MatrixXd diff = tr.head.back() - s.targets;
        abs_sum += diff.cwiseAbs().sum();
        if (grad != nullptr) {
            const Eigen::MatrixXd d_pred = diff.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }) / entries;
            run_backward(net, tr, d_pred, *grad);
        }
    }
    const double total = abs_sum / entries + l2_penalty(net);
    if (!std::isfinite(total)) {
        throw std::domain_error("loss_and_gradient: non-finite loss");
    }
    if (grad != nullptr) {
        auto gblocks = parameter_blocks(*grad);
        const auto pblocks = parameter_blocks(net);
        const double scale = 2.0 * net.hp.l2_weight;
        for (std::size_t i = 0; i < gblocks.size(); ++i) {
            if (pblocks[i].weight && !pblocks[i].frozen) {
                for (std::size_t j = 0; j < gblocks[i].values.size(); ++j) {
                    gblocks[i].values[j] += scale * pblocks[i].values[j];
                }
            }
        }
    }
    return total;
}

std::vector<std::vector<double>> forward(const Network& net, const WindowSet& ws, bool inject_noise, Rng& rng) {
    auto data = series_data(ws, ws.windows.size());
    if (inject_noise) {
        add_noise(data.inputs, net.hp.noise_std, rng);
    }
    const Eigen::MatrixXd p = predict_sequence(net, data.inputs);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(p.cols()));
    for (Eigen::Index t = 0; t < p.cols(); ++t) {
        out[static_cast<std::size_t>(t)].assign(p.col(t).data(), p.col(t).data() + p.rows());
    }
    return out;
}

double loss(std::span<const std::vector<double>> preds, std::span<const std::vector<double>> targets,
            const Network& net) {
    if (preds.size() != targets.size() || preds.empty()) {
        throw std::invalid_argument("loss: prediction and target counts differ or are empty");
    }
    double sum = 0.0;
    double count = 0.0;
    for (std::size_t w = 0; w < preds.size(); ++w) {
        if (preds[w].size() != targets[w].size()) {
            throw std::invalid_argument("loss: prediction and target widths differ");
        }
        for (std::size_t h = 0; h < preds[w].size(); ++h) {
            if (!std::isfinite(preds[w][h]) || !std::isfinite(targets[w][h])) {
                throw std::domain_error("loss: non-finite value");
            }
            sum += std::abs(preds[w][h] - targets[w][h]);
            count += 1.0;
        }
    }
    if (count == 0.0) {
        throw std::invalid_argument("loss: empty windows");
    }
    return sum / count + l2_penalty(net);
}

Network backward(const Network& net, std::span<const WindowSet> series) {
    std::vector<SeriesData> batch;
    batch.reserve(series.size());
    for (const auto& ws : series) {
        batch.push_back(training_data(ws));
    }
    Network grad;
    loss_and_gradient(net, batch, nullptr, &grad);
    return grad;
}

std::vector<double> forecast(const Network& net, const WindowSet& ws) {
    const auto f = ws.forecast_window.features();
    SeriesData d = series_data(ws, ws.windows.size());
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(f.size()), d.inputs.cols() + 1);
    if (d.inputs.cols() > 0) {
        inputs.leftCols(d.inputs.cols()) = d.inputs;
    }
    inputs.col(inputs.cols() - 1) = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::MatrixXd p = predict_sequence(net, inputs);
    const auto last = p.col(p.cols() - 1);
    return std::vector<double>(last.data(), last.data() + last.size());
}

}  // namespace augcast
