#include "augcast/checkpoint.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace augcast {

using nlohmann::json;

namespace {

json hp_to_json(const Hyperparameters& hp) {
    return json{{"cell_dim", hp.cell_dim},     {"minibatch", hp.minibatch}, {"epoch_size", hp.epoch_size},
                {"max_epochs", hp.max_epochs}, {"layers", hp.layers},       {"noise_std", hp.noise_std},
                {"init_std", hp.init_std},     {"l2_weight", hp.l2_weight}};
}

Hyperparameters hp_from_json(const json& j) {
    Hyperparameters hp;
    hp.cell_dim = j.at("cell_dim").get<int>();
    hp.minibatch = j.at("minibatch").get<int>();
    hp.epoch_size = j.at("epoch_size").get<int>();
    hp.max_epochs = j.at("max_epochs").get<int>();
    hp.layers = j.at("layers").get<int>();
    hp.noise_std = j.at("noise_std").get<double>();
    hp.init_std = j.at("init_std").get<double>();
    hp.l2_weight = j.at("l2_weight").get<double>();
    return hp;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
        throw std::runtime_error("checkpoint: matrix shape does not match data length");
    }
    Eigen::MatrixXd m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

}  // namespace

std::string checkpoint_json(const Network& net) {
    json j;
    j["format"] = "augcast-checkpoint";
    j["version"] = kCheckpointVersion;
    j["hyperparameters"] = hp_to_json(net.hp);
    j["lstm"] = json::array();
    for (const auto& l : net.lstm) {
        j["lstm"].push_back(json{{"residual", l.residual},
                                 {"frozen", l.frozen},
                                 {"W", matrix_to_json(l.W)},
                                 {"U", matrix_to_json(l.U)},
                                 {"b", matrix_to_json(l.b)}});
    }
    j["head"] = json::array();
    for (const auto& d : net.head) {
        j["head"].push_back(json{{"frozen", d.frozen}, {"D", matrix_to_json(d.D)}});
    }
    return j.dump(1);
}

Network network_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.value("format", "") != "augcast-checkpoint") {
        throw std::runtime_error("checkpoint: unrecognised format");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + j.at("version").dump());
    }
    Network net;
    net.hp = hp_from_json(j.at("hyperparameters"));
    for (const auto& jl : j.at("lstm")) {
        LstmLayer l;
        l.residual = jl.at("residual").get<bool>();
        l.frozen = jl.at("frozen").get<bool>();
        l.W = matrix_from_json(jl.at("W"));
        l.U = matrix_from_json(jl.at("U"));
        l.b = matrix_from_json(jl.at("b"));
        if (l.U.rows() != 4 * l.U.cols() || l.W.rows() != l.U.rows() || l.b.size() != l.U.rows()) {
            throw std::runtime_error("checkpoint: inconsistent LSTM layer shapes");
        }
        net.lstm.push_back(std::move(l));
    }
    for (const auto& jd : j.at("head")) {
        DenseLayer d;
        d.frozen = jd.at("frozen").get<bool>();
        d.D = matrix_from_json(jd.at("D"));
        net.head.push_back(std::move(d));
    }
    return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network& net) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint " + path.string());
    }
    out << checkpoint_json(net) << '\n';
}

Network load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return network_from_json(ss.str());
}

std::string hyperparameters_json(const Hyperparameters& hp) { return hp_to_json(hp).dump(2); }

Hyperparameters hyperparameters_from_json(const std::string& text) { return hp_from_json(json::parse(text)); }

Hyperparameters load_hyperparameters(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open hyperparameter file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return hyperparameters_from_json(ss.str());
}

}  // namespace augcast
