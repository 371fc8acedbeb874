#pragma once

#include "augcast/augment.hpp"
#include "augcast/data.hpp"
#include "augcast/net.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace augcast {

enum class StrategyKind { Baseline, Pooled, Transfer };
enum class TlScheme { Dense, AddDense, Lstm };
enum class TlMode { Freeze, Retrain };

std::string to_string(TlScheme s);
std::string to_string(TlMode m);

/// Default number of appended layers for a scheme (AddDense: 2, Lstm: 1, Dense: 1).
int default_q(TlScheme scheme);

struct Strategy {
    StrategyKind kind = StrategyKind::Baseline;
    AugmentMethod method = AugmentMethod::MBB;
    TlScheme scheme = TlScheme::Dense;
    TlMode mode = TlMode::Freeze;
    int q = 1;

    static Strategy baseline();
    static Strategy pooled(AugmentMethod method);
    static Strategy transfer(AugmentMethod method, TlScheme scheme, TlMode mode);
    /// Parses names such as "LSTM.Baseline", "DBA.Pooled", "GRATIS.TL.AddDense.Retrain".
    static Strategy parse(const std::string& name);

    std::string name() const;
    bool uses_augmentation() const { return kind != StrategyKind::Baseline; }
    /// Rejects Pooled + GRATIS and q < 1.
    void validate() const;
};

/// The 21 variants: Baseline, MBB/DBA Pooled, then every (method, scheme, mode) transfer.
std::vector<Strategy> all_strategies();

/**
 * @brief Turns a trained base network into a target network.
 *
 * Dense appends one bias-free layer (base output -> target_m). AddDense appends q
 * layers: q - 1 of base-output width, then one to target_m. Lstm inserts q residual
 * LSTM layers of width cell_dim on top of the recurrent stack and replaces the head
 * with a single cell_dim -> target_m projection. Freeze marks every pre-existing
 * block frozen; Retrain leaves everything trainable.
 */
Network build_target(const Network& base, TlScheme scheme, TlMode mode, int q, int target_m, Rng& rng);

/// Trains one network on `d` (all series) and returns it.
Network fit_network(const Dataset& d, const Hyperparameters& hp, std::uint64_t seed);

/// Forecasts (original units) for every series of `d` from a trained network.
std::map<std::string, std::vector<double>> forecast_dataset(const Network& net, const Dataset& d);

/// Dataset holding the augmented series with the metadata of `like`.
Dataset augmented_dataset(const Dataset& like, std::vector<TimeSeries> augmented);

/// Base model of a transfer strategy: trained on the augmented series alone.
Network pretrain_base(const Dataset& original, const std::vector<TimeSeries>& augmented, const Hyperparameters& hp,
                      std::uint64_t seed);

/// Train-on-target step of a transfer strategy, starting from a pre-trained base.
std::map<std::string, std::vector<double>> transfer_forecast(const Network& base, const Strategy& s,
                                                             const Dataset& original, std::uint64_t seed);

/// Elementwise median across equally long vectors (midpoint for even counts).
std::vector<double> elementwise_median(std::span<const std::vector<double>> values);

/**
 * @brief Runs one strategy once per training seed and returns the median forecast per original series.
 *
 * `original` is the training portion; forecasts cover the next M steps.
 */
std::map<std::string, std::vector<double>> run_strategy(const Strategy& s, const Dataset& original,
                                                        const std::vector<TimeSeries>& augmented,
                                                        const Hyperparameters& hp,
                                                        std::span<const std::uint64_t> seeds);

}  // namespace augcast
