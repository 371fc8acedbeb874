#pragma once

#include "augcast/data.hpp"
#include "augcast/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace augcast {

enum class AugmentMethod { MBB, DBA, GRATIS };

std::string to_string(AugmentMethod m);
AugmentMethod parse_augment_method(const std::string& s);

struct AugmentConfig {
    AugmentMethod method = AugmentMethod::MBB;
    int per_series = 10;
    /// Total number of generated series; defaults to N * per_series.
    std::optional<int> total_override;
    std::uint64_t seed = 0;
    /// MBB block length; defaults to max(2S, 8).
    std::optional<int> block_length;
    int dba_iterations = 10;
    int mar_components = 4;
    /// GRATIS series length; defaults to the longest series in the dataset.
    std::optional<int> mar_length;

    void validate() const;
};

/// Suffix appended to the ids of generated series.
inline constexpr std::string_view kAugmentedTag = "__aug";

bool is_augmented_id(std::string_view id);

// --- moving block bootstrap ------------------------------------------------

struct BlockBootstrap {
    std::vector<double> values;
    std::size_t trim = 0;  ///< offset into the concatenated blocks
};

/// Concatenates uniformly drawn blocks of `remainder` and cuts a random-offset slice of the same length.
BlockBootstrap bootstrap_remainder(std::span<const double> remainder, int block_length, Rng& rng);

/// Default block length for a series: max(2S, 8) with S the decomposition period actually used.
int default_block_length(int seasonality, std::size_t length);

/// `cfg.per_series` bootstrapped copies of x: seasonal + trend + block-bootstrapped STL remainder.
std::vector<TimeSeries> mbb_augment(const TimeSeries& x, int seasonality, const AugmentConfig& cfg, Rng& rng);

// --- DBA with ASD weighting -----------------------------------------------

/// ASD weights relative to the reference: 1 for the reference, exp(ln 0.5 * d_i / d_NN) otherwise.
std::vector<double> asd_weights(std::span<const double> distances, std::size_t reference);

/// One DBA sample around `reference` (index into d.series).
std::vector<double> asd_sample(const Dataset& d, std::size_t reference, int iterations);

std::vector<TimeSeries> asd_generate(const Dataset& d, const AugmentConfig& cfg);

// --- GRATIS-style mixture autoregression ------------------------------------

struct ArComponent {
    std::vector<double> ar;       ///< coefficients for lags 1..p
    double seasonal_coef = 0.0;   ///< coefficient for lag S
    int seasonal_lag = 1;
    double spectral_radius = 0.0; ///< of the companion matrix

    /// Combined lag polynomial coefficients phi_1..phi_P.
    std::vector<double> lag_coefficients() const;
};

struct MarModel {
    std::vector<ArComponent> components;
    std::vector<double> weights;  ///< mixture weights, sum to 1
};

struct GratisSeries {
    TimeSeries series;
    MarModel model;
};

/// Spectral radius of the companion matrix of phi_1..phi_P.
double companion_spectral_radius(std::span<const double> lag_coefficients);

MarModel draw_mar_model(int seasonality, int components, Rng& rng);
std::vector<double> simulate_mar(const MarModel& model, int length, int seasonality, Rng& rng);

std::vector<GratisSeries> gratis_generate(int seasonality, int length, int count, int components, std::uint64_t seed);

// --- dispatch ---------------------------------------------------------------

/// Generates the augmented series for `d` according to cfg.method. Deterministic in cfg.seed.
std::vector<TimeSeries> augment(const Dataset& d, const AugmentConfig& cfg);

}  // namespace augcast
