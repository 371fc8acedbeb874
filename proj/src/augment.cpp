#include "augcast/augment.hpp"

#include "augcast/decompose.hpp"
#include "augcast/dtw.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace augcast {

std::string to_string(AugmentMethod m) {
    switch (m) {
        case AugmentMethod::MBB:
            return "MBB";
        case AugmentMethod::DBA:
            return "DBA";
        case AugmentMethod::GRATIS:
            return "GRATIS";
    }
    return "?";
}

AugmentMethod parse_augment_method(const std::string& s) {
    if (s == "MBB" || s == "mbb") {
        return AugmentMethod::MBB;
    }
    if (s == "DBA" || s == "dba") {
        return AugmentMethod::DBA;
    }
    if (s == "GRATIS" || s == "gratis") {
        return AugmentMethod::GRATIS;
    }
    throw std::invalid_argument("unknown augmentation method '" + s + "' (expected MBB, DBA or GRATIS)");
}

void AugmentConfig::validate() const {
    if (per_series < 1) {
        throw std::invalid_argument("augment: per_series must be >= 1");
    }
    if (total_override && *total_override < 1) {
        throw std::invalid_argument("augment: total count must be >= 1");
    }
    if (block_length && *block_length < 2) {
        throw std::invalid_argument("augment: block_length must be >= 2");
    }
    if (dba_iterations < 1) {
        throw std::invalid_argument("augment: dba_iterations must be >= 1");
    }
    if (mar_components < 2) {
        throw std::invalid_argument("augment: mar_components must be >= 2");
    }
    if (mar_length && *mar_length < 1) {
        throw std::invalid_argument("augment: mar_length must be >= 1");
    }
}

bool is_augmented_id(std::string_view id) { return id.find(kAugmentedTag) != std::string_view::npos; }

namespace {

std::string augmented_id(const std::string& base, std::size_t k) {
    return base + std::string(kAugmentedTag) + std::to_string(k);
}

int effective_period(int seasonality, std::size_t length) {
    return length >= 2 * static_cast<std::size_t>(seasonality) ? seasonality : 1;
}

}  // namespace

// --- MBB ---------------------------------------------------------------------

BlockBootstrap bootstrap_remainder(std::span<const double> remainder, int block_length, Rng& rng) {
    if (block_length < 2) {
        throw std::invalid_argument("bootstrap_remainder: block length must be >= 2");
    }
    const auto n = remainder.size();
    const auto l = static_cast<std::size_t>(block_length);
    if (n < l) {
        throw std::invalid_argument("bootstrap_remainder: remainder (" + std::to_string(n) +
                                    ") shorter than block length (" + std::to_string(l) + ")");
    }
    const std::size_t blocks = n / l + 2;
    std::uniform_int_distribution<std::size_t> start_dist(0, n - l);
    std::vector<double> joined;
    joined.reserve(blocks * l);
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto start = start_dist(rng);
        joined.insert(joined.end(), remainder.begin() + static_cast<std::ptrdiff_t>(start),
                      remainder.begin() + static_cast<std::ptrdiff_t>(start + l));
    }
    BlockBootstrap out;
    out.trim = std::uniform_int_distribution<std::size_t>(0, l - 1)(rng);
    out.values.assign(joined.begin() + static_cast<std::ptrdiff_t>(out.trim),
                      joined.begin() + static_cast<std::ptrdiff_t>(out.trim + n));
    return out;
}

int default_block_length(int seasonality, std::size_t length) {
    return std::max(2 * effective_period(seasonality, length), 8);
}

std::vector<TimeSeries> mbb_augment(const TimeSeries& x, int seasonality, const AugmentConfig& cfg, Rng& rng) {
    cfg.validate();
    const int period = effective_period(seasonality, x.values.size());
    const auto dec = stl_decompose(x.values, period);
    const int block = cfg.block_length.value_or(default_block_length(seasonality, x.values.size()));

    std::vector<TimeSeries> out;
    out.reserve(static_cast<std::size_t>(cfg.per_series));
    for (int k = 0; k < cfg.per_series; ++k) {
        const auto boot = bootstrap_remainder(dec.remainder, block, rng);
        TimeSeries s{augmented_id(x.id, static_cast<std::size_t>(k)), std::vector<double>(x.values.size())};
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            s.values[t] = std::max(0.0, dec.seasonal[t] + dec.trend[t] + boot.values[t]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

// --- DBA / ASD -----------------------------------------------------------------

std::vector<double> asd_weights(std::span<const double> distances, std::size_t reference) {
    if (reference >= distances.size()) {
        throw std::out_of_range("asd_weights: reference index out of range");
    }
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (i != reference && distances[i] > 0.0) {
            nearest = std::min(nearest, distances[i]);
        }
    }
    std::vector<double> w(distances.size(), 1.0);
    if (!std::isfinite(nearest)) {
        return w;  // every other series coincides with the reference
    }
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (i != reference) {
            w[i] = distances[i] == nearest ? 0.5 : std::exp(std::log(0.5) * distances[i] / nearest);
        }
    }
    return w;
}

namespace {

class DistanceCache {
public:
    explicit DistanceCache(const Dataset& d) : d_(d), rows_(d.series.size()) {}

    const std::vector<double>& row(std::size_t r) {
        auto& slot = rows_[r];
        if (!slot) {
            std::vector<double> dist(d_.series.size(), 0.0);
            for (std::size_t i = 0; i < dist.size(); ++i) {
                if (i != r) {
                    dist[i] = dtw_cost(d_.series[r].values, d_.series[i].values);
                }
            }
            slot = std::move(dist);
        }
        return *slot;
    }

private:
    const Dataset& d_;
    std::vector<std::optional<std::vector<double>>> rows_;
};

std::vector<double> asd_sample_with(const Dataset& d, std::size_t reference, int iterations,
                                    const std::vector<double>& distances) {
    std::vector<std::vector<double>> all;
    all.reserve(d.series.size());
    for (const auto& s : d.series) {
        all.push_back(s.values);
    }
    const auto weights = asd_weights(distances, reference);
    auto res = dba_average(all, weights, d.series[reference].values, iterations);
    for (double& v : res.barycenter) {
        v = std::max(0.0, v);
    }
    return res.barycenter;
}

}  // namespace

std::vector<double> asd_sample(const Dataset& d, std::size_t reference, int iterations) {
    if (reference >= d.series.size()) {
        throw std::out_of_range("asd_sample: reference index out of range");
    }
    DistanceCache cache(d);
    return asd_sample_with(d, reference, iterations, cache.row(reference));
}

std::vector<TimeSeries> asd_generate(const Dataset& d, const AugmentConfig& cfg) {
    cfg.validate();
    if (d.series.size() < 2) {
        throw std::invalid_argument("DBA augmentation needs at least two series; use MBB for single-series datasets");
    }
    const auto total = static_cast<std::size_t>(cfg.total_override.value_or(
        static_cast<int>(d.series.size()) * cfg.per_series));
    DistanceCache cache(d);
    std::vector<TimeSeries> out;
    out.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        auto rng = make_rng(cfg.seed, {k});
        const auto ref = std::uniform_int_distribution<std::size_t>(0, d.series.size() - 1)(rng);
        out.push_back(TimeSeries{augmented_id(d.series[ref].id, k),
                                 asd_sample_with(d, ref, cfg.dba_iterations, cache.row(ref))});
    }
    return out;
}

// --- GRATIS ----------------------------------------------------------------------

std::vector<double> ArComponent::lag_coefficients() const {
    const auto order = std::max(ar.size(), static_cast<std::size_t>(seasonal_lag));
    std::vector<double> phi(order, 0.0);
    std::copy(ar.begin(), ar.end(), phi.begin());
    phi[static_cast<std::size_t>(seasonal_lag) - 1] += seasonal_coef;
    return phi;
}

double companion_spectral_radius(std::span<const double> phi) {
    const auto p = static_cast<Eigen::Index>(phi.size());
    if (p == 0) {
        return 0.0;
    }
    if (p == 1) {
        return std::abs(phi[0]);
    }
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        c(0, j) = phi[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index i = 1; i < p; ++i) {
        c(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

MarModel draw_mar_model(int seasonality, int components, Rng& rng) {
    if (seasonality < 1) {
        throw std::invalid_argument("draw_mar_model: seasonality must be >= 1");
    }
    if (components < 2) {
        throw std::invalid_argument("draw_mar_model: at least two mixture components required");
    }
    constexpr int kMaxRedraws = 1000;
    std::normal_distribution<double> coef(0.0, 0.5);
    std::uniform_int_distribution<int> order(1, 3);

    MarModel model;
    for (int j = 0; j < components; ++j) {
        ArComponent comp;
        comp.seasonal_lag = seasonality;
        comp.ar.resize(static_cast<std::size_t>(order(rng)));
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
            for (double& a : comp.ar) {
                a = coef(rng);
            }
            comp.seasonal_coef = coef(rng);
            comp.spectral_radius = companion_spectral_radius(comp.lag_coefficients());
            if (comp.spectral_radius < 1.0) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw std::runtime_error("draw_mar_model: no stationary coefficients after 1000 redraws");
        }
        model.components.push_back(std::move(comp));
    }

    std::exponential_distribution<double> gamma1(1.0);  // Gamma(1, 1): flat Dirichlet
    model.weights.resize(static_cast<std::size_t>(components));
    double sum = 0.0;
    for (double& w : model.weights) {
        w = gamma1(rng);
        sum += w;
    }
    for (double& w : model.weights) {
        w /= sum;
    }
    return model;
}

std::vector<double> simulate_mar(const MarModel& model, int length, int seasonality, Rng& rng) {
    if (length < 1) {
        throw std::invalid_argument("simulate_mar: length must be >= 1");
    }
    std::vector<std::vector<double>> phis;
    std::size_t max_order = 0;
    for (const auto& c : model.components) {
        phis.push_back(c.lag_coefficients());
        max_order = std::max(max_order, phis.back().size());
    }
    const auto burn = static_cast<std::size_t>(50 + 2 * seasonality);
    const auto total = burn + static_cast<std::size_t>(length);

    std::discrete_distribution<std::size_t> pick(model.weights.begin(), model.weights.end());
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(max_order + total, 0.0);
    for (std::size_t t = max_order; t < y.size(); ++t) {
        const auto& phi = phis[pick(rng)];
        double v = noise(rng);
        for (std::size_t i = 0; i < phi.size(); ++i) {
            v += phi[i] * y[t - 1 - i];
        }
        y[t] = v;
    }
    std::vector<double> out(y.end() - length, y.end());
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    const double min = *lo;
    const double range = *hi - *lo;
    for (double& v : out) {
        v = range > 0.0 ? 1.0 + 99.0 * (v - min) / range : 50.5;
    }
    return out;
}

std::vector<GratisSeries> gratis_generate(int seasonality, int length, int count, int components,
                                          std::uint64_t seed) {
    if (length <= 2 * seasonality + 50) {
        throw std::invalid_argument("gratis_generate: length must exceed 2S + 50");
    }
    if (count < 0) {
        throw std::invalid_argument("gratis_generate: negative count");
    }
    std::vector<GratisSeries> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        auto rng = make_rng(seed, {static_cast<std::uint64_t>(k)});
        GratisSeries g;
        g.model = draw_mar_model(seasonality, components, rng);
        g.series.id = augmented_id("gratis", static_cast<std::size_t>(k));
        g.series.values = simulate_mar(g.model, length, seasonality, rng);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<TimeSeries> augment(const Dataset& d, const AugmentConfig& cfg) {
    cfg.validate();
    if (d.series.empty()) {
        throw std::invalid_argument("augment: empty dataset");
    }
    const auto n_series = d.series.size();
    switch (cfg.method) {
        case AugmentMethod::MBB: {
            std::vector<TimeSeries> out;
            const std::size_t total = cfg.total_override
                                          ? static_cast<std::size_t>(*cfg.total_override)
                                          : n_series * static_cast<std::size_t>(cfg.per_series);
            for (std::size_t i = 0; i < n_series; ++i) {
                AugmentConfig local = cfg;
                local.per_series = static_cast<int>(total / n_series + (i < total % n_series ? 1 : 0));
                if (local.per_series == 0) {
                    continue;
                }
                auto rng = make_rng(cfg.seed, {i});
                auto boots = mbb_augment(d.series[i], d.seasonality, local, rng);
                std::move(boots.begin(), boots.end(), std::back_inserter(out));
            }
            return out;
        }
        case AugmentMethod::DBA:
            return asd_generate(d, cfg);
        case AugmentMethod::GRATIS: {
            const int count = cfg.total_override.value_or(static_cast<int>(n_series) * cfg.per_series);
            const int length = cfg.mar_length.value_or(static_cast<int>(d.max_length()));
            auto gen = gratis_generate(d.seasonality, length, count, cfg.mar_components, cfg.seed);
            std::vector<TimeSeries> out;
            out.reserve(gen.size());
            for (auto& g : gen) {
                out.push_back(std::move(g.series));
            }
            return out;
        }
    }
    throw std::logic_error("augment: unhandled method");
}

}  // namespace augcast
