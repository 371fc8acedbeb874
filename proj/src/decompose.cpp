#include "augcast/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace augcast {

int default_trend_span(int period, std::size_t length) {
    const auto n = static_cast<double>(length);
    const int upper = static_cast<int>(length) - (1 - static_cast<int>(length % 2));
    const double denom = 1.0 - 1.5 / (0.1 * n);
    int span = upper;
    if (denom > 0.0) {
        span = static_cast<int>(std::ceil(1.5 * period / denom));
        if (span % 2 == 0) {
            ++span;
        }
    }
    span = std::max(span, 7);
    if (upper >= 7) {
        span = std::min(span, upper);
    }
    return span;
}

std::vector<double> loess_smooth(std::span<const double> x, int span) {
    const auto n = x.size();
    std::vector<double> out(n);
    if (n == 0) {
        return out;
    }
    if (n == 1) {
        out[0] = x[0];
        return out;
    }
    const std::size_t q = std::min<std::size_t>(static_cast<std::size_t>(std::max(span, 2)), n);
    const double extra = span > static_cast<int>(n) ? 0.5 * (span - static_cast<int>(n)) : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        // window of q nearest indices around i
        std::size_t left = i >= q / 2 ? i - q / 2 : 0;
        if (left + q > n) {
            left = n - q;
        }
        const std::size_t right = left + q - 1;
        const double h = static_cast<double>(std::max(i - left, right - i)) + 1.0 + extra;

        double sw = 0.0;
        double swx = 0.0;
        double swy = 0.0;
        for (std::size_t j = left; j <= right; ++j) {
            const double r = std::abs(static_cast<double>(j) - static_cast<double>(i)) / h;
            const double c = 1.0 - r * r * r;
            const double w = c * c * c;
            sw += w;
            swx += w * static_cast<double>(j);
            swy += w * x[j];
        }
        const double xbar = swx / sw;
        const double ybar = swy / sw;
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t j = left; j <= right; ++j) {
            const double r = std::abs(static_cast<double>(j) - static_cast<double>(i)) / h;
            const double c = 1.0 - r * r * r;
            const double w = c * c * c;
            const double dx = static_cast<double>(j) - xbar;
            sxx += w * dx * dx;
            sxy += w * dx * (x[j] - ybar);
        }
        const double slope = sxx > 1e-12 * h * h * sw ? sxy / sxx : 0.0;
        out[i] = ybar + slope * (static_cast<double>(i) - xbar);
    }
    return out;
}

Decomposition stl_decompose(std::span<const double> x, int period, const DecomposeConfig& cfg) {
    if (period < 1) {
        throw std::invalid_argument("stl_decompose: period must be >= 1");
    }
    if (x.empty()) {
        throw std::invalid_argument("stl_decompose: empty series");
    }
    const auto n = x.size();
    const auto s = static_cast<std::size_t>(period);
    if (period > 1 && n < 2 * s) {
        throw std::invalid_argument("stl_decompose: series needs at least two full periods");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("stl_decompose: non-finite value");
        }
    }
    if (cfg.inner_iterations < 1) {
        throw std::invalid_argument("stl_decompose: inner_iterations must be >= 1");
    }
    const int span = cfg.trend_span.value_or(default_trend_span(period, n));

    Decomposition d;
    d.seasonal.assign(n, 0.0);
    d.trend.assign(n, 0.0);
    d.remainder.assign(n, 0.0);

    std::vector<double> work(n);
    for (int iter = 0; iter < cfg.inner_iterations; ++iter) {
        if (period > 1) {
            std::vector<double> cycle(s, 0.0);
            std::vector<std::size_t> count(s, 0);
            for (std::size_t t = 0; t < n; ++t) {
                cycle[t % s] += x[t] - d.trend[t];
                ++count[t % s];
            }
            double level = 0.0;
            for (std::size_t k = 0; k < s; ++k) {
                cycle[k] /= static_cast<double>(count[k]);
                level += cycle[k];
            }
            level /= static_cast<double>(s);
            for (std::size_t t = 0; t < n; ++t) {
                d.seasonal[t] = cycle[t % s] - level;
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            work[t] = x[t] - d.seasonal[t];
        }
        d.trend = loess_smooth(work, span);
        if (period == 1) {
            break;  // further passes would repeat the same smoothing
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        d.remainder[t] = x[t] - d.seasonal[t] - d.trend[t];
    }
    return d;
}

double seasonal_at(const Decomposition& d, int period, std::size_t t) {
    const auto n = d.seasonal.size();
    if (t < n) {
        return d.seasonal[t];
    }
    if (n == 0) {
        return 0.0;
    }
    const auto s = static_cast<std::size_t>(period);
    if (s > n) {
        return 0.0;
    }
    return d.seasonal[n - s + (t - n) % s];
}

}  // namespace augcast
