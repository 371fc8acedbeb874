#include "augcast/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace augcast {

namespace {

void require_non_empty(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("dtw: inputs must be non-empty");
    }
}

}  // namespace

DtwResult dtw(std::span<const double> a, std::span<const double> b) {
    require_non_empty(a, b);
    const auto n = a.size();
    const auto m = b.size();
    std::vector<double> acc(n * m);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (a[i] - b[j]) * (a[i] - b[j]);
            if (i == 0 && j == 0) {
                at(i, j) = d;
            } else if (i == 0) {
                at(i, j) = d + at(i, j - 1);
            } else if (j == 0) {
                at(i, j) = d + at(i - 1, j);
            } else {
                at(i, j) = d + std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
            }
        }
    }

    DtwResult r;
    r.cost = at(n - 1, m - 1);
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    r.path.pairs.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = at(i - 1, j - 1);
            const double up = at(i - 1, j);
            const double left = at(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        r.path.pairs.emplace_back(i, j);
    }
    std::reverse(r.path.pairs.begin(), r.path.pairs.end());
    return r;
}

double dtw_cost(std::span<const double> a, std::span<const double> b) {
    require_non_empty(a, b);
    const auto m = b.size();
    std::vector<double> prev(m);
    std::vector<double> cur(m);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (a[i] - b[j]) * (a[i] - b[j]);
            if (i == 0 && j == 0) {
                cur[j] = d;
            } else if (i == 0) {
                cur[j] = d + cur[j - 1];
            } else if (j == 0) {
                cur[j] = d + prev[j];
            } else {
                cur[j] = d + std::min({prev[j - 1], prev[j], cur[j - 1]});
            }
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

DbaResult dba_average(std::span<const std::vector<double>> series, std::span<const double> weights,
                      std::span<const double> init, int iterations, double tolerance) {
    if (series.size() != weights.size()) {
        throw std::invalid_argument("dba_average: one weight per series required");
    }
    if (init.empty()) {
        throw std::invalid_argument("dba_average: empty initial barycenter");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("dba_average: weights must be finite and non-negative");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("dba_average: weights sum to zero");
    }

    DbaResult r;
    r.barycenter.assign(init.begin(), init.end());
    const auto len = r.barycenter.size();
    std::vector<double> num(len);
    std::vector<double> den(len);

    auto align_all = [&](std::vector<WarpPath>& paths) {
        double cost = 0.0;
        paths.clear();
        for (std::size_t s = 0; s < series.size(); ++s) {
            auto res = dtw(r.barycenter, series[s]);
            cost += weights[s] * res.cost;
            paths.push_back(std::move(res.path));
        }
        return cost;
    };

    std::vector<WarpPath> paths;
    double cost = align_all(paths);
    r.cost_history.push_back(cost);
    for (int it = 0; it < iterations; ++it) {
        std::fill(num.begin(), num.end(), 0.0);
        std::fill(den.begin(), den.end(), 0.0);
        for (std::size_t s = 0; s < series.size(); ++s) {
            if (weights[s] == 0.0) {
                continue;
            }
            for (const auto& [bi, si] : paths[s].pairs) {
                num[bi] += weights[s] * series[s][si];
                den[bi] += weights[s];
            }
        }
        for (std::size_t k = 0; k < len; ++k) {
            r.barycenter[k] = num[k] / den[k];
        }
        const double next = align_all(paths);
        r.cost_history.push_back(next);
        if (cost - next < tolerance) {
            break;
        }
        cost = next;
    }
    return r;
}

}  // namespace augcast
