#include "augcast/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace augcast {

std::vector<double> rank_row(std::span<const double> row) {
    std::vector<std::size_t> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::vector<double> ranks(row.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && row[idx[j + 1]] == row[idx[i]]) {
            ++j;
        }
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[idx[k]] = shared;
        }
        i = j + 1;
    }
    return ranks;
}

std::vector<double> average_ranks(const ErrorMatrix& m) {
    m.validate();
    if (m.rows.empty() || m.columns.size() < 2) {
        throw std::invalid_argument("average_ranks: need at least one row and two columns");
    }
    std::vector<double> sums(m.columns.size(), 0.0);
    for (const auto& row : m.cells) {
        const auto r = rank_row(row);
        for (std::size_t c = 0; c < r.size(); ++c) {
            sums[c] += r[c];
        }
    }
    for (double& s : sums) {
        s /= static_cast<double>(m.rows.size());
    }
    return sums;
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
        throw std::domain_error("regularized_gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    constexpr double kEps = 1e-16;
    constexpr int kMaxIter = 10000;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // P(a, x) by its power series
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < kMaxIter; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * kEps) {
                break;
            }
        }
        return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
    }
    // Q(a, x) by the Legendre continued fraction (modified Lentz)
    constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = b + an / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            break;
        }
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

double chi_square_upper_tail(double x, double dof) {
    if (!(dof > 0.0)) {
        throw std::domain_error("chi_square_upper_tail: dof must be positive");
    }
    if (x <= 0.0) {
        return 1.0;
    }
    return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

FriedmanResult friedman_test(const ErrorMatrix& m) {
    m.validate();
    const auto n = m.rows.size();
    const auto k = m.columns.size();
    if (n < 2 || k < 2) {
        throw std::invalid_argument("friedman_test: need at least 2 rows and 2 methods");
    }
    std::vector<double> rank_sums(k, 0.0);
    for (const auto& row : m.cells) {
        const auto r = rank_row(row);
        for (std::size_t c = 0; c < k; ++c) {
            rank_sums[c] += r[c];
        }
    }
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    double sq = 0.0;
    for (double r : rank_sums) {
        sq += r * r;
    }
    FriedmanResult res;
    res.statistic = 12.0 / (nn * kk * (kk + 1.0)) * sq - 3.0 * nn * (kk + 1.0);
    res.statistic = std::max(res.statistic, 0.0);  // rounding can leave -1e-15
    res.p = chi_square_upper_tail(res.statistic, kk - 1.0);
    return res;
}

std::map<std::string, double> hochberg_adjust(const std::map<std::string, double>& pvalues) {
    std::vector<std::pair<double, std::string>> sorted;
    for (const auto& [name, p] : pvalues) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::domain_error("hochberg_adjust: p-value of '" + name + "' outside [0, 1]");
        }
        sorted.emplace_back(p, name);
    }
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto count = sorted.size();
    std::map<std::string, double> out;
    double running = 1.0;
    for (std::size_t i = count; i-- > 0;) {
        const double factor = static_cast<double>(count - i);
        running = std::min(running, std::min(1.0, factor * sorted[i].first));
        out[sorted[i].second] = running;
    }
    return out;
}

std::map<std::string, double> posthoc_pvalues(const std::map<std::string, double>& average_ranks,
                                              const std::string& control, std::size_t n_rows, std::size_t k) {
    if (n_rows == 0 || k < 2) {
        throw std::invalid_argument("posthoc_pvalues: need N >= 1 and k >= 2");
    }
    const double ctrl = average_ranks.at(control);
    const double kk = static_cast<double>(k);
    const double se = std::sqrt(kk * (kk + 1.0) / (6.0 * static_cast<double>(n_rows)));
    std::map<std::string, double> out;
    for (const auto& [name, r] : average_ranks) {
        if (name != control) {
            out[name] = normal_two_sided_p((r - ctrl) / se);
        }
    }
    return out;
}

StatReport statistical_report(const ErrorMatrix& m) {
    const auto fr = friedman_test(m);
    const auto ranks = average_ranks(m);
    StatReport r;
    r.friedman_statistic = fr.statistic;
    r.friedman_p = fr.p;
    std::vector<std::size_t> idx(m.columns.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
    for (auto i : idx) {
        r.order.push_back(m.columns[i]);
        r.average_rank[m.columns[i]] = ranks[i];
    }
    r.control = r.order.front();
    r.adjusted_p = hochberg_adjust(posthoc_pvalues(r.average_rank, r.control, m.rows.size(), m.columns.size()));
    return r;
}

namespace {

std::string format_p(double p) {
    if (p >= 1e-3) {
        return fmt::format("{:.3f}", p);
    }
    return fmt::format("{:.2e}", p);
}

}  // namespace

std::string format_stat_report(const StatReport& r, const std::string& metric, double alpha) {
    std::size_t width = 6;
    for (const auto& name : r.order) {
        width = std::max(width, name.size());
    }
    std::string out;
    out += fmt::format("Friedman rank-sum test ({}): statistic = {:.6f}, p = {}\n", metric, r.friedman_statistic,
                       format_p(r.friedman_p));
    out += fmt::format("Control method: {}\n", r.control);
    out += fmt::format("{:<{}}  {:>10}  {:>10}\n", "Method", width, "AvgRank", "p_Hoch");
    const std::string rule(width + 24, '-');
    out += rule + "\n";
    bool separated = false;
    for (const auto& name : r.order) {
        if (name == r.control) {
            out += fmt::format("{:<{}}  {:>10.4f}  {:>10}\n", name, width, r.average_rank.at(name), "-");
            continue;
        }
        const double p = r.adjusted_p.at(name);
        if (!separated && p < alpha) {
            out += rule + "\n";
            separated = true;
        }
        out += fmt::format("{:<{}}  {:>10.4f}  {:>10}\n", name, width, r.average_rank.at(name), format_p(p));
    }
    out += rule + "\n";
    out += fmt::format("Methods below the inner separator are significantly worse than {} at alpha = {}\n", r.control,
                       alpha);
    return out;
}

}  // namespace augcast
