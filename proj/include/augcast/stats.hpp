#pragma once

#include "augcast/metrics.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace augcast {

/// Ascending ranks (1 = smallest); ties share the mean of their positions.
std::vector<double> rank_row(std::span<const double> row);

/// Per-column mean of the row-wise ranks.
std::vector<double> average_ranks(const ErrorMatrix& m);

struct FriedmanResult {
    double statistic = 0.0;
    double p = 1.0;
};

/// chi2_F = 12 / (N k (k + 1)) * sum_j R_j^2 - 3 N (k + 1), upper chi-square tail with k - 1 dof.
FriedmanResult friedman_test(const ErrorMatrix& m);

/// Q(a, x) = Gamma(a, x) / Gamma(a), series below a + 1, continued fraction above.
double regularized_gamma_q(double a, double x);
double chi_square_upper_tail(double x, double dof);
/// P(|Z| >= |z|) for a standard normal Z.
double normal_two_sided_p(double z);

/// Hochberg step-up adjustment; keys are method names.
std::map<std::string, double> hochberg_adjust(const std::map<std::string, double>& pvalues);

/// Two-sided z-test p-values of every method against `control` using the Friedman rank standard error.
std::map<std::string, double> posthoc_pvalues(const std::map<std::string, double>& average_ranks,
                                              const std::string& control, std::size_t n_rows, std::size_t k);

struct StatReport {
    double friedman_statistic = 0.0;
    double friedman_p = 1.0;
    std::string control;
    std::map<std::string, double> average_rank;
    std::map<std::string, double> adjusted_p;  ///< excludes the control
    std::vector<std::string> order;            ///< methods by ascending average rank
};

inline constexpr double kSignificanceLevel = 0.05;

/// Friedman test plus Hochberg-adjusted post-hoc p-values against the best-ranked method.
StatReport statistical_report(const ErrorMatrix& m);

/// Plain-text table with a separator before the first method significantly worse than the control.
std::string format_stat_report(const StatReport& r, const std::string& metric, double alpha = kSignificanceLevel);

}  // namespace augcast
