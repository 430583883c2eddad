#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nasbo {

/// Kendall's tau-b. Empty when either list is constant.
/// Throws std::invalid_argument for unequal lengths or fewer than two values.
std::optional<double> kendall_tau(std::span<const double> x, std::span<const double> y);

/// Long-format factorial data: one categorical level label per factor per row.
struct FactorialData {
  std::vector<std::string> factor_names;
  struct Row {
    std::vector<std::string> levels;
    double response = 0.0;
  };
  std::vector<Row> rows;

  void add(std::vector<std::string> levels, double response);
};

struct AnovaRow {
  std::string term;
  double sum_sq = 0.0;
  int df = 0;
  double f_value = 0.0;  // NaN on the residual row
  double p_value = 0.0;  // NaN on the residual row
};

struct AnovaTable {
  std::vector<AnovaRow> rows;  // one per factor, then "Residuals"

  const AnovaRow& term(const std::string& name) const;
  const AnovaRow& residuals() const { return rows.back(); }
};

/// Residual sum of squares of an additive dummy-coded least-squares fit on the
/// listed factors (intercept always included). Throws on rank deficiency.
double additive_rss(const FactorialData& data, std::span<const std::size_t> factors);

/// Type II sums of squares for the additive model over all factors of `data`.
/// Throws std::invalid_argument naming the confounded pair if the design is
/// rank deficient, or if a factor has fewer than two levels.
AnovaTable anova_typeII(const FactorialData& data);

struct OnewayResult {
  double f_value = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
};

/// F value reported when groups differ with zero within-group variance.
inline constexpr double kCappedF = 1e300;

OnewayResult anova_oneway(const std::vector<std::vector<double>>& groups);

/// Upper tail probability of the F(d1, d2) distribution.
double f_upper_tail(double f, double d1, double d2);

/// Sample quantile, linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double prob);

double mean(std::span<const double> values);
/// Standard error of the mean; 0 for fewer than two values.
double standard_error(std::span<const double> values);

/// Incumbent trace of one run, indexed by evaluation (1-based in `iteration`).
struct RunTrace {
  std::string method;
  int replication = 0;
  std::vector<double> incumbent;
};

struct CurveRow {
  std::string method;
  int iteration = 0;
  double mean = 0.0;
  double se = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  int replications = 0;
};

/// Per (method, iteration) summary over replications. Methods appear in order
/// of first occurrence. Traces of unequal length contribute while they last.
std::vector<CurveRow> summarize_runs(std::span<const RunTrace> traces);

}  // namespace nasbo
