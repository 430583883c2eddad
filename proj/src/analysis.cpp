#include "nasbo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>

namespace nasbo {

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

/// Sorted distinct levels per factor.
std::vector<std::vector<std::string>> factor_levels(const FactorialData& data) {
  std::vector<std::vector<std::string>> levels(data.factor_names.size());
  for (const auto& row : data.rows) {
    for (std::size_t f = 0; f < levels.size(); ++f) levels[f].push_back(row.levels[f]);
  }
  for (auto& l : levels) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return levels;
}

/// Intercept plus treatment-coded dummies (first sorted level is the baseline).
Eigen::MatrixXd design_matrix(const FactorialData& data, const std::vector<std::vector<std::string>>& levels,
                              std::span<const std::size_t> factors) {
  Eigen::Index cols = 1;
  for (std::size_t f : factors) cols += static_cast<Eigen::Index>(levels[f].size()) - 1;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.rows.size()), cols);
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    x(i, 0) = 1.0;
    Eigen::Index offset = 1;
    for (std::size_t f : factors) {
      const auto& lv = levels[f];
      const auto pos = std::lower_bound(lv.begin(), lv.end(), data.rows[r].levels[f]) - lv.begin();
      if (pos > 0) x(i, offset + pos - 1) = 1.0;
      offset += static_cast<Eigen::Index>(lv.size()) - 1;
    }
  }
  return x;
}

bool full_rank(const Eigen::MatrixXd& x) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  return qr.rank() == x.cols();
}

Eigen::VectorXd response(const FactorialData& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.rows.size()));
  for (std::size_t r = 0; r < data.rows.size(); ++r) y(static_cast<Eigen::Index>(r)) = data.rows[r].response;
  return y;
}

double rss_of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd beta = x.householderQr().solve(y);
  return (y - x * beta).squaredNorm();
}

[[noreturn]] void throw_rank_deficient(const FactorialData& data,
                                       const std::vector<std::vector<std::string>>& levels,
                                       std::span<const std::size_t> factors) {
  for (std::size_t a = 0; a < factors.size(); ++a) {
    for (std::size_t b = a + 1; b < factors.size(); ++b) {
      const std::size_t pair[] = {factors[a], factors[b]};
      if (!full_rank(design_matrix(data, levels, pair))) {
        throw std::invalid_argument("rank-deficient design: factors '" + data.factor_names[factors[a]] +
                                    "' and '" + data.factor_names[factors[b]] + "' are confounded");
      }
    }
  }
  throw std::invalid_argument("rank-deficient design: factors are jointly confounded");
}

}  // namespace

std::optional<double> kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau: lengths differ");
  if (x.size() < 2) throw std::invalid_argument("kendall_tau: need at least two values");
  double concordant_minus_discordant = 0.0;
  double pairs_untied_x = 0.0;
  double pairs_untied_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = sign(x[i] - x[j]);
      const int sy = sign(y[i] - y[j]);
      concordant_minus_discordant += sx * sy;
      pairs_untied_x += sx != 0;
      pairs_untied_y += sy != 0;
    }
  }
  if (pairs_untied_x == 0 || pairs_untied_y == 0) return std::nullopt;
  return concordant_minus_discordant / std::sqrt(pairs_untied_x * pairs_untied_y);
}

void FactorialData::add(std::vector<std::string> levels, double value) {
  if (levels.size() != factor_names.size()) throw std::invalid_argument("factorial row: wrong number of levels");
  rows.push_back({std::move(levels), value});
}

const AnovaRow& AnovaTable::term(const std::string& name) const {
  for (const auto& row : rows) {
    if (row.term == name) return row;
  }
  throw std::out_of_range("ANOVA table has no term " + name);
}

double additive_rss(const FactorialData& data, std::span<const std::size_t> factors) {
  const auto levels = factor_levels(data);
  const Eigen::MatrixXd x = design_matrix(data, levels, factors);
  if (!full_rank(x)) throw_rank_deficient(data, levels, factors);
  return rss_of(x, response(data));
}

AnovaTable anova_typeII(const FactorialData& data) {
  const std::size_t k = data.factor_names.size();
  if (k == 0) throw std::invalid_argument("ANOVA: no factors");
  const auto levels = factor_levels(data);
  for (std::size_t f = 0; f < k; ++f) {
    if (levels[f].size() < 2) {
      throw std::invalid_argument("ANOVA: factor '" + data.factor_names[f] + "' has fewer than two levels");
    }
  }
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), 0);
  const Eigen::MatrixXd x_full = design_matrix(data, levels, all);
  if (!full_rank(x_full)) throw_rank_deficient(data, levels, all);
  const Eigen::VectorXd y = response(data);
  const double rss_full = rss_of(x_full, y);
  const int df_resid = static_cast<int>(data.rows.size()) - static_cast<int>(x_full.cols());
  if (df_resid < 1) throw std::invalid_argument("ANOVA: no residual degrees of freedom");
  const double ms_resid = rss_full / df_resid;

  AnovaTable table;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> reduced;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) reduced.push_back(g);
    }
    const double ss = std::max(0.0, rss_of(design_matrix(data, levels, reduced), y) - rss_full);
    const int df = static_cast<int>(levels[f].size()) - 1;
    AnovaRow row{data.factor_names[f], ss, df, 0.0, 1.0};
    if (ms_resid > 0) {
      row.f_value = (ss / df) / ms_resid;
      row.p_value = f_upper_tail(row.f_value, df, df_resid);
    } else if (ss > 0) {
      row.f_value = kCappedF;
      row.p_value = 0.0;
    }
    table.rows.push_back(row);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  table.rows.push_back({"Residuals", rss_full, df_resid, nan, nan});
  return table;
}

double f_upper_tail(double f, double d1, double d2) {
  if (!(f > 0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<double>(d1, d2), f));
}

OnewayResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("one-way ANOVA: need at least two groups");
  std::size_t n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("one-way ANOVA: each group needs at least two values");
    n += g.size();
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= static_cast<double>(n);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ss_within += (v - m) * (v - m);
  }
  OnewayResult out;
  out.df_between = static_cast<int>(groups.size()) - 1;
  out.df_within = static_cast<int>(n - groups.size());
  // Round-off guard: group means equal to the last bits count as equal.
  if (ss_between <= 1e-24 * std::max(1.0, grand * grand) * static_cast<double>(n)) ss_between = 0.0;
  if (ss_within == 0.0) {
    out.f_value = ss_between > 0 ? kCappedF : 0.0;
    out.p_value = ss_between > 0 ? 0.0 : 1.0;
    return out;
  }
  out.f_value = (ss_between / out.df_between) / (ss_within / out.df_within);
  out.p_value = f_upper_tail(out.f_value, out.df_between, out.df_within);
  return out;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (prob < 0 || prob > 1) throw std::invalid_argument("quantile probability outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
}

std::vector<CurveRow> summarize_runs(std::span<const RunTrace> traces) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunTrace*>> by_method;
  for (const auto& t : traces) {
    auto [it, inserted] = by_method.try_emplace(t.method);
    if (inserted) order.push_back(t.method);
    it->second.push_back(&t);
  }
  std::vector<CurveRow> rows;
  for (const auto& method : order) {
    const auto& runs = by_method[method];
    std::size_t length = 0;
    for (const auto* r : runs) length = std::max(length, r->incumbent.size());
    for (std::size_t i = 0; i < length; ++i) {
      std::vector<double> values;
      for (const auto* r : runs) {
        if (i < r->incumbent.size()) values.push_back(r->incumbent[i]);
      }
      rows.push_back({method, static_cast<int>(i) + 1, mean(values), standard_error(values), quantile(values, 0.025),
                      quantile(values, 0.975), static_cast<int>(values.size())});
    }
  }
  return rows;
}

}  // namespace nasbo
