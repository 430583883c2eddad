#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "nasbo/surrogates.hpp"

namespace nasbo {

void ForestConfig::validate() const {
  if (num_trees < 2) throw std::invalid_argument("forest: need at least two trees");
  if (min_node_size < 1) throw std::invalid_argument("forest: min node size must be positive");
  if (mtry < 0) throw std::invalid_argument("forest: mtry must be non-negative");
}

double RegressionTree::predict(std::span<const double> row) const {
  int at = 0;
  while (true) {
    const TreeNode& node = nodes[static_cast<std::size_t>(at)];
    if (node.feature < 0) return node.value;
    const double v = row[static_cast<std::size_t>(node.feature)];
    const bool left = node.level_offset >= 0
                          ? goes_left[static_cast<std::size_t>(node.level_offset) + static_cast<std::size_t>(v)] != 0
                          : v <= node.threshold;
    at = left ? node.left : node.right;
  }
}

namespace {

struct Split {
  int feature = -1;
  double score = 0.0;  // sum_l^2 / n_l + sum_r^2 / n_r
  double threshold = 0.0;
  std::vector<std::uint8_t> goes_left;  // categorical only
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainingSet& data, const ForestConfig& cfg, std::size_t mtry, Rng& rng)
      : data_(data), cfg_(cfg), mtry_(mtry), rng_(rng) {
    features_.resize(data.schema.width());
    std::iota(features_.begin(), features_.end(), 0);
    // Split scores are computed on centred targets.
    center_ = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(data.size());
    y_.reserve(data.size());
    for (const double v : data.y) y_.push_back(v - center_);
  }

  RegressionTree build() {
    const std::size_t n = data_.size();
    tree_.inbag.assign(n, 0);
    std::vector<int> sample(n);
    for (auto& s : sample) {
      s = static_cast<int>(rng_.uniform_index(n));
      ++tree_.inbag[static_cast<std::size_t>(s)];
    }
    tree_.nodes.emplace_back();
    grow(0, std::move(sample));
    return std::move(tree_);
  }

 private:
  void grow(int node_id, std::vector<int> sample) {
    double sum = 0.0;
    for (const int i : sample) sum += y_[static_cast<std::size_t>(i)];
    const auto n = static_cast<double>(sample.size());
    tree_.nodes[static_cast<std::size_t>(node_id)].value = center_ + sum / n;

    const double first = y_[static_cast<std::size_t>(sample.front())];
    const bool pure = std::all_of(sample.begin(), sample.end(),
                                  [&](int i) { return y_[static_cast<std::size_t>(i)] == first; });
    if (sample.size() <= static_cast<std::size_t>(cfg_.min_node_size) || pure) return;

    // Draw mtry distinct candidate features.
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t pick = k + rng_.uniform_index(features_.size() - k);
      std::swap(features_[k], features_[pick]);
    }
    Split best;
    best.score = sum * sum / n + 1e-12 * std::max(1.0, std::abs(sum * sum / n));
    for (std::size_t k = 0; k < mtry_; ++k) {
      const int f = features_[k];
      if (data_.schema.is_categorical(static_cast<std::size_t>(f))) {
        categorical_split(f, sample, sum, best);
      } else {
        numeric_split(f, sample, best);
      }
    }
    if (best.feature < 0) return;

    std::vector<int> left;
    std::vector<int> right;
    for (const int i : sample) {
      const double v = data_.x(static_cast<std::size_t>(i), static_cast<std::size_t>(best.feature));
      const bool go_left = best.goes_left.empty() ? v <= best.threshold
                                                  : best.goes_left[static_cast<std::size_t>(v)] != 0;
      (go_left ? left : right).push_back(i);
    }
    sample.clear();
    sample.shrink_to_fit();

    TreeNode split_node;
    split_node.feature = best.feature;
    split_node.threshold = best.threshold;
    if (!best.goes_left.empty()) {
      split_node.level_offset = static_cast<int>(tree_.goes_left.size());
      tree_.goes_left.insert(tree_.goes_left.end(), best.goes_left.begin(), best.goes_left.end());
    }
    split_node.left = static_cast<int>(tree_.nodes.size());
    split_node.right = split_node.left + 1;
    split_node.value = tree_.nodes[static_cast<std::size_t>(node_id)].value;
    tree_.nodes[static_cast<std::size_t>(node_id)] = split_node;
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    grow(split_node.left, std::move(left));
    grow(split_node.right, std::move(right));
  }

  void numeric_split(int f, const std::vector<int>& sample, Split& best) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(sample.size());
    for (const int i : sample) {
      pts.emplace_back(data_.x(static_cast<std::size_t>(i), static_cast<std::size_t>(f)),
                       y_[static_cast<std::size_t>(i)]);
    }
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& p : pts) total += p.second;
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      left_sum += pts[k].second;
      if (!(pts[k].first < pts[k + 1].first)) continue;
      const auto nl = static_cast<double>(k + 1);
      const auto nr = static_cast<double>(pts.size() - k - 1);
      const double right_sum = total - left_sum;
      const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
      if (score > best.score) {
        best.feature = f;
        best.score = score;
        best.threshold = 0.5 * (pts[k].first + pts[k + 1].first);
        best.goes_left.clear();
      }
    }
  }

  void categorical_split(int f, const std::vector<int>& sample, double node_sum, Split& best) {
    const auto levels = static_cast<std::size_t>(data_.schema.levels[static_cast<std::size_t>(f)]);
    std::vector<double> sums(levels, 0.0);
    std::vector<int> counts(levels, 0);
    for (const int i : sample) {
      const auto code = static_cast<std::size_t>(data_.x(static_cast<std::size_t>(i), static_cast<std::size_t>(f)));
      sums[code] += y_[static_cast<std::size_t>(i)];
      ++counts[code];
    }
    std::vector<std::size_t> present;
    for (std::size_t l = 0; l < levels; ++l) {
      if (counts[l] > 0) present.push_back(l);
    }
    if (present.size() < 2) return;
    auto mean = [&](std::size_t l) { return sums[l] / counts[l]; };
    std::stable_sort(present.begin(), present.end(),
                     [&](std::size_t a, std::size_t b) { return mean(a) < mean(b); });

    double left_sum = 0.0;
    int left_n = 0;
    const auto n = static_cast<int>(sample.size());
    for (std::size_t k = 0; k + 1 < present.size(); ++k) {
      left_sum += sums[present[k]];
      left_n += counts[present[k]];
      if (!(mean(present[k]) < mean(present[k + 1]))) continue;
      const double right_sum = node_sum - left_sum;
      const double score = left_sum * left_sum / left_n + right_sum * right_sum / (n - left_n);
      if (score > best.score) {
        const double cut = 0.5 * (mean(present[k]) + mean(present[k + 1]));
        const double node_mean = node_sum / n;
        best.feature = f;
        best.score = score;
        best.threshold = cut;
        best.goes_left.assign(levels, 0);
        for (std::size_t l = 0; l < levels; ++l) {
          best.goes_left[l] = (counts[l] > 0 ? mean(l) : node_mean) <= cut ? 1 : 0;
        }
      }
    }
  }

  const TrainingSet& data_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<int> features_;
  std::vector<double> y_;
  double center_ = 0.0;
  RegressionTree tree_;
};

}  // namespace

ForestModel fit_forest(const TrainingSet& data, const ForestConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.size() < 2) throw std::invalid_argument("forest: need at least two training rows");
  const std::size_t width = data.schema.width();
  if (width == 0) throw std::invalid_argument("forest: empty feature schema");
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const int levels = data.schema.levels[c];
      const double v = data.x(r, c);
      if (levels > 0 && !(v >= 0 && v < levels && v == std::floor(v))) {
        throw std::invalid_argument("forest: categorical code out of range");
      }
    }
  }
  const std::size_t mtry =
      cfg.mtry > 0 ? std::min<std::size_t>(static_cast<std::size_t>(cfg.mtry), width)
                   : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width))));

  ForestModel model;
  model.schema_ = data.schema;
  model.uncertainty_ = cfg.uncertainty;
  model.training_rows_ = data.size();
  const std::uint64_t base = rng.next_u64();
  model.trees_.reserve(static_cast<std::size_t>(cfg.num_trees));
  for (int t = 0; t < cfg.num_trees; ++t) {
    Rng tree_rng(derive_seed(base, static_cast<std::uint64_t>(t)));
    model.trees_.push_back(TreeBuilder(data, cfg, mtry, tree_rng).build());
  }
  return model;
}

void ForestModel::check_width(std::size_t width) const {
  if (width != schema_.width()) throw std::invalid_argument("forest: feature schema mismatch");
}

std::vector<double> ForestModel::tree_predictions(std::span<const double> row) const {
  check_width(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    const int levels = schema_.levels[c];
    if (levels > 0 && !(row[c] >= 0 && row[c] < levels)) {
      throw std::invalid_argument("forest: categorical code out of range");
    }
  }
  std::vector<double> out;
  out.reserve(trees_.size());
  for (const auto& tree : trees_) out.push_back(tree.predict(row));
  return out;
}

PosteriorPrediction ForestModel::jackknife(std::span<const double> per_tree) const {
  // Jackknife-after-bootstrap with the usual Monte Carlo bias correction.
  const auto b = static_cast<double>(per_tree.size());
  const double mean = std::accumulate(per_tree.begin(), per_tree.end(), 0.0) / b;
  double spread = 0.0;
  for (const double t : per_tree) spread += (t - mean) * (t - mean);
  const auto n = static_cast<double>(training_rows_);
  double acc = 0.0;
  for (std::size_t i = 0; i < training_rows_; ++i) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t t = 0; t < trees_.size(); ++t) {
      if (trees_[t].inbag[i] == 0) {
        sum += per_tree[t];
        ++count;
      }
    }
    if (count == 0) continue;
    const double diff = sum / count - mean;
    acc += diff * diff;
  }
  const double variance = (n - 1.0) / n * acc - (std::exp(1.0) - 1.0) * n / (b * b) * spread;
  return {mean, std::sqrt(std::max(variance, 0.0))};
}

PosteriorPrediction ForestModel::predict(std::span<const double> row) const {
  FeatureMatrix single(1, row.size());
  std::copy(row.begin(), row.end(), single.row(0).begin());
  PosteriorPrediction out;
  predict(single, std::span<PosteriorPrediction>(&out, 1));
  return out;
}

void ForestModel::predict(const FeatureMatrix& x, std::span<PosteriorPrediction> out) const {
  check_width(x.width());
  if (out.size() != x.rows()) throw std::invalid_argument("predict: output size mismatch");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.width(); ++c) {
      const int levels = schema_.levels[c];
      if (levels > 0 && !(x(r, c) >= 0 && x(r, c) < levels)) {
        throw std::invalid_argument("forest: categorical code out of range");
      }
    }
  }
  if (uncertainty_ == ForestUncertainty::jackknife) {
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = jackknife(tree_predictions(x.row(r)));
    return;
  }
  // Tree-major Welford accumulation; identical tree outputs give sd == 0 exactly.
  std::vector<double> mean(x.rows(), 0.0);
  std::vector<double> m2(x.rows(), 0.0);
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const double inv = 1.0 / static_cast<double>(t + 1);
    const RegressionTree& tree = trees_[t];
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double v = tree.predict(x.row(r));
      const double delta = v - mean[r];
      mean[r] += delta * inv;
      m2[r] += delta * (v - mean[r]);
    }
  }
  const auto b = static_cast<double>(trees_.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out[r] = {mean[r], std::sqrt(std::max(m2[r] / (b - 1.0), 0.0))};
  }
}

void ForestModel::write_tree_predictions_csv(const FeatureMatrix& probe, std::ostream& out) const {
  out << "probe,tree,prediction\n";
  for (std::size_t r = 0; r < probe.rows(); ++r) {
    const auto preds = tree_predictions(probe.row(r));
    for (std::size_t t = 0; t < preds.size(); ++t) out << r << ',' << t << ',' << preds[t] << '\n';
  }
}

}  // namespace nasbo
