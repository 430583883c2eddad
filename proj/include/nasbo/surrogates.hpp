#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nasbo/features.hpp"
#include "nasbo/rng.hpp"

namespace nasbo {

/// Surrogate posterior for one candidate: mean and standard deviation, both in
/// accuracy units.
struct PosteriorPrediction {
  double mean = 0.0;
  double sd = 0.0;
};

/// Encoded rows with their observed accuracies.
struct TrainingSet {
  FeatureSchema schema;
  FeatureMatrix x;
  std::vector<double> y;

  explicit TrainingSet(FeatureSchema s = {}) : schema(std::move(s)), x(0, schema.width()) {}

  std::size_t size() const { return y.size(); }
  void add(std::span<const double> row, double target);
};

/// Common predict contract of the fitted surrogates.
class SurrogateModel {
 public:
  virtual ~SurrogateModel() = default;

  virtual const FeatureSchema& schema() const = 0;
  virtual PosteriorPrediction predict(std::span<const double> row) const = 0;
  /// Batch prediction; out.size() must equal x.rows().
  virtual void predict(const FeatureMatrix& x, std::span<PosteriorPrediction> out) const;
};

enum class SurrogateKind { nn_ensemble, rf };

std::string to_string(SurrogateKind kind);
SurrogateKind parse_surrogate_kind(std::string_view text);

// --- Feed-forward ensemble --------------------------------------------------

struct EnsembleConfig {
  int members = 5;
  int layers = 10;  // hidden layers
  int width = 20;
  double learning_rate = 0.01;
  int epochs = 200;  // full-batch Adam steps

  void validate() const;
};

/// Combines member outputs into the ensemble posterior: arithmetic mean and
/// sample standard deviation with an (M - 1) denominator.
PosteriorPrediction combine_member_outputs(std::span<const double> outputs);

/// Fully connected ReLU network with a scalar linear output.
class FeedForwardNet {
 public:
  FeedForwardNet(int inputs, int layers, int width, Rng& rng);

  /// Runs `epochs` full-batch Adam steps on the mean absolute error.
  /// x is (inputs x n), column per row.
  void train(const Eigen::MatrixXf& x, const Eigen::RowVectorXf& y, int epochs, float learning_rate);

  Eigen::RowVectorXf forward(const Eigen::MatrixXf& x) const;
  float mean_absolute_error(const Eigen::MatrixXf& x, const Eigen::RowVectorXf& y) const;

 private:
  struct Layer {
    Eigen::MatrixXf w;
    Eigen::VectorXf b;
  };
  std::vector<Layer> layers_;  // hidden layers then the output layer
};

class EnsembleModel final : public SurrogateModel {
 public:
  const FeatureSchema& schema() const override { return schema_; }
  PosteriorPrediction predict(std::span<const double> row) const override;
  void predict(const FeatureMatrix& x, std::span<PosteriorPrediction> out) const override;

  /// Per-member outputs in accuracy units.
  std::vector<double> member_outputs(std::span<const double> row) const;
  std::size_t members() const { return nets_.size(); }

 private:
  friend EnsembleModel fit_ensemble(const TrainingSet&, const EnsembleConfig&, Rng&);

  Eigen::MatrixXf to_columns(const FeatureMatrix& x) const;

  FeatureSchema schema_;
  std::vector<FeedForwardNet> nets_;
  double target_center_ = 0.0;
  double target_scale_ = 1.0;
};

/// Trains cfg.members networks with independent initialisation and
/// independently permuted copies of the data. Targets are standardised
/// internally; predictions are returned in accuracy units.
/// Throws std::invalid_argument("path encoding required") for categorical data.
EnsembleModel fit_ensemble(const TrainingSet& data, const EnsembleConfig& cfg, Rng& rng);

// --- Random forest ------------------------------------------------------------

enum class ForestUncertainty { per_tree_sd, jackknife };

struct ForestConfig {
  int num_trees = 500;
  ForestUncertainty uncertainty = ForestUncertainty::per_tree_sd;
  int min_node_size = 5;
  int mtry = 0;  // 0: ceil(sqrt(width))

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  int left = -1;
  int right = -1;
  double threshold = 0.0;   // numeric split: x <= threshold goes left
  int level_offset = -1;    // categorical split: goes_left[level_offset + code]
  double value = 0.0;       // leaf prediction
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint8_t> goes_left;
  std::vector<int> inbag;  // bootstrap multiplicity per training row

  double predict(std::span<const double> row) const;
};

class ForestModel final : public SurrogateModel {
 public:
  const FeatureSchema& schema() const override { return schema_; }
  PosteriorPrediction predict(std::span<const double> row) const override;
  void predict(const FeatureMatrix& x, std::span<PosteriorPrediction> out) const override;

  std::vector<double> tree_predictions(std::span<const double> row) const;
  std::span<const RegressionTree> trees() const { return trees_; }
  ForestUncertainty uncertainty() const { return uncertainty_; }

  /// Debug dump: one row per probe point and tree.
  void write_tree_predictions_csv(const FeatureMatrix& probe, std::ostream& out) const;

 private:
  friend ForestModel fit_forest(const TrainingSet&, const ForestConfig&, Rng&);

  PosteriorPrediction jackknife(std::span<const double> per_tree) const;
  void check_width(std::size_t width) const;

  FeatureSchema schema_;
  std::vector<RegressionTree> trees_;
  ForestUncertainty uncertainty_ = ForestUncertainty::per_tree_sd;
  std::size_t training_rows_ = 0;
};

/// Bootstrap regression forest. Categorical splits order the levels present in
/// a node by their mean target and cut that ordering; levels absent from the
/// node are placed at the node mean. Needs at least two rows.
ForestModel fit_forest(const TrainingSet& data, const ForestConfig& cfg, Rng& rng);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

}  // namespace nasbo
