#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nasbo/surrogates.hpp"

namespace nasbo {

void TrainingSet::add(std::span<const double> row, double target) {
  if (row.size() != schema.width()) throw std::invalid_argument("training set: row width mismatch");
  x.append(row);
  y.push_back(target);
}

void SurrogateModel::predict(const FeatureMatrix& x, std::span<PosteriorPrediction> out) const {
  if (out.size() != x.rows()) throw std::invalid_argument("predict: output size mismatch");
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
}

std::string to_string(SurrogateKind kind) {
  return kind == SurrogateKind::nn_ensemble ? "nn" : "rf";
}

SurrogateKind parse_surrogate_kind(std::string_view text) {
  if (text == "nn" || text == "nn_ensemble") return SurrogateKind::nn_ensemble;
  if (text == "rf") return SurrogateKind::rf;
  throw std::invalid_argument("unknown surrogate '" + std::string(text) + "'");
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

void EnsembleConfig::validate() const {
  if (members < 2) throw std::invalid_argument("ensemble: need at least two members");
  if (layers < 1 || width < 1 || epochs < 1) {
    throw std::invalid_argument("ensemble: layers, width and epochs must be positive");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("ensemble: learning rate must be positive");
}

PosteriorPrediction combine_member_outputs(std::span<const double> outputs) {
  if (outputs.empty()) throw std::invalid_argument("combine_member_outputs: no members");
  const double mean = std::accumulate(outputs.begin(), outputs.end(), 0.0) / static_cast<double>(outputs.size());
  return {mean, sample_sd(outputs)};
}

FeedForwardNet::FeedForwardNet(int inputs, int layers, int width, Rng& rng) {
  // Symmetric uniform initialisation scaled by fan-in (He-uniform), zero biases.
  auto make = [&](int fan_in, int fan_out) {
    Layer layer{Eigen::MatrixXf(fan_out, fan_in), Eigen::VectorXf::Zero(fan_out)};
    const double limit = std::sqrt(6.0 / std::max(fan_in, 1));
    for (int c = 0; c < fan_in; ++c) {
      for (int r = 0; r < fan_out; ++r) {
        layer.w(r, c) = static_cast<float>((2.0 * rng.uniform01() - 1.0) * limit);
      }
    }
    return layer;
  };
  int fan_in = inputs;
  for (int l = 0; l < layers; ++l) {
    layers_.push_back(make(fan_in, width));
    fan_in = width;
  }
  layers_.push_back(make(fan_in, 1));
}

Eigen::RowVectorXf FeedForwardNet::forward(const Eigen::MatrixXf& x) const {
  Eigen::MatrixXf a = x;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    a = ((layers_[l].w * a).colwise() + layers_[l].b).cwiseMax(0.0f);
  }
  const Layer& out = layers_.back();
  return ((out.w * a).colwise() + out.b).row(0);
}

float FeedForwardNet::mean_absolute_error(const Eigen::MatrixXf& x, const Eigen::RowVectorXf& y) const {
  return (forward(x) - y).cwiseAbs().mean();
}

void FeedForwardNet::train(const Eigen::MatrixXf& x, const Eigen::RowVectorXf& y, int epochs,
                           float learning_rate) {
  constexpr float beta1 = 0.9f;
  constexpr float beta2 = 0.999f;
  constexpr float epsilon = 1e-8f;
  const std::size_t depth = layers_.size();
  const auto n = static_cast<float>(x.cols());

  std::vector<Eigen::MatrixXf> m_w(depth), v_w(depth);
  std::vector<Eigen::VectorXf> m_b(depth), v_b(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    m_w[l] = v_w[l] = Eigen::MatrixXf::Zero(layers_[l].w.rows(), layers_[l].w.cols());
    m_b[l] = v_b[l] = Eigen::VectorXf::Zero(layers_[l].b.size());
  }

  std::vector<Eigen::MatrixXf> act(depth);  // act[l] = input of layer l
  Eigen::MatrixXf grad;
  Eigen::MatrixXf grad_w;
  Eigen::VectorXf grad_b;
  float bias1 = 1.0f;
  float bias2 = 1.0f;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    act[0] = x;
    for (std::size_t l = 0; l + 1 < depth; ++l) {
      act[l + 1] = ((layers_[l].w * act[l]).colwise() + layers_[l].b).cwiseMax(0.0f);
    }
    const Eigen::RowVectorXf out = ((layers_.back().w * act[depth - 1]).colwise() + layers_.back().b).row(0);
    // d MAE / d output = sign(residual) / n
    grad = (out - y).unaryExpr([n](float r) { return r > 0.0f ? 1.0f / n : (r < 0.0f ? -1.0f / n : 0.0f); });

    bias1 *= beta1;
    bias2 *= beta2;
    const float step = learning_rate * std::sqrt(1.0f - bias2) / (1.0f - bias1);
    for (std::size_t l = depth; l-- > 0;) {
      grad_w.noalias() = grad * act[l].transpose();
      grad_b = grad.rowwise().sum();
      if (l > 0) {
        Eigen::MatrixXf back = layers_[l].w.transpose() * grad;
        // ReLU derivative: act[l] > 0 where the pre-activation was positive.
        grad = back.cwiseProduct((act[l].array() > 0.0f).cast<float>().matrix());
      }
      m_w[l] = beta1 * m_w[l] + (1.0f - beta1) * grad_w;
      v_w[l] = beta2 * v_w[l] + (1.0f - beta2) * grad_w.cwiseAbs2();
      m_b[l] = beta1 * m_b[l] + (1.0f - beta1) * grad_b;
      v_b[l] = beta2 * v_b[l] + (1.0f - beta2) * grad_b.cwiseAbs2();
      layers_[l].w.array() -= step * m_w[l].array() / (v_w[l].array().sqrt() + epsilon);
      layers_[l].b.array() -= step * m_b[l].array() / (v_b[l].array().sqrt() + epsilon);
    }
  }
}

Eigen::MatrixXf EnsembleModel::to_columns(const FeatureMatrix& x) const {
  if (x.width() != schema_.width()) throw std::invalid_argument("ensemble: feature width mismatch");
  Eigen::MatrixXf cols(static_cast<Eigen::Index>(x.width()), static_cast<Eigen::Index>(x.rows()));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.width(); ++c) {
      cols(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = static_cast<float>(x(r, c));
    }
  }
  return cols;
}

std::vector<double> EnsembleModel::member_outputs(std::span<const double> row) const {
  FeatureMatrix single(1, row.size());
  std::copy(row.begin(), row.end(), single.row(0).begin());
  const Eigen::MatrixXf cols = to_columns(single);
  std::vector<double> outputs;
  outputs.reserve(nets_.size());
  for (const auto& net : nets_) {
    outputs.push_back(target_center_ + target_scale_ * static_cast<double>(net.forward(cols)(0)));
  }
  return outputs;
}

PosteriorPrediction EnsembleModel::predict(std::span<const double> row) const {
  return combine_member_outputs(member_outputs(row));
}

void EnsembleModel::predict(const FeatureMatrix& x, std::span<PosteriorPrediction> out) const {
  if (out.size() != x.rows()) throw std::invalid_argument("predict: output size mismatch");
  const Eigen::MatrixXf cols = to_columns(x);
  std::vector<Eigen::RowVectorXf> outputs;
  outputs.reserve(nets_.size());
  for (const auto& net : nets_) outputs.push_back(net.forward(cols));
  std::vector<double> members(nets_.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t m = 0; m < nets_.size(); ++m) {
      members[m] = target_center_ + target_scale_ * static_cast<double>(outputs[m](static_cast<Eigen::Index>(r)));
    }
    out[r] = combine_member_outputs(members);
  }
}

EnsembleModel fit_ensemble(const TrainingSet& data, const EnsembleConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!data.schema.all_numeric()) throw std::invalid_argument("path encoding required");
  if (data.size() < 1) throw std::invalid_argument("ensemble: empty training set");

  EnsembleModel model;
  model.schema_ = data.schema;
  const double mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(data.size());
  const double sd = sample_sd(data.y);
  model.target_center_ = mean;
  model.target_scale_ = sd > 1e-12 ? sd : 1.0;

  const auto inputs = static_cast<int>(data.schema.width());
  const auto n = static_cast<Eigen::Index>(data.size());
  for (int m = 0; m < cfg.members; ++m) {
    Rng member_rng(derive_seed(rng.next_u64(), static_cast<std::uint64_t>(m)));
    FeedForwardNet net(inputs, cfg.layers, cfg.width, member_rng);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, member_rng);
    Eigen::MatrixXf x(inputs, n);
    Eigen::RowVectorXf y(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t src = order[static_cast<std::size_t>(j)];
      for (int c = 0; c < inputs; ++c) x(c, j) = static_cast<float>(data.x(src, static_cast<std::size_t>(c)));
      y(j) = static_cast<float>((data.y[src] - model.target_center_) / model.target_scale_);
    }
    net.train(x, y, cfg.epochs, static_cast<float>(cfg.learning_rate));
    model.nets_.push_back(std::move(net));
  }
  return model;
}

}  // namespace nasbo
