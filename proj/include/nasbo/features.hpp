#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nasbo {

/// Column layout of an encoded design. A column with 0 levels is numeric;
/// otherwise it is categorical and holds integer level codes in [0, levels).
struct FeatureSchema {
  std::vector<int> levels;

  std::size_t width() const { return levels.size(); }
  bool all_numeric() const {
    for (const int l : levels) {
      if (l != 0) return false;
    }
    return true;
  }
  bool is_categorical(std::size_t column) const { return levels[column] > 0; }
  bool operator==(const FeatureSchema&) const = default;
};

/// Dense row-major matrix of encoded rows.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t width) : width_(width), data_(rows * width, 0.0) {}

  std::size_t rows() const { return width_ == 0 ? 0 : data_.size() / width_; }
  std::size_t width() const { return width_; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * width_, width_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }

  void append(std::span<const double> values) {
    if (width_ == 0 && data_.empty()) width_ = values.size();
    if (values.size() != width_) throw std::invalid_argument("feature matrix: row width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
  }

  void resize_rows(std::size_t rows) { data_.resize(rows * width_); }

 private:
  std::size_t width_ = 0;
  std::vector<double> data_;
};

}  // namespace nasbo
