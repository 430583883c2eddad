#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nasbo/features.hpp"
#include "nasbo/rng.hpp"
#include "nasbo/search_space.hpp"

namespace nasbo {

enum class EncodingKind { path, tabular };

std::string to_string(EncodingKind kind);
EncodingKind parse_encoding_kind(std::string_view text);

/// Identity of a path: its cell and the operation labels along it, from a
/// cell input to the last intermediate node it reaches.
struct PathKey {
  int cell = 0;
  std::vector<std::uint8_t> ops;

  auto operator<=>(const PathKey&) const = default;
};

struct PathEntry {
  PathKey key;
  double occurrence_prob = 0.0;
};

constexpr std::size_t kPathMonteCarloSamples = 10000;
constexpr double kMaxEnumeratedPaths = 1e7;
constexpr std::size_t kDefaultTruncation = 128;

/// All operation-sequence paths of a space ranked by how often they occur in
/// uniformly sampled architectures. The first truncation_length entries are the
/// encoded features.
class PathTable {
 public:
  const SearchSpaceSpec& spec() const { return *spec_; }
  const SpecPtr& spec_ptr() const { return spec_; }
  std::span<const PathEntry> paths() const { return paths_; }
  std::size_t total_paths() const { return paths_.size(); }
  std::size_t truncation_length() const { return truncation_; }
  std::size_t encoding_length() const { return std::min(truncation_, paths_.size()); }

  /// Feature index of a path, or -1 if the path was truncated away.
  int feature_index(const PathKey& key) const;

  /// Human-readable label sequence, `op>op>op` (prefixed `c<cell>:` for
  /// multi-cell spaces).
  std::string label_sequence(const PathKey& key) const;

  /// CSV dump: rank,label_sequence,occurrence_prob,retained.
  void write_csv(std::ostream& out) const;

 private:
  friend PathTable build_path_table(const SpecPtr&, std::size_t, Rng&);

  SpecPtr spec_;
  std::size_t truncation_ = 0;
  std::vector<PathEntry> paths_;
  std::unordered_map<std::string, int> retained_;
};

/// Enumerates every possible path of the space and estimates occurrence
/// probabilities from kPathMonteCarloSamples uniform architectures drawn from
/// a sub-stream of rng. Ties rank lexicographically by label sequence.
PathTable build_path_table(const SpecPtr& spec, std::size_t truncation_length, Rng& rng);

/// Distinct paths (by key) present in an architecture, sorted.
std::vector<PathKey> architecture_paths(const Architecture& arch);

/// Binary vector of length table.encoding_length().
std::vector<double> encode_path(const Architecture& arch, const PathTable& table);

inline constexpr const char* kMissingLevel = ".missing";

/// One categorical value per tabular hyperparameter. Operation columns use
/// the code num_operations for ".missing".
struct TabularRow {
  std::vector<int> values;
  bool operator==(const TabularRow&) const = default;
};

struct TabularColumn {
  std::string name;
  std::vector<std::string> levels;
  int cell = 0;
  int node = 0;
  int predecessor = -1;  // -1 for the input-pair column
};

/// Column layout: per cell, per node, the input-pair column followed by one
/// operation column per potential predecessor in index order.
std::vector<TabularColumn> tabular_columns(const SearchSpaceSpec& spec);
FeatureSchema tabular_schema(const SearchSpaceSpec& spec);

TabularRow encode_tabular(const Architecture& arch, const SearchSpaceSpec& spec);
Architecture decode_tabular(const TabularRow& row, const SpecPtr& spec);

/// Architecture -> numeric row adapter used by surrogates and optimizers.
class Encoder {
 public:
  static Encoder path(std::shared_ptr<const PathTable> table);
  static Encoder tabular(SpecPtr spec);

  EncodingKind kind() const { return kind_; }
  const FeatureSchema& schema() const { return schema_; }
  std::size_t width() const { return schema_.width(); }

  void encode(const Architecture& arch, std::span<double> out) const;
  std::vector<double> encode(const Architecture& arch) const;
  FeatureMatrix encode_all(std::span<const Architecture> archs) const;

 private:
  Encoder(EncodingKind kind, SpecPtr spec, std::shared_ptr<const PathTable> table);

  EncodingKind kind_;
  SpecPtr spec_;
  std::shared_ptr<const PathTable> table_;
  FeatureSchema schema_;
};

}  // namespace nasbo
