#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nasbo/rng.hpp"

namespace nasbo {

/// Parameters of a cell-based DAG search space.
///
/// Predecessor indices of intermediate node i run over [0, num_inputs + i):
/// indices below num_inputs are the cell inputs, index num_inputs + j is
/// intermediate node j. The cell output concatenates every intermediate node.
struct SearchSpaceSpec {
  int num_intermediate_nodes = 4;
  int num_inputs = 2;
  std::vector<std::string> operations = default_operations();
  int num_cells = 1;

  static std::vector<std::string> default_operations();

  /// Throws std::invalid_argument when the structural invariants fail.
  void validate() const;

  int num_predecessors(int node) const { return num_inputs + node; }
  int num_pairs(int node) const;
  int num_operations() const { return static_cast<int>(operations.size()); }
  int nodes_total() const { return num_cells * num_intermediate_nodes; }
  int operation_index(std::string_view label) const;  // -1 when unknown

  bool operator==(const SearchSpaceSpec&) const = default;
};

using SpecPtr = std::shared_ptr<const SearchSpaceSpec>;

/// Validates and freezes a spec.
SpecPtr make_spec(SearchSpaceSpec spec);

/// Choice for one intermediate node: two distinct predecessors (sorted) and
/// the operation applied on the edge from each of them.
struct NodeGene {
  std::array<int, 2> inputs{0, 1};
  std::array<int, 2> ops{0, 0};

  bool operator==(const NodeGene&) const = default;
};

/// Kind of a flattened architecture parameter.
enum class ParameterKind { input_pair, edge_op_low, edge_op_high };

/// Location of a parameter in the canonical ordering: cells in order, nodes in
/// order, and per node the input pair followed by the two edge operations
/// (lower predecessor first).
struct ParameterRef {
  int cell;
  int node;
  ParameterKind kind;
};

constexpr int kParametersPerNode = 3;

int parameter_count(const SearchSpaceSpec& spec);
ParameterRef parameter_ref(const SearchSpaceSpec& spec, int index);
int parameter_levels(const SearchSpaceSpec& spec, int index);
/// Indices of parameters with at least two levels.
std::vector<int> mutable_parameters(const SearchSpaceSpec& spec);
/// log10 of the number of distinct architectures.
double log10_space_size(const SearchSpaceSpec& spec);

/// Lexicographic index of the unordered pair {p, q} (p < q) among the
/// pairs drawn from k predecessors.
int pair_index(int p, int q, int num_predecessors);
std::array<int, 2> pair_from_index(int index, int num_predecessors);

class Architecture {
 public:
  /// genes are cell-major; throws std::invalid_argument on invalid genes.
  Architecture(SpecPtr spec, std::vector<NodeGene> genes);

  static Architecture from_parameters(SpecPtr spec, std::span<const int> values);

  const SearchSpaceSpec& spec() const { return *spec_; }
  const SpecPtr& spec_ptr() const { return spec_; }
  std::span<const NodeGene> genes() const { return genes_; }
  const NodeGene& gene(int cell, int node) const;

  std::vector<int> parameters() const;
  int parameter(int index) const;

  /// Canonical flat text form, e.g.
  /// `0/0:pair=(0,1);op[0]=sep_conv_3x3;op[1]=skip_connect|0/1:...`.
  std::string to_string() const;
  static Architecture parse(SpecPtr spec, std::string_view text);

  bool same_space(const Architecture& other) const;
  bool operator==(const Architecture& other) const;

 private:
  SpecPtr spec_;
  std::vector<NodeGene> genes_;
};

Architecture sample_uniform(const SpecPtr& spec, Rng& rng);

/// Applies n_edits forced changes to distinct mutable parameters.
/// Throws std::invalid_argument("insufficient parameters") when n_edits
/// exceeds the number of mutable parameters.
Architecture mutate(const Architecture& arch, Rng& rng, int n_edits = 1);

/// All architectures at edit distance 1, in canonical order (parameter index,
/// then alternative level ascending).
std::vector<Architecture> neighbors(const Architecture& arch);

/// Number of differing parameters. Edge operations are compared positionally
/// by slot, so an input-pair change counts once.
int edit_distance(const Architecture& a, const Architecture& b);

}  // namespace nasbo
