#include "nasbo/search_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

namespace nasbo {

std::vector<std::string> SearchSpaceSpec::default_operations() {
  return {"max_pool_3x3", "avg_pool_3x3", "skip_connect", "sep_conv_3x3",
          "sep_conv_5x5", "dil_conv_3x3", "dil_conv_5x5", "none"};
}

void SearchSpaceSpec::validate() const {
  if (num_intermediate_nodes < 1) {
    throw std::invalid_argument("search space: need at least one intermediate node");
  }
  // Node 0 must pick two distinct predecessors among the cell inputs.
  if (num_inputs < 2) {
    throw std::invalid_argument("search space: need at least two cell inputs");
  }
  if (num_cells < 1) throw std::invalid_argument("search space: need at least one cell");
  const std::set<std::string> distinct(operations.begin(), operations.end());
  if (operations.size() < 2 || distinct.size() != operations.size()) {
    throw std::invalid_argument("search space: need at least two distinct operation labels");
  }
  if (operations.size() > 255) {
    throw std::invalid_argument("search space: at most 255 operations supported");
  }
  for (const auto& op : operations) {
    if (op.empty() || op.find_first_of("|;=()[],:/\n\r\"") != std::string::npos) {
      throw std::invalid_argument("search space: operation label '" + op +
                                  "' contains reserved characters");
    }
  }
}

int SearchSpaceSpec::num_pairs(int node) const {
  const int k = num_predecessors(node);
  return k * (k - 1) / 2;
}

int SearchSpaceSpec::operation_index(std::string_view label) const {
  for (std::size_t i = 0; i < operations.size(); ++i) {
    if (operations[i] == label) return static_cast<int>(i);
  }
  return -1;
}

SpecPtr make_spec(SearchSpaceSpec spec) {
  spec.validate();
  return std::make_shared<const SearchSpaceSpec>(std::move(spec));
}

int pair_index(int p, int q, int k) {
  if (p > q) std::swap(p, q);
  if (p < 0 || q >= k || p == q) throw std::invalid_argument("pair_index: invalid pair");
  // Pairs starting with 0 .. p-1 come first.
  return p * (2 * k - p - 1) / 2 + (q - p - 1);
}

std::array<int, 2> pair_from_index(int index, int k) {
  int p = 0;
  int remaining = index;
  while (p < k - 1) {
    const int row = k - p - 1;
    if (remaining < row) return {p, p + 1 + remaining};
    remaining -= row;
    ++p;
  }
  throw std::out_of_range("pair_from_index: index out of range");
}

int parameter_count(const SearchSpaceSpec& spec) {
  return spec.nodes_total() * kParametersPerNode;
}

ParameterRef parameter_ref(const SearchSpaceSpec& spec, int index) {
  if (index < 0 || index >= parameter_count(spec)) {
    throw std::out_of_range("parameter index out of range");
  }
  const int flat_node = index / kParametersPerNode;
  return {flat_node / spec.num_intermediate_nodes, flat_node % spec.num_intermediate_nodes,
          static_cast<ParameterKind>(index % kParametersPerNode)};
}

int parameter_levels(const SearchSpaceSpec& spec, int index) {
  const ParameterRef ref = parameter_ref(spec, index);
  if (ref.kind == ParameterKind::input_pair) return spec.num_pairs(ref.node);
  return spec.num_operations();
}

std::vector<int> mutable_parameters(const SearchSpaceSpec& spec) {
  std::vector<int> out;
  for (int i = 0; i < parameter_count(spec); ++i) {
    if (parameter_levels(spec, i) >= 2) out.push_back(i);
  }
  return out;
}

double log10_space_size(const SearchSpaceSpec& spec) {
  double total = 0.0;
  for (int i = 0; i < parameter_count(spec); ++i) {
    total += std::log10(static_cast<double>(parameter_levels(spec, i)));
  }
  return total;
}

Architecture::Architecture(SpecPtr spec, std::vector<NodeGene> genes)
    : spec_(std::move(spec)), genes_(std::move(genes)) {
  if (!spec_) throw std::invalid_argument("architecture: null search space");
  if (static_cast<int>(genes_.size()) != spec_->nodes_total()) {
    throw std::invalid_argument("architecture: wrong number of node genes");
  }
  for (std::size_t g = 0; g < genes_.size(); ++g) {
    const NodeGene& gene = genes_[g];
    const int node = static_cast<int>(g) % spec_->num_intermediate_nodes;
    const int k = spec_->num_predecessors(node);
    if (!(0 <= gene.inputs[0] && gene.inputs[0] < gene.inputs[1] && gene.inputs[1] < k)) {
      throw std::invalid_argument("architecture: invalid input pair");
    }
    for (const int op : gene.ops) {
      if (op < 0 || op >= spec_->num_operations()) {
        throw std::invalid_argument("architecture: operation index out of range");
      }
    }
  }
}

Architecture Architecture::from_parameters(SpecPtr spec, std::span<const int> values) {
  if (!spec) throw std::invalid_argument("architecture: null search space");
  if (static_cast<int>(values.size()) != parameter_count(*spec)) {
    throw std::invalid_argument("architecture: wrong number of parameters");
  }
  std::vector<NodeGene> genes(static_cast<std::size_t>(spec->nodes_total()));
  for (std::size_t g = 0; g < genes.size(); ++g) {
    const int node = static_cast<int>(g) % spec->num_intermediate_nodes;
    const int pair = values[g * kParametersPerNode];
    if (pair < 0 || pair >= spec->num_pairs(node)) {
      throw std::invalid_argument("architecture: input pair level out of range");
    }
    genes[g].inputs = pair_from_index(pair, spec->num_predecessors(node));
    genes[g].ops = {values[g * kParametersPerNode + 1], values[g * kParametersPerNode + 2]};
  }
  return Architecture(std::move(spec), std::move(genes));
}

const NodeGene& Architecture::gene(int cell, int node) const {
  return genes_.at(static_cast<std::size_t>(cell * spec_->num_intermediate_nodes + node));
}

int Architecture::parameter(int index) const {
  const int flat = index / kParametersPerNode;
  const NodeGene& gene = genes_.at(static_cast<std::size_t>(flat));
  switch (index % kParametersPerNode) {
    case 0:
      return pair_index(gene.inputs[0], gene.inputs[1],
                        spec_->num_predecessors(flat % spec_->num_intermediate_nodes));
    case 1:
      return gene.ops[0];
    default:
      return gene.ops[1];
  }
}

std::vector<int> Architecture::parameters() const {
  std::vector<int> values(static_cast<std::size_t>(parameter_count(*spec_)));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = parameter(static_cast<int>(i));
  return values;
}

std::string Architecture::to_string() const {
  std::string out;
  for (std::size_t g = 0; g < genes_.size(); ++g) {
    const int cell = static_cast<int>(g) / spec_->num_intermediate_nodes;
    const int node = static_cast<int>(g) % spec_->num_intermediate_nodes;
    const NodeGene& gene = genes_[g];
    if (g > 0) out += '|';
    out += std::to_string(cell) + '/' + std::to_string(node) + ":pair=(" +
           std::to_string(gene.inputs[0]) + ',' + std::to_string(gene.inputs[1]) + ')';
    for (int s = 0; s < 2; ++s) {
      out += ";op[" + std::to_string(gene.inputs[s]) + "]=" +
             spec_->operations[static_cast<std::size_t>(gene.ops[s])];
    }
  }
  return out;
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void expect(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
    pos_ += token.size();
  }

  int integer() {
    int value = 0;
    const auto* begin = text_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == begin) fail("expected integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::string_view label() {
    const std::size_t end = text_.find_first_of(";|", pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    std::string_view out = text_.substr(pos_, stop - pos_);
    pos_ = stop;
    return out;
  }

  bool done() const { return pos_ == text_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("architecture parse error at offset " + std::to_string(pos_) +
                                ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Architecture Architecture::parse(SpecPtr spec, std::string_view text) {
  if (!spec) throw std::invalid_argument("architecture: null search space");
  Cursor cur(text);
  std::vector<NodeGene> genes(static_cast<std::size_t>(spec->nodes_total()));
  for (std::size_t g = 0; g < genes.size(); ++g) {
    if (g > 0) cur.expect("|");
    const int cell = cur.integer();
    cur.expect("/");
    const int node = cur.integer();
    if (cell * spec->num_intermediate_nodes + node != static_cast<int>(g) ||
        node >= spec->num_intermediate_nodes) {
      cur.fail("node entries out of canonical order");
    }
    cur.expect(":pair=(");
    NodeGene& gene = genes[g];
    gene.inputs[0] = cur.integer();
    cur.expect(",");
    gene.inputs[1] = cur.integer();
    cur.expect(")");
    for (int s = 0; s < 2; ++s) {
      cur.expect(";op[");
      if (cur.integer() != gene.inputs[s]) cur.fail("edge operation does not match input pair");
      cur.expect("]=");
      const std::string_view label = cur.label();
      gene.ops[s] = spec->operation_index(label);
      if (gene.ops[s] < 0) cur.fail("unknown operation '" + std::string(label) + "'");
    }
  }
  if (!cur.done()) cur.fail("trailing characters");
  return Architecture(std::move(spec), std::move(genes));
}

bool Architecture::same_space(const Architecture& other) const {
  return spec_ == other.spec_ || *spec_ == *other.spec_;
}

bool Architecture::operator==(const Architecture& other) const {
  return same_space(other) && genes_ == other.genes_;
}

Architecture sample_uniform(const SpecPtr& spec, Rng& rng) {
  std::vector<NodeGene> genes(static_cast<std::size_t>(spec->nodes_total()));
  const auto ops = static_cast<std::size_t>(spec->num_operations());
  for (std::size_t g = 0; g < genes.size(); ++g) {
    const int node = static_cast<int>(g) % spec->num_intermediate_nodes;
    const auto pair = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(spec->num_pairs(node))));
    genes[g].inputs = pair_from_index(pair, spec->num_predecessors(node));
    genes[g].ops[0] = static_cast<int>(rng.uniform_index(ops));
    genes[g].ops[1] = static_cast<int>(rng.uniform_index(ops));
  }
  return Architecture(spec, std::move(genes));
}

Architecture mutate(const Architecture& arch, Rng& rng, int n_edits) {
  const SearchSpaceSpec& spec = arch.spec();
  std::vector<int> candidates = mutable_parameters(spec);
  if (n_edits < 1 || n_edits > static_cast<int>(candidates.size())) {
    throw std::invalid_argument("insufficient parameters");
  }
  std::vector<int> values = arch.parameters();
  // Partial Fisher-Yates: the first n_edits slots become the edited parameters.
  for (int e = 0; e < n_edits; ++e) {
    const std::size_t remaining = candidates.size() - static_cast<std::size_t>(e);
    const std::size_t pick = static_cast<std::size_t>(e) + rng.uniform_index(remaining);
    std::swap(candidates[static_cast<std::size_t>(e)], candidates[pick]);
    const int param = candidates[static_cast<std::size_t>(e)];
    const int levels = parameter_levels(spec, param);
    const int current = values[static_cast<std::size_t>(param)];
    const int draw = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(levels - 1)));
    values[static_cast<std::size_t>(param)] = draw < current ? draw : draw + 1;
  }
  return Architecture::from_parameters(arch.spec_ptr(), values);
}

std::vector<Architecture> neighbors(const Architecture& arch) {
  const SearchSpaceSpec& spec = arch.spec();
  std::vector<int> values = arch.parameters();
  std::vector<Architecture> out;
  for (int param = 0; param < parameter_count(spec); ++param) {
    const int levels = parameter_levels(spec, param);
    const int current = values[static_cast<std::size_t>(param)];
    for (int level = 0; level < levels; ++level) {
      if (level == current) continue;
      values[static_cast<std::size_t>(param)] = level;
      out.push_back(Architecture::from_parameters(arch.spec_ptr(), values));
    }
    values[static_cast<std::size_t>(param)] = current;
  }
  return out;
}

int edit_distance(const Architecture& a, const Architecture& b) {
  if (!a.same_space(b)) throw std::invalid_argument("edit_distance: architectures from different search spaces");
  int distance = 0;
  const auto ga = a.genes();
  const auto gb = b.genes();
  for (std::size_t g = 0; g < ga.size(); ++g) {
    distance += ga[g].inputs != gb[g].inputs;
    distance += ga[g].ops[0] != gb[g].ops[0];
    distance += ga[g].ops[1] != gb[g].ops[1];
  }
  return distance;
}

}  // namespace nasbo
