#include "nasbo/encodings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace nasbo {

std::string to_string(EncodingKind kind) {
  return kind == EncodingKind::path ? "path" : "tabular";
}

EncodingKind parse_encoding_kind(std::string_view text) {
  if (text == "path") return EncodingKind::path;
  if (text == "tabular") return EncodingKind::tabular;
  throw std::invalid_argument("unknown encoding '" + std::string(text) + "'");
}

namespace {

std::string map_key(const PathKey& key) {
  std::string out = std::to_string(key.cell);
  out += ':';
  out.append(key.ops.begin(), key.ops.end());
  return out;
}

bool label_less(const SearchSpaceSpec& spec, const PathKey& a, const PathKey& b) {
  if (a.cell != b.cell) return a.cell < b.cell;
  return std::lexicographical_compare(
      a.ops.begin(), a.ops.end(), b.ops.begin(), b.ops.end(), [&](std::uint8_t x, std::uint8_t y) {
        return spec.operations[x] < spec.operations[y];
      });
}

}  // namespace

int PathTable::feature_index(const PathKey& key) const {
  const auto it = retained_.find(map_key(key));
  return it == retained_.end() ? -1 : it->second;
}

std::string PathTable::label_sequence(const PathKey& key) const {
  std::string out;
  if (spec_->num_cells > 1) out = "c" + std::to_string(key.cell) + ":";
  for (std::size_t i = 0; i < key.ops.size(); ++i) {
    if (i > 0) out += '>';
    out += spec_->operations[key.ops[i]];
  }
  return out;
}

void PathTable::write_csv(std::ostream& out) const {
  out << "rank,label_sequence,occurrence_prob,retained\n";
  char buf[64];
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", paths_[i].occurrence_prob);
    out << (i + 1) << ',' << label_sequence(paths_[i].key) << ',' << buf << ','
        << (i < encoding_length() ? 1 : 0) << '\n';
  }
}

std::vector<PathKey> architecture_paths(const Architecture& arch) {
  const SearchSpaceSpec& spec = arch.spec();
  std::set<PathKey> found;
  for (int cell = 0; cell < spec.num_cells; ++cell) {
    std::vector<std::vector<std::vector<std::uint8_t>>> ending(
        static_cast<std::size_t>(spec.num_intermediate_nodes));
    for (int node = 0; node < spec.num_intermediate_nodes; ++node) {
      const NodeGene& gene = arch.gene(cell, node);
      auto& here = ending[static_cast<std::size_t>(node)];
      for (int s = 0; s < 2; ++s) {
        const int pred = gene.inputs[s];
        const auto op = static_cast<std::uint8_t>(gene.ops[s]);
        if (pred < spec.num_inputs) {
          here.push_back({op});
        } else {
          for (const auto& prefix : ending[static_cast<std::size_t>(pred - spec.num_inputs)]) {
            auto path = prefix;
            path.push_back(op);
            here.push_back(std::move(path));
          }
        }
      }
      for (const auto& ops : here) found.insert(PathKey{cell, ops});
    }
  }
  return {found.begin(), found.end()};
}

PathTable build_path_table(const SpecPtr& spec, std::size_t truncation_length, Rng& rng) {
  if (truncation_length < 1) throw std::invalid_argument("path table: truncation length must be >= 1");
  const double ops = spec->num_operations();
  double total = 0.0;
  for (int len = 1; len <= spec->num_intermediate_nodes; ++len) total += std::pow(ops, len);
  total *= spec->num_cells;
  if (total > kMaxEnumeratedPaths) throw std::invalid_argument("space too large for path enumeration");

  // Enumerate every label sequence of length 1..nodes per cell.
  std::map<PathKey, std::size_t> counts;
  for (int cell = 0; cell < spec->num_cells; ++cell) {
    std::vector<std::vector<std::uint8_t>> frontier{{}};
    for (int len = 1; len <= spec->num_intermediate_nodes; ++len) {
      std::vector<std::vector<std::uint8_t>> next;
      next.reserve(frontier.size() * static_cast<std::size_t>(ops));
      for (const auto& prefix : frontier) {
        for (int op = 0; op < spec->num_operations(); ++op) {
          auto seq = prefix;
          seq.push_back(static_cast<std::uint8_t>(op));
          counts.emplace(PathKey{cell, seq}, 0);
          next.push_back(std::move(seq));
        }
      }
      frontier = std::move(next);
    }
  }

  Rng sampler(derive_seed(rng.next_u64(), "path-table"));
  for (std::size_t i = 0; i < kPathMonteCarloSamples; ++i) {
    for (const PathKey& key : architecture_paths(sample_uniform(spec, sampler))) ++counts[key];
  }

  PathTable table;
  table.spec_ = spec;
  table.truncation_ = truncation_length;
  table.paths_.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    table.paths_.push_back({key, static_cast<double>(count) / kPathMonteCarloSamples});
  }
  std::sort(table.paths_.begin(), table.paths_.end(), [&](const PathEntry& a, const PathEntry& b) {
    if (a.occurrence_prob != b.occurrence_prob) return a.occurrence_prob > b.occurrence_prob;
    return label_less(*spec, a.key, b.key);
  });
  for (std::size_t i = 0; i < table.encoding_length(); ++i) {
    table.retained_.emplace(map_key(table.paths_[i].key), static_cast<int>(i));
  }
  return table;
}

std::vector<double> encode_path(const Architecture& arch, const PathTable& table) {
  if (!(arch.spec() == table.spec())) throw std::invalid_argument("encode_path: search space mismatch");
  std::vector<double> bits(table.encoding_length(), 0.0);
  for (const PathKey& key : architecture_paths(arch)) {
    const int idx = table.feature_index(key);
    if (idx >= 0) bits[static_cast<std::size_t>(idx)] = 1.0;
  }
  return bits;
}

std::vector<TabularColumn> tabular_columns(const SearchSpaceSpec& spec) {
  std::vector<TabularColumn> columns;
  std::vector<std::string> op_levels = spec.operations;
  op_levels.emplace_back(kMissingLevel);
  for (int cell = 0; cell < spec.num_cells; ++cell) {
    for (int node = 0; node < spec.num_intermediate_nodes; ++node) {
      const std::string prefix = "c" + std::to_string(cell) + "_n" + std::to_string(node);
      TabularColumn pair{prefix + "_inputs", {}, cell, node, -1};
      const int k = spec.num_predecessors(node);
      for (int idx = 0; idx < spec.num_pairs(node); ++idx) {
        const auto p = pair_from_index(idx, k);
        pair.levels.push_back("(" + std::to_string(p[0]) + "," + std::to_string(p[1]) + ")");
      }
      columns.push_back(std::move(pair));
      for (int pred = 0; pred < k; ++pred) {
        columns.push_back({prefix + "_op_from" + std::to_string(pred), op_levels, cell, node, pred});
      }
    }
  }
  return columns;
}

FeatureSchema tabular_schema(const SearchSpaceSpec& spec) {
  FeatureSchema schema;
  for (const auto& column : tabular_columns(spec)) {
    schema.levels.push_back(static_cast<int>(column.levels.size()));
  }
  return schema;
}

TabularRow encode_tabular(const Architecture& arch, const SearchSpaceSpec& spec) {
  if (!(arch.spec() == spec)) throw std::invalid_argument("encode_tabular: search space mismatch");
  TabularRow row;
  const int missing = spec.num_operations();
  for (int cell = 0; cell < spec.num_cells; ++cell) {
    for (int node = 0; node < spec.num_intermediate_nodes; ++node) {
      const NodeGene& gene = arch.gene(cell, node);
      const int k = spec.num_predecessors(node);
      row.values.push_back(pair_index(gene.inputs[0], gene.inputs[1], k));
      for (int pred = 0; pred < k; ++pred) {
        if (pred == gene.inputs[0]) {
          row.values.push_back(gene.ops[0]);
        } else if (pred == gene.inputs[1]) {
          row.values.push_back(gene.ops[1]);
        } else {
          row.values.push_back(missing);
        }
      }
    }
  }
  return row;
}

Architecture decode_tabular(const TabularRow& row, const SpecPtr& spec) {
  std::vector<NodeGene> genes;
  std::size_t pos = 0;
  const auto take = [&]() {
    if (pos >= row.values.size()) throw std::invalid_argument("decode_tabular: row too short");
    return row.values[pos++];
  };
  for (int cell = 0; cell < spec->num_cells; ++cell) {
    for (int node = 0; node < spec->num_intermediate_nodes; ++node) {
      const int k = spec->num_predecessors(node);
      NodeGene gene;
      gene.inputs = pair_from_index(take(), k);
      for (int pred = 0; pred < k; ++pred) {
        const int value = take();
        const bool active = pred == gene.inputs[0] || pred == gene.inputs[1];
        if (active == (value == spec->num_operations())) {
          throw std::invalid_argument("decode_tabular: inconsistent .missing pattern");
        }
        if (active) gene.ops[pred == gene.inputs[0] ? 0 : 1] = value;
      }
      genes.push_back(gene);
    }
  }
  if (pos != row.values.size()) throw std::invalid_argument("decode_tabular: row too long");
  return Architecture(spec, std::move(genes));
}

Encoder::Encoder(EncodingKind kind, SpecPtr spec, std::shared_ptr<const PathTable> table)
    : kind_(kind), spec_(std::move(spec)), table_(std::move(table)) {
  if (kind_ == EncodingKind::path) {
    schema_.levels.assign(table_->encoding_length(), 0);
  } else {
    schema_ = tabular_schema(*spec_);
  }
}

Encoder Encoder::path(std::shared_ptr<const PathTable> table) {
  if (!table) throw std::invalid_argument("path encoder: null table");
  SpecPtr spec = table->spec_ptr();
  return Encoder(EncodingKind::path, std::move(spec), std::move(table));
}

Encoder Encoder::tabular(SpecPtr spec) {
  return Encoder(EncodingKind::tabular, std::move(spec), nullptr);
}

void Encoder::encode(const Architecture& arch, std::span<double> out) const {
  if (out.size() != width()) throw std::invalid_argument("encoder: output width mismatch");
  if (kind_ == EncodingKind::path) {
    const auto bits = encode_path(arch, *table_);
    std::copy(bits.begin(), bits.end(), out.begin());
  } else {
    const TabularRow row = encode_tabular(arch, *spec_);
    std::transform(row.values.begin(), row.values.end(), out.begin(),
                   [](int v) { return static_cast<double>(v); });
  }
}

std::vector<double> Encoder::encode(const Architecture& arch) const {
  std::vector<double> out(width());
  encode(arch, out);
  return out;
}

FeatureMatrix Encoder::encode_all(std::span<const Architecture> archs) const {
  FeatureMatrix matrix(archs.size(), width());
  for (std::size_t i = 0; i < archs.size(); ++i) encode(archs[i], matrix.row(i));
  return matrix;
}

}  // namespace nasbo
