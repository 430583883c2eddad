#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nasbo/benchmarks.hpp"

namespace nasbo {

void SyntheticOracleConfig::validate() const {
  if (!(accuracy_floor < accuracy_ceiling)) {
    throw std::invalid_argument("synthetic oracle: floor must be below ceiling");
  }
  if (locality_weight < 0 || interaction_weight < 0 || pattern_weight < 0) {
    throw std::invalid_argument("synthetic oracle: weights must be non-negative");
  }
}

SyntheticOracle::SyntheticOracle(SpecPtr spec, SyntheticOracleConfig cfg)
    : spec_(std::move(spec)), cfg_(cfg) {
  cfg_.validate();
  const SearchSpaceSpec& sp = *spec_;
  const int ops = sp.num_operations();
  for (int cell = 0; cell < sp.num_cells; ++cell) {
    for (int node = 0; node < sp.num_intermediate_nodes; ++node) {
      u_offset_.push_back(u_.size());
      for (int pred = 0; pred < sp.num_predecessors(node); ++pred) {
        for (int op = 0; op < ops; ++op) u_.push_back(unit(1, cell, node, pred, op));
      }
      b_offset_.push_back(b_.size());
      for (int pair = 0; pair < sp.num_pairs(node); ++pair) b_.push_back(unit(2, cell, node, pair, 0));
      for (int a = 0; a < ops; ++a) {
        for (int b = 0; b < ops; ++b) {
          s_.push_back(unit(3, cell, node, std::min(a, b), std::max(a, b)));
        }
      }
      for (int a = 0; a < ops; ++a) {
        for (int b = 0; b < ops; ++b) c_.push_back(unit(4, cell, node, a, b));
      }
    }
  }
  compute_bounds();
}

double SyntheticOracle::unit(std::uint64_t table, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                             std::uint64_t d) const {
  std::uint64_t h = derive_seed(cfg_.benchmark_seed, table);
  h = derive_seed(h, a);
  h = derive_seed(h, b);
  h = derive_seed(h, c);
  h = derive_seed(h, d);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::size_t SyntheticOracle::u_index(int cell, int node, int pred, int op) const {
  return u_offset_[static_cast<std::size_t>(cell * spec_->num_intermediate_nodes + node)] +
         static_cast<std::size_t>(pred * spec_->num_operations() + op);
}

std::size_t SyntheticOracle::s_index(int cell, int node, int op_a, int op_b) const {
  const auto ops = static_cast<std::size_t>(spec_->num_operations());
  return (static_cast<std::size_t>(cell * spec_->num_intermediate_nodes + node) * ops +
          static_cast<std::size_t>(op_a)) * ops + static_cast<std::size_t>(op_b);
}

std::size_t SyntheticOracle::c_index(int cell, int mid, int op_in, int op_out) const {
  return s_index(cell, mid, op_in, op_out);  // same layout, separate table
}

std::size_t SyntheticOracle::b_index(int cell, int node, int pair) const {
  return b_offset_[static_cast<std::size_t>(cell * spec_->num_intermediate_nodes + node)] +
         static_cast<std::size_t>(pair);
}

double SyntheticOracle::raw_score(const Architecture& arch) const {
  if (!(arch.spec() == *spec_)) throw std::invalid_argument("synthetic oracle: search space mismatch");
  const SearchSpaceSpec& sp = *spec_;
  double local = 0.0;
  double interaction = 0.0;
  double pattern = 0.0;
  for (int cell = 0; cell < sp.num_cells; ++cell) {
    for (int node = 0; node < sp.num_intermediate_nodes; ++node) {
      const NodeGene& g = arch.gene(cell, node);
      for (int s = 0; s < 2; ++s) {
        local += u_[u_index(cell, node, g.inputs[s], g.ops[s])];
        if (g.inputs[s] >= sp.num_inputs) {
          const int mid = g.inputs[s] - sp.num_inputs;
          const NodeGene& src = arch.gene(cell, mid);
          for (int t = 0; t < 2; ++t) interaction += c_[c_index(cell, mid, src.ops[t], g.ops[s])];
        }
      }
      interaction += s_[s_index(cell, node, g.ops[0], g.ops[1])];
      pattern += b_[b_index(cell, node, pair_index(g.inputs[0], g.inputs[1], sp.num_predecessors(node)))];
    }
  }
  return cfg_.locality_weight * local + cfg_.interaction_weight * interaction + cfg_.pattern_weight * pattern;
}

double SyntheticOracle::evaluate(const Architecture& arch) const {
  const double t = (raw_score(arch) - raw_lo_) / (raw_hi_ - raw_lo_);
  return cfg_.accuracy_floor + (cfg_.accuracy_ceiling - cfg_.accuracy_floor) * std::clamp(t, 0.0, 1.0);
}

void SyntheticOracle::compute_bounds() {
  const SearchSpaceSpec& sp = *spec_;
  const int ops = sp.num_operations();
  const double wl = cfg_.locality_weight;
  const double wi = cfg_.interaction_weight;
  const double wp = cfg_.pattern_weight;

  auto range_of = [](auto begin, auto end) {
    const auto [lo, hi] = std::minmax_element(begin, end);
    return std::pair<double, double>{*lo, *hi};
  };

  double lo = 0.0;
  double hi = 0.0;
  double worst_edit = 0.0;
  const int n = sp.num_intermediate_nodes;
  for (int cell = 0; cell < sp.num_cells; ++cell) {
    for (int node = 0; node < n; ++node) {
      const auto u_begin = u_.begin() + static_cast<std::ptrdiff_t>(u_index(cell, node, 0, 0));
      const auto [u_lo, u_hi] = range_of(u_begin, u_begin + sp.num_predecessors(node) * ops);
      const auto b_begin = b_.begin() + static_cast<std::ptrdiff_t>(b_index(cell, node, 0));
      const auto [b_lo, b_hi] = range_of(b_begin, b_begin + sp.num_pairs(node));
      const auto s_begin = s_.begin() + static_cast<std::ptrdiff_t>(s_index(cell, node, 0, 0));
      const auto [s_lo, s_hi] = range_of(s_begin, s_begin + ops * ops);

      // Chains ending at this node: each in-edge from an intermediate node pairs
      // with both in-edges of that node. Bound over every possible source.
      double c_lo = 0.0;
      double c_hi = 0.0;
      for (int mid = 0; mid < node; ++mid) {
        const auto c_begin = c_.begin() + static_cast<std::ptrdiff_t>(c_index(cell, mid, 0, 0));
        const auto [lo_m, hi_m] = range_of(c_begin, c_begin + ops * ops);
        if (mid == 0) {
          c_lo = lo_m;
          c_hi = hi_m;
        } else {
          c_lo = std::min(c_lo, lo_m);
          c_hi = std::max(c_hi, hi_m);
        }
      }
      const int max_chains_in = 2 * std::min(2, node);
      // Chain sums over k in [0, max_chains_in] terms each in [c_lo, c_hi].
      const double chain_lo = std::min(0.0, max_chains_in * c_lo);
      const double chain_hi = std::max(0.0, max_chains_in * c_hi);

      lo += wl * 2.0 * u_lo + wi * (s_lo + chain_lo) + wp * b_lo;
      hi += wl * 2.0 * u_hi + wi * (s_hi + chain_hi) + wp * b_hi;

      // Range of chain terms where this node is the middle node.
      const auto out_begin = c_.begin() + static_cast<std::ptrdiff_t>(c_index(cell, node, 0, 0));
      const auto [out_lo, out_hi] = range_of(out_begin, out_begin + ops * ops);
      const int later = n - 1 - node;

      // Operation edit on one in-edge of `node`.
      const double op_edit = wl * (u_hi - u_lo) + wi * (s_hi - s_lo) +
                             wi * (node > 0 ? 2.0 * (c_hi - c_lo) : 0.0) + wi * later * (out_hi - out_lo);
      // Input-pair edit of `node`: both edges may move, chain terms into it are
      // rebuilt, the pattern term changes.
      double chain_swap = 0.0;
      for (int before = 0; before <= max_chains_in; ++before) {
        for (int after = 0; after <= max_chains_in; ++after) {
          chain_swap = std::max({chain_swap, before * c_hi - after * c_lo, after * c_hi - before * c_lo});
        }
      }
      const double pair_edit = wl * 2.0 * (u_hi - u_lo) + wi * chain_swap + wp * (b_hi - b_lo);
      worst_edit = std::max({worst_edit, op_edit, pair_edit});
    }
  }
  raw_lo_ = lo;
  raw_hi_ = hi > lo ? hi : lo + 1.0;
  locality_bound_ = worst_edit * (cfg_.accuracy_ceiling - cfg_.accuracy_floor) / (raw_hi_ - raw_lo_);
}

}  // namespace nasbo
