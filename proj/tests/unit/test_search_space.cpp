#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "nasbo/search_space.hpp"

using namespace nasbo;

namespace {

SpecPtr small_spec(int nodes, int ops, int inputs = 2, int cells = 1) {
  SearchSpaceSpec s;
  s.num_intermediate_nodes = nodes;
  s.num_inputs = inputs;
  s.operations.clear();
  for (int i = 0; i < ops; ++i) s.operations.push_back("op" + std::to_string(i));
  s.num_cells = cells;
  return make_spec(s);
}

/// Every architecture of a space, by odometer over the parameter levels.
std::vector<Architecture> enumerate_all(const SpecPtr& spec) {
  const int n = parameter_count(*spec);
  std::vector<int> values(static_cast<std::size_t>(n), 0);
  std::vector<Architecture> out;
  while (true) {
    out.push_back(Architecture::from_parameters(spec, values));
    int i = n - 1;
    while (i >= 0 && ++values[static_cast<std::size_t>(i)] == parameter_levels(*spec, i)) {
      values[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace

TEST_CASE("spec validation") {
  SearchSpaceSpec s;
  CHECK_NOTHROW(s.validate());
  s.num_intermediate_nodes = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.operations = {"a"};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.operations = {"a", "a"};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.num_inputs = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("default space dimensions") {
  const auto spec = make_spec({});
  CHECK(parameter_count(*spec) == 12);
  CHECK(mutable_parameters(*spec).size() == 11);  // node 0 has a single input pair
  // 8^8 op choices times 1 * 3 * 6 * 10 input pairs.
  CHECK(log10_space_size(*spec) == doctest::Approx(8 * std::log10(8.0) + std::log10(180.0)));
}

TEST_CASE("pair index round trip") {
  for (int k = 2; k < 8; ++k) {
    int idx = 0;
    for (int p = 0; p < k; ++p) {
      for (int q = p + 1; q < k; ++q) {
        CHECK(pair_index(p, q, k) == idx);
        CHECK(pair_from_index(idx, k) == std::array<int, 2>{p, q});
        ++idx;
      }
    }
  }
}

TEST_CASE("single-pair space sample") {
  const auto spec = small_spec(1, 2);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto a = sample_uniform(spec, rng);
    CHECK(a.gene(0, 0).inputs == std::array<int, 2>{0, 1});
    CHECK(a.gene(0, 0).ops[0] < 2);
    CHECK(a.gene(0, 0).ops[1] < 2);
  }
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  const auto spec = make_spec({});
  Rng a(99), b(99);
  CHECK(sample_uniform(spec, a) == sample_uniform(spec, b));
}

TEST_CASE("input pairs of node 1 are uniform") {
  const auto spec = small_spec(2, 2);
  Rng rng(5);
  std::map<std::array<int, 2>, int> counts;
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[sample_uniform(spec, rng).gene(0, 1).inputs];
  CHECK(counts.size() == 3);
  for (const auto& [pair, c] : counts) CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 3.0) < 0.02);
}

TEST_CASE("sample_uniform hits every architecture of a small space uniformly") {
  // 1 node, 2 inputs, 8 ops: 64 architectures.
  const auto spec = small_spec(1, 8);
  const auto all = enumerate_all(spec);
  REQUIRE(all.size() == 64);
  std::map<std::string, int> counts;
  Rng rng(11);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_uniform(spec, rng).to_string()];
  CHECK(counts.size() == 64);
  const double p = 1.0 / 64;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (const auto& [k, c] : counts) CHECK(std::abs(c - n * p) < 3.5 * sigma);
}

TEST_CASE("mutate changes exactly n parameters") {
  const auto spec = make_spec({});
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = sample_uniform(spec, rng);
    for (int d = 1; d <= 11; ++d) {
      const auto b = mutate(a, rng, d);
      int diff = 0;
      for (int i = 0; i < parameter_count(*spec); ++i) diff += a.parameter(i) != b.parameter(i);
      CHECK(diff == d);
      CHECK(edit_distance(a, b) == d);
    }
  }
  const auto a = sample_uniform(spec, rng);
  CHECK_THROWS_WITH_AS(mutate(a, rng, 12), "insufficient parameters", std::invalid_argument);
}

TEST_CASE("mutate on a single two-level parameter returns the other architecture") {
  // 1 node, 2 ops: the pair is fixed, two op parameters each with 2 levels.
  const auto spec = small_spec(1, 2);
  const auto a = Architecture::from_parameters(spec, std::vector<int>{0, 0, 1});
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto b = mutate(a, rng, 2);
    CHECK(b == Architecture::from_parameters(spec, std::vector<int>{0, 1, 0}));
  }
}

TEST_CASE("neighbors of the 4-architecture space") {
  const auto spec = small_spec(1, 2);
  const auto a = Architecture::from_parameters(spec, std::vector<int>{0, 0, 0});
  const auto n = neighbors(a);
  CHECK(n.size() == 2);
}

TEST_CASE("neighbor count identity and distance") {
  const auto spec = make_spec({});
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto a = sample_uniform(spec, rng);
    int expected = 0;
    for (int i = 0; i < parameter_count(*spec); ++i) expected += parameter_levels(*spec, i) - 1;
    const auto n = neighbors(a);
    CHECK(static_cast<int>(n.size()) == expected);
    for (const auto& b : n) CHECK(edit_distance(a, b) == 1);
  }
}

TEST_CASE("neighbors equal the brute-force distance-1 set") {
  // 2 nodes, 2 inputs, 3 ops: 3^4 * 3 = 243 architectures.
  const auto spec = small_spec(2, 3);
  const auto all = enumerate_all(spec);
  CHECK(all.size() == 243);
  for (std::size_t i = 0; i < all.size(); i += 7) {
    std::set<std::string> brute;
    for (const auto& b : all) {
      if (edit_distance(all[i], b) == 1) brute.insert(b.to_string());
    }
    std::set<std::string> listed;
    for (const auto& b : neighbors(all[i])) CHECK(listed.insert(b.to_string()).second);
    CHECK(listed == brute);
  }
}

TEST_CASE("edit distance properties") {
  const auto spec = make_spec({});
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto a = sample_uniform(spec, rng);
    const auto b = sample_uniform(spec, rng);
    const auto c = sample_uniform(spec, rng);
    CHECK(edit_distance(a, a) == 0);
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
  }
  // Hand-built pair: two edge ops and one input pair differ.
  std::vector<int> p = sample_uniform(spec, rng).parameters();
  std::vector<int> q = p;
  q[1] = (q[1] + 1) % 8;                                         // node 0 low op
  q[5] = (q[5] + 3) % 8;                                         // node 1 high op
  q[6] = (q[6] + 1) % parameter_levels(*spec, 6);                // node 2 input pair
  CHECK(edit_distance(Architecture::from_parameters(spec, p), Architecture::from_parameters(spec, q)) == 3);

  const auto other = small_spec(2, 3);
  CHECK_THROWS_AS(edit_distance(sample_uniform(spec, rng), sample_uniform(other, rng)), std::invalid_argument);
}

TEST_CASE("text form round trips and rejects garbage") {
  SearchSpaceSpec s;
  s.num_cells = 2;
  const auto spec = make_spec(s);
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto a = sample_uniform(spec, rng);
    CHECK(Architecture::parse(spec, a.to_string()) == a);
  }
  const auto a = sample_uniform(make_spec({}), rng);
  CHECK(a.to_string().rfind("0/0:pair=(0,1);op[0]=", 0) == 0);
  CHECK_THROWS_AS(Architecture::parse(make_spec({}), "0/0:pair=(0,1)"), std::invalid_argument);
  CHECK_THROWS_AS(Architecture::parse(make_spec({}), "garbage"), std::invalid_argument);
}

TEST_CASE("invalid genes are rejected") {
  const auto spec = small_spec(2, 2);
  CHECK_THROWS_AS(Architecture(spec, {NodeGene{{0, 1}, {0, 0}}, NodeGene{{1, 1}, {0, 0}}}), std::invalid_argument);
  CHECK_THROWS_AS(Architecture(spec, {NodeGene{{0, 1}, {0, 2}}, NodeGene{{0, 2}, {0, 0}}}), std::invalid_argument);
  CHECK_THROWS_AS(Architecture(spec, {NodeGene{{0, 1}, {0, 0}}, NodeGene{{0, 3}, {0, 0}}}), std::invalid_argument);
  CHECK_NOTHROW(Architecture(spec, {NodeGene{{0, 1}, {0, 0}}, NodeGene{{0, 2}, {1, 1}}}));
}
