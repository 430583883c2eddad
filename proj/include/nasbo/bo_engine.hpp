#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nasbo/acq_optimizers.hpp"
#include "nasbo/benchmarks.hpp"
#include "nasbo/encodings.hpp"
#include "nasbo/search_space.hpp"
#include "nasbo/surrogates.hpp"

namespace nasbo {

struct BOConfig {
  EncodingKind encoding = EncodingKind::tabular;
  SurrogateKind surrogate = SurrogateKind::rf;
  AcquisitionKind acquisition = AcquisitionKind::ei;
  OptimizerKind optimizer = OptimizerKind::mut;
  int refit_every_k = 1;
  int init_design_size = 10;
  int iterations = 100;
  std::size_t n_candidates = 0;  // 0: default pool size of the optimizer
  EnsembleConfig ensemble;
  ForestConfig forest;

  /// Rejects NN + tabular, non-positive k and an empty initial design.
  void validate() const;
  ProposalBudget budget() const;
};

struct TrialRecord {
  int iteration = 0;  // 1-based evaluation index within the run
  Architecture architecture;
  double true_accuracy = 0.0;
  double incumbent_accuracy_after = 0.0;
  std::optional<double> acquisition_value;  // empty for initial design and baselines
  std::string method;
  int replication = 0;
  std::uint64_t seed = 0;
};

struct History {
  std::vector<TrialRecord> trials;
  std::vector<double> wall_clock_seconds;  // per trial, not part of any artifact
  std::vector<int> refit_rounds;           // BO rounds at which the surrogate was refit
  std::vector<std::size_t> training_sizes; // per BO round: rows behind the active surrogate
  std::vector<Architecture> local_optima;  // local search: endpoints before each restart
  std::uint64_t evaluations = 0;           // benchmark calls charged to the main run
  bool valid = true;
  bool bridge_failure = false;
  std::string failure;

  std::size_t incumbent_index() const;
  double final_incumbent_accuracy() const;
};

/// One non-driving (or driving) proposal recorded for instrumentation.
struct ShadowRecord {
  int replication = 0;
  int iteration = 0;  // BO round
  OptimizerKind optimizer = OptimizerKind::mut;
  double ei = 0.0;
  double true_accuracy = 0.0;
  double incumbent_accuracy = 0.0;

  double relative_accuracy() const { return true_accuracy - incumbent_accuracy; }
  bool improved() const { return true_accuracy > incumbent_accuracy; }
};

struct RunSettings {
  SpecPtr spec;
  std::shared_ptr<const PathTable> path_table;  // required for path encoding
  std::uint64_t seed = 0;
  std::string method;
  int replication = 0;
  std::optional<std::vector<Architecture>> initial_design;  // pinned design
};

std::unique_ptr<SurrogateModel> fit_surrogate(const BOConfig& cfg, const TrainingSet& data, Rng& rng);
Encoder make_encoder(const BOConfig& cfg, const RunSettings& settings);
TrainingSet training_set(const History& history, const Encoder& encoder);

/// Initial design of `size` uniform architectures drawn from `seed`.
std::vector<Architecture> uniform_design(const SpecPtr& spec, int size, std::uint64_t seed);

/// Sequential model-based optimisation. When shadows is non-null the run also
/// records the driving proposal plus Mut and RS shadow proposals each round.
/// Shadow proposals are evaluated on the benchmark but never enter the
/// surrogate data, the incumbent or History::evaluations.
History run_bo(const BOConfig& cfg, Benchmark& benchmark, const RunSettings& settings,
               std::vector<ShadowRecord>* shadows = nullptr);

/// First-improvement local search with random neighbour order and random
/// restarts, stopping after exactly budget_evals evaluations.
History run_local_search(Benchmark& benchmark, const RunSettings& settings, int budget_evals);

History run_random_search(Benchmark& benchmark, const RunSettings& settings, int budget_evals);

struct ShadowRun {
  History history;
  std::vector<ShadowRecord> shadows;
};

/// Tabular + RF + EI driven by RS+ with Mut and RS shadows each round.
ShadowRun run_rs_plus_with_shadows(const BOConfig& cfg, Benchmark& benchmark, const RunSettings& settings);

}  // namespace nasbo
