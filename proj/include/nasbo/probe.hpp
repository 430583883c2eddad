#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nasbo/bo_engine.hpp"

namespace nasbo {

inline constexpr int kProbeMaxDistance = 8;
inline constexpr int kProbeTestArchitectures = 100;
inline constexpr int kProbeIterations = 50;

struct ProbeRecord {
  int replication = 0;
  int edit_distance = 0;
  int test_index = 0;
  double predicted_mean = 0.0;
  double predicted_sd = 0.0;
  double true_accuracy = 0.0;
  double ei = 0.0;
  double incumbent_accuracy = 0.0;

  double improvement() const { return true_accuracy - incumbent_accuracy; }
  bool improved() const { return true_accuracy > incumbent_accuracy; }
};

struct ProbeRun {
  History history;
  std::vector<ProbeRecord> records;
  std::vector<int> skipped_distances;  // distances beyond the mutable parameter count
};

/// Runs BO (cfg, normally Tabular + RF + EI + Mut) and then scores
/// kProbeTestArchitectures mutants of the final incumbent at each edit
/// distance 1..kProbeMaxDistance with a surrogate refit on every evaluation.
ProbeRun probe_edit_distance(const BOConfig& cfg, Benchmark& benchmark, const RunSettings& settings);

struct ProbeSummary {
  int edit_distance = 0;
  int replications = 0;
  int tau_missing = 0;  // replications whose predictions were constant
  double mean_tau = 0.0;
  double tau_q025 = 0.0;
  double tau_q975 = 0.0;
  double mean_true_accuracy = 0.0;
  double true_q025 = 0.0;
  double true_q975 = 0.0;
  double mean_ei = 0.0;
  double ei_q025 = 0.0;
  double ei_q975 = 0.0;
  double mean_improvement = 0.0;
  double improvement_q025 = 0.0;
  double improvement_q975 = 0.0;
};

/// Kendall's tau between predicted mean and true accuracy for one
/// (replication, distance) group.
std::optional<double> probe_tau(std::span<const ProbeRecord> group);

/// Per-distance aggregation over all replications. Tau quantiles run over the
/// per-replication tau values; the others over all test architectures.
std::vector<ProbeSummary> summarize_probe(std::span<const ProbeRecord> records);

}  // namespace nasbo
