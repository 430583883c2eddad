#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nasbo/analysis.hpp"
#include "nasbo/benchmarks.hpp"
#include "nasbo/bo_engine.hpp"
#include "nasbo/probe.hpp"

namespace nasbo {

inline constexpr const char* kToolVersion = "0.1.0";

enum class SuiteKind { ablation, optimizer_compare, probe };
std::string to_string(SuiteKind kind);
SuiteKind parse_suite_kind(std::string_view text);

enum class BenchmarkKind { synthetic, bridge };

struct SuiteConfig {
  SuiteKind suite = SuiteKind::ablation;
  int replications = 0;  // 0: suite default (ablation 20, optimizer_compare 20, probe 100)
  int iterations = 0;    // 0: suite default (100; probe 50)
  std::uint64_t seed = 0;
  BenchmarkKind benchmark = BenchmarkKind::synthetic;
  std::string bridge_command;
  std::string output_dir;
  int nodes = 4;
  std::vector<std::string> operations = SearchSpaceSpec::default_operations();
  int cells = 1;
  std::size_t truncation = kDefaultTruncation;
  int init_design_size = 10;
  int threads = 0;  // 0: NAS_ABLATE_THREADS, else hardware concurrency
  SyntheticOracleConfig oracle;
  EnsembleConfig ensemble;
  ForestConfig forest;

  int effective_replications() const;
  int effective_iterations() const;
  SearchSpaceSpec space() const;
  /// Throws std::invalid_argument on an invalid configuration.
  void validate() const;
  /// Canonical text of every setting that affects results.
  std::string canonical() const;
  std::uint64_t hash() const { return fnv1a(canonical()); }
};

enum class MethodKind { bo, local_search, random_search };

struct MethodSpec {
  std::string label;
  MethodKind kind = MethodKind::bo;
  BOConfig bo;
  bool shadows = false;
  bool factorial = false;  // member of the crossed factorial design
};

/// Methods of a suite in output order.
std::vector<MethodSpec> suite_methods(const SuiteConfig& cfg);

/// Seed of one (method, replication) cell.
std::uint64_t cell_seed(std::uint64_t master, const std::string& method, int replication);

struct CellResult {
  std::string method;
  int replication = 0;
  std::uint64_t seed = 0;
  bool ran = false;
  History history;
  std::vector<ShadowRecord> shadows;
  std::vector<ProbeRecord> probe;
};

struct SuiteResult {
  int exit_code = 0;
  std::vector<CellResult> cells;  // method order, then replication
  std::vector<CurveRow> curves;
  std::optional<AnovaTable> anova;
  std::optional<OnewayResult> oneway;
  std::vector<std::string> oneway_methods;
  std::vector<ProbeSummary> probe_summary;
  std::vector<std::string> artifacts;  // file names written to output_dir
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitBridge = 3;

/// Runs every (method, replication) cell, writes the suite artifacts into
/// cfg.output_dir and prints a summary table to `log`.
SuiteResult run_suite(const SuiteConfig& cfg, std::ostream& log);

/// Number of methods with the highest mean final accuracy used for the
/// one-way ANOVA of the ablation suite.
inline constexpr std::size_t kOnewayTopMethods = 7;

}  // namespace nasbo
