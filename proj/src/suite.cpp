#include "nasbo/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "nasbo/csv.hpp"

namespace nasbo {

namespace fs = std::filesystem;

std::string to_string(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::ablation:
      return "ablation";
    case SuiteKind::optimizer_compare:
      return "optimizer_compare";
    case SuiteKind::probe:
      return "probe";
  }
  return "?";
}

SuiteKind parse_suite_kind(std::string_view text) {
  if (text == "ablation") return SuiteKind::ablation;
  if (text == "optimizer_compare") return SuiteKind::optimizer_compare;
  if (text == "probe") return SuiteKind::probe;
  throw std::invalid_argument("unknown suite: " + std::string(text));
}

int SuiteConfig::effective_replications() const {
  if (replications > 0) return replications;
  return suite == SuiteKind::probe ? 100 : 20;
}

int SuiteConfig::effective_iterations() const {
  if (iterations > 0) return iterations;
  return suite == SuiteKind::probe ? kProbeIterations : 100;
}

SearchSpaceSpec SuiteConfig::space() const {
  SearchSpaceSpec s;
  s.num_intermediate_nodes = nodes;
  s.operations = operations;
  s.num_cells = cells;
  return s;
}

void SuiteConfig::validate() const {
  if (replications < 0) throw std::invalid_argument("replications must be >= 1");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 1");
  if (output_dir.empty()) throw std::invalid_argument("an output directory is required");
  if (benchmark == BenchmarkKind::bridge && bridge_command.empty()) {
    throw std::invalid_argument("--bridge-cmd is required with --benchmark bridge");
  }
  if (benchmark == BenchmarkKind::synthetic && !bridge_command.empty()) {
    throw std::invalid_argument("--bridge-cmd is only valid with --benchmark bridge");
  }
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  if (init_design_size < 2) throw std::invalid_argument("initial design must hold at least two architectures");
  space().validate();
  oracle.validate();
  ensemble.validate();
  forest.validate();
}

std::string SuiteConfig::canonical() const {
  std::ostringstream out;
  out << "suite=" << to_string(suite) << ";replications=" << effective_replications()
      << ";iterations=" << effective_iterations() << ";seed=" << seed
      << ";benchmark=" << (benchmark == BenchmarkKind::bridge ? "bridge:" + bridge_command : "synthetic")
      << ";nodes=" << nodes << ";cells=" << cells << ";ops=";
  for (const auto& op : operations) out << op << ',';
  out << ";truncation=" << truncation << ";init=" << init_design_size << ";oracle=" << oracle.benchmark_seed << ','
      << format_double(oracle.accuracy_floor) << ',' << format_double(oracle.accuracy_ceiling) << ','
      << format_double(oracle.locality_weight) << ',' << format_double(oracle.interaction_weight) << ','
      << format_double(oracle.pattern_weight) << ";ensemble=" << ensemble.members << ',' << ensemble.layers << ','
      << ensemble.width << ',' << format_double(ensemble.learning_rate) << ',' << ensemble.epochs
      << ";forest=" << forest.num_trees << ',' << static_cast<int>(forest.uncertainty) << ','
      << forest.min_node_size << ',' << forest.mtry;
  return out.str();
}

namespace {

std::string short_name(EncodingKind k) { return k == EncodingKind::path ? "Path" : "Tabular"; }
std::string short_name(SurrogateKind k) { return k == SurrogateKind::nn_ensemble ? "NN" : "RF"; }
std::string short_name(AcquisitionKind k) {
  switch (k) {
    case AcquisitionKind::its:
      return "ITS";
    case AcquisitionKind::ei:
      return "EI";
    case AcquisitionKind::const_mean:
      return "ConstMean";
  }
  return "?";
}
std::string short_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::mut:
      return "Mut";
    case OptimizerKind::rs:
      return "RS";
    case OptimizerKind::rs_plus:
      return "RS+";
  }
  return "?";
}

BOConfig base_config(const SuiteConfig& cfg) {
  BOConfig bo;
  bo.init_design_size = cfg.init_design_size;
  bo.iterations = cfg.effective_iterations();
  bo.ensemble = cfg.ensemble;
  bo.forest = cfg.forest;
  return bo;
}

MethodSpec bo_method(BOConfig bo) {
  MethodSpec m;
  m.label = short_name(bo.encoding) + "+" + short_name(bo.surrogate) + "+" + short_name(bo.acquisition) + "+" +
            short_name(bo.optimizer);
  m.bo = bo;
  return m;
}

int budget_of(const SuiteConfig& cfg) { return cfg.init_design_size + cfg.effective_iterations(); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int thread_count(const SuiteConfig& cfg, std::size_t cells) {
  int n = cfg.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("NAS_ABLATE_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(n, static_cast<int>(cells)));
}

class ArtifactWriter {
 public:
  ArtifactWriter(const SuiteConfig& cfg, SuiteResult& result) : cfg_(cfg), result_(result) {}

  void write(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
    const fs::path path = fs::path(cfg_.output_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    CsvWriter csv(out);
    csv.comment("nas_ablate version=" + std::string(kToolVersion) + " config_hash=" + hex64(cfg_.hash()) +
                " suite=" + to_string(cfg_.suite));
    csv.row(header);
    for (const auto& r : rows) csv.row(r);
    if (!out) throw std::runtime_error("failed writing " + path.string());
    result_.artifacts.push_back(name);
  }

 private:
  const SuiteConfig& cfg_;
  SuiteResult& result_;
};

std::vector<std::string> method_factor_columns(const MethodSpec& m) {
  if (m.kind != MethodKind::bo) return {"NA", "NA", "NA", "NA"};
  return {to_string(m.bo.encoding), to_string(m.bo.surrogate), to_string(m.bo.acquisition),
          to_string(m.bo.optimizer)};
}

}  // namespace

std::vector<MethodSpec> suite_methods(const SuiteConfig& cfg) {
  const BOConfig base = base_config(cfg);
  std::vector<MethodSpec> methods;
  switch (cfg.suite) {
    case SuiteKind::ablation: {
      const std::pair<EncodingKind, SurrogateKind> combos[] = {{EncodingKind::path, SurrogateKind::nn_ensemble},
                                                               {EncodingKind::path, SurrogateKind::rf},
                                                               {EncodingKind::tabular, SurrogateKind::rf}};
      for (const auto& [encoding, surrogate] : combos) {
        for (AcquisitionKind acq : {AcquisitionKind::its, AcquisitionKind::ei, AcquisitionKind::const_mean}) {
          for (OptimizerKind opt : {OptimizerKind::mut, OptimizerKind::rs}) {
            BOConfig bo = base;
            bo.encoding = encoding;
            bo.surrogate = surrogate;
            bo.acquisition = acq;
            bo.optimizer = opt;
            MethodSpec m = bo_method(bo);
            m.factorial = true;
            methods.push_back(m);
          }
        }
      }
      for (int k : {1, 10}) {
        BOConfig bo = base;
        bo.encoding = EncodingKind::path;
        bo.surrogate = SurrogateKind::nn_ensemble;
        bo.acquisition = AcquisitionKind::its;
        bo.optimizer = OptimizerKind::mut;
        bo.refit_every_k = k;
        MethodSpec m = bo_method(bo);
        m.label = "BANANAS (k=" + std::to_string(k) + ")";
        methods.push_back(m);
      }
      MethodSpec ls;
      ls.label = "LS";
      ls.kind = MethodKind::local_search;
      methods.push_back(ls);
      MethodSpec rs;
      rs.label = "Random";
      rs.kind = MethodKind::random_search;
      methods.push_back(rs);
      break;
    }
    case SuiteKind::optimizer_compare:
      for (OptimizerKind opt : {OptimizerKind::mut, OptimizerKind::rs, OptimizerKind::rs_plus}) {
        BOConfig bo = base;
        bo.optimizer = opt;
        MethodSpec m = bo_method(bo);
        m.shadows = opt == OptimizerKind::rs_plus;
        methods.push_back(m);
      }
      break;
    case SuiteKind::probe:
      methods.push_back(bo_method(base));
      break;
  }
  return methods;
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& method, int replication) {
  return derive_seed(derive_seed(master, method), static_cast<std::uint64_t>(replication));
}

SuiteResult run_suite(const SuiteConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SpecPtr spec = make_spec(cfg.space());
  const int replications = cfg.effective_replications();
  const int budget = budget_of(cfg);
  const std::vector<MethodSpec> methods = suite_methods(cfg);

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    throw std::invalid_argument("output directory is not writable: " + cfg.output_dir);
  }

  SuiteResult result;

  std::shared_ptr<const PathTable> paths;
  const bool needs_paths = std::any_of(methods.begin(), methods.end(), [](const MethodSpec& m) {
    return m.kind == MethodKind::bo && m.bo.encoding == EncodingKind::path;
  });
  if (needs_paths) {
    Rng path_rng(derive_seed(cfg.seed, "path-table"));
    paths = std::make_shared<const PathTable>(build_path_table(spec, cfg.truncation, path_rng));
  }

  // Initial designs: one per replication in the ablation, a single shared one
  // for the other suites.
  std::vector<std::vector<Architecture>> designs;
  for (int rep = 0; rep < replications; ++rep) {
    if (cfg.suite == SuiteKind::ablation) {
      designs.push_back(uniform_design(spec, cfg.init_design_size,
                                       derive_seed(derive_seed(cfg.seed, "design"), static_cast<std::uint64_t>(rep))));
    } else if (rep == 0) {
      designs.push_back(uniform_design(spec, cfg.init_design_size, derive_seed(cfg.seed, "design")));
    } else {
      designs.push_back(designs.front());
    }
  }

  std::unique_ptr<Benchmark> benchmark;
  std::string bridge_startup_error;
  if (cfg.benchmark == BenchmarkKind::bridge) {
    try {
      benchmark = std::make_unique<BridgeBenchmark>(std::make_shared<BridgeClient>(cfg.bridge_command));
    } catch (const BridgeError& e) {
      bridge_startup_error = e.what();
    }
  } else {
    benchmark = std::make_unique<SyntheticBenchmark>(std::make_shared<const SyntheticOracle>(spec, cfg.oracle));
  }

  for (const auto& m : methods) {
    for (int rep = 0; rep < replications; ++rep) {
      CellResult cell;
      cell.method = m.label;
      cell.replication = rep;
      cell.seed = cell_seed(cfg.seed, m.label, rep);
      result.cells.push_back(std::move(cell));
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> bridge_down{!bridge_startup_error.empty()};
  auto worker = [&] {
    while (!bridge_down.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      CellResult& cell = result.cells[i];
      const MethodSpec& m = methods[i / static_cast<std::size_t>(replications)];
      RunSettings settings{spec, paths, cell.seed, m.label, cell.replication, std::nullopt};
      try {
        switch (m.kind) {
          case MethodKind::bo:
            settings.initial_design = designs[static_cast<std::size_t>(cell.replication)];
            if (cfg.suite == SuiteKind::probe) {
              ProbeRun run = probe_edit_distance(m.bo, *benchmark, settings);
              cell.history = std::move(run.history);
              cell.probe = std::move(run.records);
            } else if (m.shadows) {
              ShadowRun run = run_rs_plus_with_shadows(m.bo, *benchmark, settings);
              cell.history = std::move(run.history);
              cell.shadows = std::move(run.shadows);
            } else {
              cell.history = run_bo(m.bo, *benchmark, settings);
            }
            break;
          case MethodKind::local_search:
            cell.history = run_local_search(*benchmark, settings, budget);
            break;
          case MethodKind::random_search:
            cell.history = run_random_search(*benchmark, settings, budget);
            break;
        }
      } catch (const std::exception& e) {
        cell.history.valid = false;
        cell.history.failure = e.what();
      }
      cell.ran = true;
      if (cell.history.bridge_failure) bridge_down = true;
    }
  };
  const int threads = thread_count(cfg, result.cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Evaluation-budget parity across every completed cell.
  for (const auto& cell : result.cells) {
    if (cell.ran && cell.history.valid && cell.history.evaluations != static_cast<std::uint64_t>(budget)) {
      throw std::logic_error("evaluation budget mismatch in " + cell.method + " replication " +
                             std::to_string(cell.replication) + ": " + std::to_string(cell.history.evaluations) +
                             " != " + std::to_string(budget));
    }
  }

  auto complete = [](const CellResult& c) { return c.ran && c.history.valid; };
  const std::string suite_name = to_string(cfg.suite);
  ArtifactWriter writer(cfg, result);

  // runs.csv
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      const CellResult& cell = result.cells[i];
      if (!complete(cell)) continue;
      const auto factors = method_factor_columns(methods[i / static_cast<std::size_t>(replications)]);
      for (const auto& t : cell.history.trials) {
        rows.push_back({suite_name, cell.method, factors[0], factors[1], factors[2], factors[3],
                        std::to_string(cell.replication), std::to_string(t.iteration), t.architecture.to_string(),
                        format_double(t.true_accuracy), format_double(t.incumbent_accuracy_after),
                        std::to_string(cell.seed)});
      }
    }
    writer.write("runs.csv",
                 {"suite", "method", "encoding", "surrogate", "acqf", "acqopt", "replication", "iteration",
                  "proposed_arch", "proposed_acc", "incumbent_acc", "seed"},
                 rows);
  }

  // curves.csv
  {
    std::vector<RunTrace> traces;
    for (const auto& cell : result.cells) {
      if (!complete(cell)) continue;
      RunTrace trace{cell.method, cell.replication, {}};
      for (const auto& t : cell.history.trials) trace.incumbent.push_back(t.incumbent_accuracy_after);
      traces.push_back(std::move(trace));
    }
    result.curves = summarize_runs(traces);
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : result.curves) {
      rows.push_back({c.method, std::to_string(c.iteration), format_double(c.mean), format_double(c.se),
                      format_double(c.q025), format_double(c.q975), std::to_string(c.replications)});
    }
    writer.write("curves.csv", {"method", "iteration", "mean", "se", "q025", "q975", "replications"}, rows);
  }

  // Final incumbent per method (method order), for the summary and ANOVAs.
  std::vector<std::pair<std::string, std::vector<double>>> finals;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto mi = i / static_cast<std::size_t>(replications);
    if (finals.size() <= mi) finals.push_back({methods[mi].label, {}});
    if (complete(result.cells[i])) finals[mi].second.push_back(result.cells[i].history.final_incumbent_accuracy());
  }

  if (cfg.suite == SuiteKind::ablation) {
    FactorialData data;
    data.factor_names = {"encoding", "surrogate", "acquisition", "optimizer"};
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      const MethodSpec& m = methods[i / static_cast<std::size_t>(replications)];
      if (!m.factorial || !complete(result.cells[i])) continue;
      data.add(method_factor_columns(m), result.cells[i].history.final_incumbent_accuracy());
    }
    std::vector<std::vector<std::string>> rows;
    try {
      result.anova = anova_typeII(data);
      for (const auto& r : result.anova->rows) {
        rows.push_back({r.term, format_double(r.sum_sq), std::to_string(r.df), format_double(r.f_value),
                        format_double(r.p_value)});
      }
    } catch (const std::invalid_argument& e) {
      log << "anova skipped: " << e.what() << '\n';
    }
    writer.write("anova.csv", {"term", "Sum Sq", "Df", "F value", "Pr(>F)"}, rows);

    // One-way ANOVA over the best factorial algorithms by mean final accuracy.
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      if (methods[mi].factorial && finals[mi].second.size() >= 2) ranked.push_back({-mean(finals[mi].second), mi});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    rows.clear();
    if (ranked.size() >= 2) {
      std::vector<std::vector<double>> groups;
      for (std::size_t r = 0; r < std::min(kOnewayTopMethods, ranked.size()); ++r) {
        groups.push_back(finals[ranked[r].second].second);
        result.oneway_methods.push_back(methods[ranked[r].second].label);
      }
      result.oneway = anova_oneway(groups);
      std::string joined;
      for (const auto& label : result.oneway_methods) joined += (joined.empty() ? "" : ";") + label;
      rows.push_back({joined, format_double(result.oneway->f_value), std::to_string(result.oneway->df_between),
                      std::to_string(result.oneway->df_within), format_double(result.oneway->p_value)});
    }
    writer.write("oneway.csv", {"methods", "F", "df1", "df2", "p"}, rows);
  }

  if (cfg.suite == SuiteKind::optimizer_compare) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& cell : result.cells) {
      if (!complete(cell)) continue;
      for (const auto& s : cell.shadows) {
        rows.push_back({std::to_string(s.replication), std::to_string(s.iteration), to_string(s.optimizer),
                        format_double(s.ei), format_double(s.true_accuracy), format_double(s.incumbent_accuracy),
                        s.improved() ? "1" : "0"});
      }
    }
    writer.write("shadow.csv", {"replication", "iteration", "optimizer", "ei", "true_acc", "incumbent_acc", "improved"},
                 rows);
  }

  if (cfg.suite == SuiteKind::probe) {
    std::vector<ProbeRecord> all;
    std::vector<std::vector<std::string>> rows;
    for (const auto& cell : result.cells) {
      if (!complete(cell)) continue;
      for (const auto& p : cell.probe) {
        all.push_back(p);
        rows.push_back({std::to_string(p.replication), std::to_string(p.edit_distance), std::to_string(p.test_index),
                        format_double(p.predicted_mean), format_double(p.predicted_sd),
                        format_double(p.true_accuracy), format_double(p.ei), format_double(p.improvement()),
                        p.improved() ? "1" : "0", format_double(p.incumbent_accuracy)});
      }
    }
    writer.write("probe.csv",
                 {"replication", "edit_distance", "test_index", "predicted_mean", "predicted_sd", "true_acc", "ei",
                  "improvement", "improved", "incumbent_acc"},
                 rows);
    result.probe_summary = summarize_probe(all);
    rows.clear();
    for (const auto& s : result.probe_summary) {
      rows.push_back({std::to_string(s.edit_distance), std::to_string(s.replications), std::to_string(s.tau_missing),
                      format_double(s.mean_tau), format_double(s.tau_q025), format_double(s.tau_q975),
                      format_double(s.mean_true_accuracy), format_double(s.true_q025), format_double(s.true_q975),
                      format_double(s.mean_ei), format_double(s.ei_q025), format_double(s.ei_q975),
                      format_double(s.mean_improvement), format_double(s.improvement_q025),
                      format_double(s.improvement_q975)});
    }
    writer.write("probe_summary.csv",
                 {"edit_distance", "replications", "tau_missing", "mean_tau", "tau_q025", "tau_q975", "mean_true_acc",
                  "true_q025", "true_q975", "mean_ei", "ei_q025", "ei_q975", "mean_improvement", "improvement_q025",
                  "improvement_q975"},
                 rows);
  }

  // Failure manifest; header only when every cell completed.
  bool any_bridge = !bridge_startup_error.empty();
  bool any_failed = false;
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& cell : result.cells) {
      if (complete(cell)) continue;
      any_failed = true;
      any_bridge = any_bridge || cell.history.bridge_failure;
      std::string reason = !cell.ran ? (bridge_startup_error.empty() ? "not run: bridge failed" : bridge_startup_error)
                                     : cell.history.failure;
      rows.push_back({cell.method, std::to_string(cell.replication), std::to_string(cell.seed), reason});
    }
    writer.write("failures.csv", {"method", "replication", "seed", "reason"}, rows);
  }
  result.exit_code = any_bridge ? kExitBridge : any_failed ? kExitPartial : kExitOk;

  log << "suite " << suite_name << ": " << methods.size() << " methods x " << replications << " replications, "
      << budget << " evaluations each\n";
  log << std::left << std::setw(28) << "method" << std::right << std::setw(6) << "runs" << std::setw(12) << "final"
      << std::setw(12) << "se" << '\n';
  for (const auto& [label, values] : finals) {
    log << std::left << std::setw(28) << label << std::right << std::setw(6) << values.size();
    if (values.empty()) {
      log << std::setw(12) << "NA" << std::setw(12) << "NA" << '\n';
    } else {
      log << std::fixed << std::setprecision(5) << std::setw(12) << mean(values) << std::setw(12)
          << standard_error(values) << '\n';
      log.unsetf(std::ios::floatfield);
    }
  }
  if (result.anova) {
    log << "Type II ANOVA (final incumbent accuracy)\n";
    for (const auto& r : result.anova->rows) {
      log << "  " << std::left << std::setw(12) << r.term << std::right << " SS=" << format_double(r.sum_sq)
          << " df=" << r.df << " F=" << format_double(r.f_value) << " p=" << format_double(r.p_value) << '\n';
    }
  }
  if (result.oneway) {
    log << "one-way ANOVA, top " << result.oneway_methods.size() << ": F(" << result.oneway->df_between << ", "
        << result.oneway->df_within << ") = " << format_double(result.oneway->f_value)
        << ", p = " << format_double(result.oneway->p_value) << '\n';
  }
  if (any_failed) log << "failed cells listed in failures.csv\n";
  return result;
}

}  // namespace nasbo
