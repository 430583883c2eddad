#include "nasbo/bo_engine.hpp"

#include <chrono>
#include <stdexcept>

namespace nasbo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Rng round_stream(std::uint64_t seed, std::string_view label, int round) {
  return Rng(derive_seed(derive_seed(seed, label), static_cast<std::uint64_t>(round)));
}

/// Appends trials and keeps the incumbent trace.
class Recorder {
 public:
  Recorder(History& history, const RunSettings& settings) : history_(history), settings_(settings) {}

  /// Evaluates on the benchmark; returns false (and marks the history
  /// invalid) when the benchmark fails.
  bool evaluate(Benchmark& benchmark, const Architecture& arch, std::optional<double> acquisition) {
    const auto start = Clock::now();
    double accuracy = 0.0;
    try {
      accuracy = benchmark.evaluate(arch);
    } catch (const BridgeError& e) {
      fail(e.what(), true);
      return false;
    } catch (const std::exception& e) {
      fail(e.what(), false);
      return false;
    }
    ++history_.evaluations;
    TrialRecord record{static_cast<int>(history_.trials.size()) + 1,
                       arch,
                       accuracy,
                       history_.trials.empty() ? accuracy
                                               : std::max(accuracy, history_.trials.back().incumbent_accuracy_after),
                       acquisition,
                       settings_.method,
                       settings_.replication,
                       settings_.seed};
    if (history_.trials.empty() || accuracy > history_.trials[best_].true_accuracy) {
      best_ = history_.trials.size();
    }
    history_.trials.push_back(std::move(record));
    history_.wall_clock_seconds.push_back(seconds_since(start));
    return true;
  }

  const TrialRecord& incumbent() const { return history_.trials.at(best_); }

  void fail(const std::string& what, bool bridge) {
    history_.valid = false;
    history_.bridge_failure = bridge;
    history_.failure = what;
  }

 private:
  History& history_;
  const RunSettings& settings_;
  std::size_t best_ = 0;
};

}  // namespace

void BOConfig::validate() const {
  if (surrogate == SurrogateKind::nn_ensemble && encoding != EncodingKind::path) {
    throw std::invalid_argument("BO config: the NN ensemble requires the path encoding");
  }
  if (refit_every_k < 1) throw std::invalid_argument("BO config: refit_every_k must be >= 1");
  if (init_design_size < 1) throw std::invalid_argument("BO config: initial design must be non-empty");
  if (iterations < 0) throw std::invalid_argument("BO config: iterations must be >= 0");
  if (surrogate == SurrogateKind::rf && init_design_size < 2) {
    throw std::invalid_argument("BO config: the forest needs at least two initial points");
  }
  ensemble.validate();
  forest.validate();
}

ProposalBudget BOConfig::budget() const {
  ProposalBudget budget = ProposalBudget::defaults(optimizer);
  if (n_candidates > 0) budget.n_candidates = n_candidates;
  return budget;
}

std::size_t History::incumbent_index() const {
  if (trials.empty()) throw std::logic_error("history: no trials");
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].true_accuracy > trials[best].true_accuracy) best = i;
  }
  return best;
}

double History::final_incumbent_accuracy() const {
  if (trials.empty()) throw std::logic_error("history: no trials");
  return trials.back().incumbent_accuracy_after;
}

std::unique_ptr<SurrogateModel> fit_surrogate(const BOConfig& cfg, const TrainingSet& data, Rng& rng) {
  if (cfg.surrogate == SurrogateKind::nn_ensemble) {
    return std::make_unique<EnsembleModel>(fit_ensemble(data, cfg.ensemble, rng));
  }
  return std::make_unique<ForestModel>(fit_forest(data, cfg.forest, rng));
}

Encoder make_encoder(const BOConfig& cfg, const RunSettings& settings) {
  if (cfg.encoding == EncodingKind::path) {
    if (!settings.path_table) throw std::invalid_argument("path encoding requires a path table");
    return Encoder::path(settings.path_table);
  }
  return Encoder::tabular(settings.spec);
}

TrainingSet training_set(const History& history, const Encoder& encoder) {
  TrainingSet data(encoder.schema());
  std::vector<double> row(encoder.width());
  for (const auto& trial : history.trials) {
    encoder.encode(trial.architecture, row);
    data.add(row, trial.true_accuracy);
  }
  return data;
}

std::vector<Architecture> uniform_design(const SpecPtr& spec, int size, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "initial-design"));
  std::vector<Architecture> design;
  design.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) design.push_back(sample_uniform(spec, rng));
  return design;
}

History run_bo(const BOConfig& cfg, Benchmark& benchmark, const RunSettings& settings,
               std::vector<ShadowRecord>* shadows) {
  cfg.validate();
  if (shadows != nullptr && cfg.optimizer != OptimizerKind::rs_plus) {
    throw std::invalid_argument("shadow proposals are recorded for RS+-driven runs only");
  }
  History history;
  Recorder recorder(history, settings);

  const std::vector<Architecture> design = settings.initial_design
                                               ? *settings.initial_design
                                               : uniform_design(settings.spec, cfg.init_design_size, settings.seed);
  if (static_cast<int>(design.size()) != cfg.init_design_size) {
    throw std::invalid_argument("pinned initial design has the wrong size");
  }
  for (const auto& arch : design) {
    if (!recorder.evaluate(benchmark, arch, std::nullopt)) return history;
  }

  const Encoder encoder = make_encoder(cfg, settings);
  TrainingSet data(encoder.schema());
  std::vector<double> row(encoder.width());
  for (const auto& trial : history.trials) {
    encoder.encode(trial.architecture, row);
    data.add(row, trial.true_accuracy);
  }

  std::unique_ptr<SurrogateModel> model;
  std::size_t model_rows = 0;
  const ProposalBudget budget = cfg.budget();
  for (int round = 1; round <= cfg.iterations; ++round) {
    if ((round - 1) % cfg.refit_every_k == 0) {
      Rng model_rng = round_stream(settings.seed, "model", round);
      model = fit_surrogate(cfg, data, model_rng);
      model_rows = data.size();
      history.refit_rounds.push_back(round);
    }
    history.training_sizes.push_back(model_rows);

    const TrialRecord& incumbent = recorder.incumbent();
    const double y_max = incumbent.true_accuracy;
    const Architecture incumbent_arch = incumbent.architecture;
    Rng acq_rng = round_stream(settings.seed, "acquisition", round);
    Rng opt_rng = round_stream(settings.seed, "optimizer", round);
    const ScoringContext scoring{*model, encoder, cfg.acquisition, {y_max, &acq_rng}};
    const Proposal proposal = propose(cfg.optimizer, incumbent_arch, settings.spec, scoring, budget, opt_rng);

    if (!recorder.evaluate(benchmark, proposal.architecture, proposal.acquisition_value)) return history;
    const double accuracy = history.trials.back().true_accuracy;
    encoder.encode(proposal.architecture, row);
    data.add(row, accuracy);

    if (shadows != nullptr) {
      shadows->push_back({settings.replication, round, cfg.optimizer, acq_ei(proposal.prediction, y_max), accuracy,
                          y_max});
      ShadowStreams streams{round_stream(settings.seed, "shadow-mut-candidates", round),
                            round_stream(settings.seed, "shadow-mut-acquisition", round),
                            round_stream(settings.seed, "shadow-rs-candidates", round),
                            round_stream(settings.seed, "shadow-rs-acquisition", round)};
      const auto shadow = shadow_propose(incumbent_arch, settings.spec, *model, encoder, cfg.acquisition, y_max, streams);
      for (const Proposal& p : shadow) {
        double shadow_accuracy = 0.0;
        try {
          shadow_accuracy = benchmark.evaluate(p.architecture);
        } catch (const BridgeError& e) {
          recorder.fail(e.what(), true);
          return history;
        } catch (const std::exception& e) {
          recorder.fail(e.what(), false);
          return history;
        }
        shadows->push_back({settings.replication, round, p.optimizer_kind, acq_ei(p.prediction, y_max),
                            shadow_accuracy, y_max});
      }
    }
  }
  return history;
}

History run_local_search(Benchmark& benchmark, const RunSettings& settings, int budget_evals) {
  if (budget_evals < 1) throw std::invalid_argument("local search: budget must be >= 1");
  History history;
  Recorder recorder(history, settings);
  Rng rng(derive_seed(settings.seed, "local-search"));

  auto evaluations = [&] { return static_cast<int>(history.trials.size()); };
  Architecture current = sample_uniform(settings.spec, rng);
  if (!recorder.evaluate(benchmark, current, std::nullopt)) return history;
  double current_accuracy = history.trials.back().true_accuracy;

  while (evaluations() < budget_evals) {
    std::vector<Architecture> candidates = neighbors(current);
    shuffle(candidates, rng);
    bool moved = false;
    std::size_t visited = 0;
    for (const auto& candidate : candidates) {
      if (evaluations() >= budget_evals) break;
      if (!recorder.evaluate(benchmark, candidate, std::nullopt)) return history;
      ++visited;
      const double accuracy = history.trials.back().true_accuracy;
      if (accuracy > current_accuracy) {
        current = candidate;
        current_accuracy = accuracy;
        moved = true;
        break;
      }
    }
    if (moved) continue;
    if (visited < candidates.size()) break;  // budget ran out mid-neighbourhood
    history.local_optima.push_back(current);
    if (evaluations() >= budget_evals) break;
    current = sample_uniform(settings.spec, rng);
    if (!recorder.evaluate(benchmark, current, std::nullopt)) return history;
    current_accuracy = history.trials.back().true_accuracy;
  }
  return history;
}

History run_random_search(Benchmark& benchmark, const RunSettings& settings, int budget_evals) {
  if (budget_evals < 1) throw std::invalid_argument("random search: budget must be >= 1");
  History history;
  Recorder recorder(history, settings);
  Rng rng(derive_seed(settings.seed, "random-search"));
  for (int i = 0; i < budget_evals; ++i) {
    if (!recorder.evaluate(benchmark, sample_uniform(settings.spec, rng), std::nullopt)) break;
  }
  return history;
}

ShadowRun run_rs_plus_with_shadows(const BOConfig& cfg, Benchmark& benchmark, const RunSettings& settings) {
  if (cfg.encoding != EncodingKind::tabular || cfg.surrogate != SurrogateKind::rf ||
      cfg.acquisition != AcquisitionKind::ei || cfg.optimizer != OptimizerKind::rs_plus) {
    throw std::invalid_argument("shadow runs use Tabular + RF + EI + RS+");
  }
  ShadowRun run;
  run.history = run_bo(cfg, benchmark, settings, &run.shadows);
  return run;
}

}  // namespace nasbo
