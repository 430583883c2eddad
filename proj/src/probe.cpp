#include "nasbo/probe.hpp"

#include <limits>
#include <map>

#include "nasbo/analysis.hpp"

namespace nasbo {

ProbeRun probe_edit_distance(const BOConfig& cfg, Benchmark& benchmark, const RunSettings& settings) {
  ProbeRun run;
  run.history = run_bo(cfg, benchmark, settings);
  if (!run.history.valid) return run;

  const TrialRecord& incumbent = run.history.trials[run.history.incumbent_index()];
  const double y_max = incumbent.true_accuracy;
  const Encoder encoder = make_encoder(cfg, settings);
  Rng model_rng(derive_seed(settings.seed, "probe-model"));
  const auto model = fit_surrogate(cfg, training_set(run.history, encoder), model_rng);

  const int mutable_count = static_cast<int>(mutable_parameters(*settings.spec).size());
  Rng rng(derive_seed(settings.seed, "probe-mutants"));
  for (int d = 1; d <= kProbeMaxDistance; ++d) {
    if (d > mutable_count) {
      run.skipped_distances.push_back(d);
      continue;
    }
    std::vector<Architecture> tests;
    tests.reserve(kProbeTestArchitectures);
    for (int i = 0; i < kProbeTestArchitectures; ++i) tests.push_back(mutate(incumbent.architecture, rng, d));
    const FeatureMatrix x = encoder.encode_all(tests);
    std::vector<PosteriorPrediction> predictions(tests.size());
    model->predict(x, predictions);
    for (std::size_t i = 0; i < tests.size(); ++i) {
      double accuracy = 0.0;
      try {
        accuracy = benchmark.evaluate(tests[i]);
      } catch (const BridgeError& e) {
        run.history.valid = false;
        run.history.bridge_failure = true;
        run.history.failure = e.what();
        return run;
      } catch (const std::exception& e) {
        run.history.valid = false;
        run.history.failure = e.what();
        return run;
      }
      run.records.push_back({settings.replication, d, static_cast<int>(i), predictions[i].mean, predictions[i].sd,
                             accuracy, acq_ei(predictions[i], y_max), y_max});
    }
  }
  return run;
}

std::optional<double> probe_tau(std::span<const ProbeRecord> group) {
  std::vector<double> predicted;
  std::vector<double> truth;
  for (const auto& r : group) {
    predicted.push_back(r.predicted_mean);
    truth.push_back(r.true_accuracy);
  }
  if (predicted.size() < 2) return std::nullopt;
  return kendall_tau(predicted, truth);
}

std::vector<ProbeSummary> summarize_probe(std::span<const ProbeRecord> records) {
  std::map<int, std::map<int, std::vector<ProbeRecord>>> groups;  // distance -> replication -> records
  for (const auto& r : records) groups[r.edit_distance][r.replication].push_back(r);

  std::vector<ProbeSummary> out;
  for (const auto& [d, by_rep] : groups) {
    ProbeSummary s;
    s.edit_distance = d;
    s.replications = static_cast<int>(by_rep.size());
    std::vector<double> taus;
    std::vector<double> truth;
    std::vector<double> ei;
    std::vector<double> improvement;
    for (const auto& [rep, group] : by_rep) {
      if (const auto tau = probe_tau(group)) {
        taus.push_back(*tau);
      } else {
        ++s.tau_missing;
      }
      for (const auto& r : group) {
        truth.push_back(r.true_accuracy);
        ei.push_back(r.ei);
        improvement.push_back(r.improvement());
      }
    }
    if (!taus.empty()) {
      s.mean_tau = mean(taus);
      s.tau_q025 = quantile(taus, 0.025);
      s.tau_q975 = quantile(taus, 0.975);
    } else {
      s.mean_tau = s.tau_q025 = s.tau_q975 = std::numeric_limits<double>::quiet_NaN();
    }
    s.mean_true_accuracy = mean(truth);
    s.true_q025 = quantile(truth, 0.025);
    s.true_q975 = quantile(truth, 0.975);
    s.mean_ei = mean(ei);
    s.ei_q025 = quantile(ei, 0.025);
    s.ei_q975 = quantile(ei, 0.975);
    s.mean_improvement = mean(improvement);
    s.improvement_q025 = quantile(improvement, 0.025);
    s.improvement_q975 = quantile(improvement, 0.975);
    out.push_back(s);
  }
  return out;
}

}  // namespace nasbo
