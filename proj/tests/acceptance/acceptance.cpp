// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. The three experiment suites run at
// full acceptance scale, so expect tens of minutes on a single core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "nasbo/acq_optimizers.hpp"
#include "nasbo/analysis.hpp"
#include "nasbo/bo_engine.hpp"
#include "nasbo/suite.hpp"
#include "nasbo/surrogates.hpp"

namespace fs = std::filesystem;
using namespace nasbo;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

fs::path out_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "nasbo_acceptance" / name;
  fs::remove_all(p);
  return p;
}

SuiteResult run_logged(const SuiteConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream log;
  SuiteResult r = run_suite(cfg, log);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << log.str() << "[" << to_string(cfg.suite) << " finished in " << fmt(secs, 4) << " s]\n";
  return r;
}

std::vector<double> finals_of(const SuiteResult& r, const std::string& method) {
  std::vector<double> out;
  for (const auto& c : r.cells) {
    if (c.method == method && c.history.valid) out.push_back(c.history.final_incumbent_accuracy());
  }
  return out;
}

// ---------------------------------------------------------------------------

void optimizer_dominance() {
  SuiteConfig cfg;
  cfg.suite = SuiteKind::ablation;
  cfg.replications = 10;
  cfg.iterations = 60;
  cfg.output_dir = out_dir("ablation").string();
  const auto r = run_logged(cfg);
  if (!r.anova) {
    report(false, "optimizer dominance", "no ANOVA table produced");
    return;
  }
  std::vector<AnovaRow> terms(r.anova->rows.begin(), r.anova->rows.end() - 1);
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.sum_sq > b.sum_sq; });
  const double ratio = terms[0].sum_sq / terms[1].sum_sq;
  std::string detail;
  for (const auto& t : terms) detail += t.term + " SS=" + fmt(t.sum_sq, 4) + " ";
  detail += "| top/next = " + fmt(ratio, 4) + " (need optimizer first and >= 3)";
  report(r.exit_code == 0 && terms[0].term == "optimizer" && ratio >= 3.0, "optimizer dominance", detail);
}

void mut_beats_rs() {
  SuiteConfig cfg;
  cfg.suite = SuiteKind::optimizer_compare;
  cfg.replications = 10;
  cfg.iterations = 100;
  cfg.output_dir = out_dir("optimizer_compare").string();
  const auto r = run_logged(cfg);
  const auto mut = finals_of(r, "Tabular+RF+EI+Mut");
  const auto rs = finals_of(r, "Tabular+RF+EI+RS");
  const auto rsp = finals_of(r, "Tabular+RF+EI+RS+");
  // Standard error of a difference of independent means.
  auto pooled = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::sqrt(standard_error(a) * standard_error(a) + standard_error(b) * standard_error(b));
  };
  const double gap_rs = mean(mut) - mean(rs);
  const double gap_rsp = mean(mut) - mean(rsp);
  double ei_mut = 0, ei_rs = 0;
  int n_mut = 0, n_rs = 0;
  for (const auto& c : r.cells) {
    for (const auto& s : c.shadows) {
      if (s.optimizer == OptimizerKind::mut) ei_mut += s.ei, ++n_mut;
      if (s.optimizer == OptimizerKind::rs) ei_rs += s.ei, ++n_rs;
    }
  }
  ei_mut /= std::max(n_mut, 1);
  ei_rs /= std::max(n_rs, 1);
  const bool ok = r.exit_code == 0 && mut.size() == 10 && gap_rs > pooled(mut, rs) && gap_rsp > pooled(mut, rsp) &&
                  n_mut > 0 && ei_mut >= ei_rs;
  report(ok, "Mut > RS / RS+",
         "mean final Mut=" + fmt(mean(mut)) + " RS=" + fmt(mean(rs)) + " RS+=" + fmt(mean(rsp)) +
             "; Mut-RS=" + fmt(gap_rs, 3) + " vs SE " + fmt(pooled(mut, rs), 3) + "; Mut-RS+=" + fmt(gap_rsp, 3) +
             " vs SE " + fmt(pooled(mut, rsp), 3) + "; shadow EI Mut=" + fmt(ei_mut, 3) + " RS=" + fmt(ei_rs, 3));
}

void probe_trends() {
  SuiteConfig cfg;
  cfg.suite = SuiteKind::probe;
  cfg.replications = 30;
  cfg.iterations = 50;
  cfg.output_dir = out_dir("probe").string();
  const auto r = run_logged(cfg);
  bool complete = r.exit_code == 0 && r.probe_summary.size() == 8;
  std::string taus;
  for (const auto& s : r.probe_summary) {
    complete = complete && s.replications == 30;
    taus += "d" + std::to_string(s.edit_distance) + " tau=" + fmt(s.mean_tau, 3) + " [" + fmt(s.tau_q025, 3) +
            "," + fmt(s.tau_q975, 3) + "] ";
  }
  for (const auto* f : {"probe.csv", "probe_summary.csv"}) complete = complete && fs::exists(fs::path(cfg.output_dir) / f);
  if (!complete) {
    report(false, "probe trends", "report incomplete");
    return;
  }
  const double d1 = r.probe_summary.front().mean_true_accuracy;
  const double d8 = r.probe_summary.back().mean_true_accuracy;
  report(d1 > d8, "probe trends", "true acc d1=" + fmt(d1) + " d8=" + fmt(d8) + "; " + taus);
}

void ei_oracle() {
  Rng rng(20240611);
  const double y_max = 0.92;
  int inside = 0;
  double worst = 0;
  for (double gap : {-0.02, -0.01, 0.0, 0.01, 0.02}) {
    for (double sd : {0.01, 0.02, 0.03, 0.04, 0.05}) {
      const int n = 1000000;
      double s = 0, s2 = 0;
      for (int i = 0; i < n; ++i) {
        const double v = std::max(y_max + gap + sd * rng.normal() - y_max, 0.0);
        s += v;
        s2 += v * v;
      }
      const double m = s / n;
      const double se = std::sqrt((s2 / n - m * m) / (n - 1));
      const double z = std::abs(acq_ei({y_max + gap, sd}, y_max) - m) / se;
      worst = std::max(worst, z);
      inside += z <= 3.0;
    }
  }
  bool exact = true;
  for (double gap : {-0.03, -0.001, 0.0, 0.001, 0.03}) exact = exact && acq_ei({y_max + gap, 0.0}, y_max) == std::max(y_max + gap - y_max, 0.0);
  report(inside == 25 && exact, "EI oracle",
         std::to_string(inside) + "/25 grid points within 3 MC SE (worst " + fmt(worst, 3) + " SE); sigma=0 exact: " +
             (exact ? "yes" : "no"));
}

// Normal-equations RSS in effect coding, Gauss-Jordan on X'X.
double normal_equations_rss(const FactorialData& d, const std::vector<std::size_t>& factors) {
  std::vector<std::vector<std::string>> levels;
  for (std::size_t f : factors) {
    std::set<std::string> l;
    for (const auto& r : d.rows) l.insert(r.levels[f]);
    levels.emplace_back(l.begin(), l.end());
  }
  std::vector<std::vector<double>> x;
  for (const auto& r : d.rows) {
    std::vector<double> row{1.0};
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& l = levels[i];
      const auto at = static_cast<std::size_t>(std::find(l.begin(), l.end(), r.levels[factors[i]]) - l.begin());
      for (std::size_t j = 0; j + 1 < l.size(); ++j) row.push_back(at == l.size() - 1 ? -1.0 : (at == j ? 1.0 : 0.0));
    }
    x.push_back(row);
  }
  const std::size_t p = x[0].size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r][c] += x[i][r] * x[i][c];
      a[r][p] += x[i][r] * d.rows[i].response;
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double m = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= m * a[c][k];
    }
  }
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double fit = 0;
    for (std::size_t c = 0; c < p; ++c) fit += x[i][c] * a[c][p] / a[c][c];
    rss += (d.rows[i].response - fit) * (d.rows[i].response - fit);
  }
  return rss;
}

void anova_oracle() {
  double worst = 0;
  for (bool balanced : {true, false}) {
    FactorialData d;
    d.factor_names = {"encoding", "surrogate", "acquisition", "optimizer"};
    Rng rng(balanced ? 1 : 2);
    const std::vector<std::pair<std::string, std::string>> combos{{"Path", "NN"}, {"Path", "RF"}, {"Tabular", "RF"}};
    for (const auto& [enc, sur] : combos) {
      for (const std::string acq : {"ITS", "EI", "ConstMean"}) {
        for (const std::string opt : {"Mut", "RS"}) {
          // Mild imbalance: drop a replication from a few cells.
          const int reps = balanced ? 4 : 3 + static_cast<int>(rng.uniform_index(2));
          for (int k = 0; k < reps; ++k) {
            d.add({enc, sur, acq, opt}, 0.92 + (opt == "Mut" ? 0.004 : 0.0) + (acq == "ConstMean" ? -0.001 : 0.0) +
                                            (sur == "NN" ? 0.0015 : 0.0) + 0.002 * rng.normal());
          }
        }
      }
    }
    const auto t = anova_typeII(d);
    const double full = normal_equations_rss(d, {0, 1, 2, 3});
    worst = std::max(worst, std::abs(t.residuals().sum_sq - full));
    for (std::size_t f = 0; f < 4; ++f) {
      std::vector<std::size_t> others;
      for (std::size_t g = 0; g < 4; ++g) {
        if (g != f) others.push_back(g);
      }
      worst = std::max(worst, std::abs(t.term(d.factor_names[f]).sum_sq - (normal_equations_rss(d, others) - full)));
    }
  }
  std::vector<std::vector<double>> groups(7, std::vector<double>(20));
  Rng rng(3);
  for (auto& g : groups) {
    for (auto& v : g) v = 0.93 + 0.003 * rng.normal();
  }
  const auto ow = anova_oneway(groups);
  report(worst <= 1e-8 && ow.df_between == 6 && ow.df_within == 133, "ANOVA oracle",
         "max |SS - oracle| = " + fmt(worst, 3) + "; one-way df = (" + std::to_string(ow.df_between) + ", " +
             std::to_string(ow.df_within) + ")");
}

class ScoreSurrogate final : public SurrogateModel {
 public:
  explicit ScoreSurrogate(FeatureSchema s) : schema_(std::move(s)) {}
  const FeatureSchema& schema() const override { return schema_; }
  PosteriorPrediction predict(std::span<const double> row) const override {
    double v = 0;
    for (std::size_t i = 0; i < row.size(); ++i) v += std::sin(1.3 * row[i] + 0.7 * static_cast<double>(i));
    return {v, 0.01};
  }

 private:
  FeatureSchema schema_;
};

void combinatorial_oracles() {
  SearchSpaceSpec s;
  s.num_intermediate_nodes = 2;
  s.operations = {"a", "b", "c", "d"};
  const auto spec = make_spec(s);  // 4^4 * 3 = 768 architectures
  std::vector<Architecture> all;
  {
    const int n = parameter_count(*spec);
    std::vector<int> v(static_cast<std::size_t>(n), 0);
    while (true) {
      all.push_back(Architecture::from_parameters(spec, v));
      int i = n - 1;
      while (i >= 0 && ++v[static_cast<std::size_t>(i)] == parameter_levels(*spec, i)) v[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
    }
  }
  bool neighbors_ok = true;
  for (const auto& a : all) {
    std::set<std::string> brute, listed;
    for (const auto& b : all) {
      if (edit_distance(a, b) == 1) brute.insert(b.to_string());
    }
    for (const auto& b : neighbors(a)) listed.insert(b.to_string());
    neighbors_ok = neighbors_ok && brute == listed;
  }

  const auto enc = Encoder::tabular(spec);
  const ScoreSurrogate model(enc.schema());
  double best = -1e300;
  for (const auto& a : all) best = std::max(best, model.predict(enc.encode(a)).mean);
  bool rs_ok = true;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(seed);
    const auto p = propose_rs(spec, {model, enc, AcquisitionKind::const_mean, {}},
                              ProposalBudget::defaults(OptimizerKind::rs_plus), rng);
    rs_ok = rs_ok && p.acquisition_value == best;
  }

  SyntheticOracleConfig oc;
  auto oracle = std::make_shared<const SyntheticOracle>(spec, oc);
  SyntheticBenchmark bench(oracle);
  RunSettings rs;
  rs.spec = spec;
  rs.seed = 5;
  const auto h = run_local_search(bench, rs, 400);
  bool ls_ok = !h.local_optima.empty();
  for (const auto& opt : h.local_optima) {
    for (const auto& n : neighbors(opt)) ls_ok = ls_ok && oracle->evaluate(n) <= oracle->evaluate(opt);
  }
  report(neighbors_ok && rs_ok && ls_ok, "combinatorial oracles",
         std::string("neighbors on 768 architectures: ") + (neighbors_ok ? "match" : "MISMATCH") +
             "; RS+ maximizer: " + (rs_ok ? "found" : "MISSED") + "; " + std::to_string(h.local_optima.size()) +
             " local-search endpoints without improving neighbour: " + (ls_ok ? "yes" : "no"));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  bool ok = true;
  std::string detail;
  for (auto kind : {SuiteKind::ablation, SuiteKind::optimizer_compare, SuiteKind::probe}) {
    SuiteConfig cfg;
    cfg.suite = kind;
    cfg.replications = 2;
    cfg.iterations = 4;
    cfg.seed = 99;
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      cfg.output_dir = out_dir("det_" + to_string(kind) + "_" + tag).string();
      std::ostringstream log;
      run_suite(cfg, log);
      dirs.emplace_back(cfg.output_dir);
    }
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const bool same = slurp(entry.path()) == slurp(dirs[1] / entry.path().filename());
      if (!same) detail += entry.path().filename().string() + " differs; ";
      ok = ok && same;
    }
    detail += to_string(kind) + ": " + std::to_string(files) + " CSVs compared; ";
  }
  report(ok, "determinism", detail);
}

void ensemble_statistics() {
  double worst = 0;
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 2 + rng.uniform_index(9);
    std::vector<double> out(m);
    for (auto& v : out) v = 0.85 + 0.1 * rng.uniform01();
    double mean_hand = 0;
    for (double v : out) mean_hand += v;
    mean_hand /= static_cast<double>(m);
    double ss = 0;
    for (double v : out) ss += (v - mean_hand) * (v - mean_hand);
    const double sd_hand = std::sqrt(ss / static_cast<double>(m - 1));
    const auto p = combine_member_outputs(out);
    worst = std::max({worst, std::abs(p.mean - mean_hand), std::abs(p.sd - sd_hand)});
  }
  const std::vector<double> fixed{0.90, 0.92, 0.94};
  const auto p = combine_member_outputs(fixed);
  const bool example = std::abs(p.mean - 0.92) <= 1e-12 && std::abs(p.sd - 0.02) <= 1e-12;

  // A fitted ensemble reports exactly these statistics over its members.
  FeatureSchema schema;
  schema.levels.assign(6, 0);
  TrainingSet data(schema);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> row(6);
    for (auto& v : row) v = static_cast<double>(rng.uniform_index(2));
    data.add(row, 0.9 + 0.01 * row[0]);
  }
  EnsembleConfig ec;
  ec.layers = 3;
  ec.epochs = 50;
  Rng fit_rng(8);
  const auto model = fit_ensemble(data, ec, fit_rng);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto outs = model.member_outputs(data.x.row(i));
    const auto hand = combine_member_outputs(outs);
    const auto pred = model.predict(data.x.row(i));
    worst = std::max({worst, std::abs(pred.mean - hand.mean), std::abs(pred.sd - hand.sd)});
  }
  report(worst <= 1e-12 && example, "ensemble statistics", "max deviation " + fmt(worst, 3) + " (tolerance 1e-12)");
}

}  // namespace

int main() {
  ei_oracle();
  anova_oracle();
  combinatorial_oracles();
  ensemble_statistics();
  determinism();
  probe_trends();
  mut_beats_rs();
  optimizer_dominance();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
