// nas_ablate: runs the ablation, optimizer comparison and edit-distance probe
// suites and turns their CSV artifacts into plot data.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nasbo/plots.hpp"
#include "nasbo/suite.hpp"

namespace {

std::vector<std::string> split_ops(const std::string& text) {
  std::vector<std::string> ops;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) ops.push_back(item);
  }
  return ops;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimisation NAS ablation runner"};
  app.require_subcommand(1);

  nasbo::SuiteConfig cfg;
  std::string suite = "ablation";
  std::string benchmark = "synthetic";
  std::string ops;
  auto* run = app.add_subcommand("run", "run one experiment suite");
  run->add_option("--suite", suite, "ablation | optimizer_compare | probe")->capture_default_str();
  run->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  run->add_option("--replications", cfg.replications, "replications (default: 20, probe 100)");
  run->add_option("--iterations", cfg.iterations, "BO iterations (default: 100, probe 50)");
  run->add_option("--benchmark", benchmark, "synthetic | bridge")->capture_default_str();
  run->add_option("--bridge-cmd", cfg.bridge_command, "command line of the benchmark bridge process");
  run->add_option("--out", cfg.output_dir, "output directory")->required();
  run->add_option("--nodes", cfg.nodes, "intermediate nodes per cell")->capture_default_str();
  run->add_option("--ops", ops, "comma-separated operation labels");
  run->add_option("--cells", cfg.cells, "cells per architecture")->capture_default_str();
  run->add_option("--truncation", cfg.truncation, "path encoding length")->capture_default_str();

  std::string plot_dir;
  auto* plots = app.add_subcommand("plots", "write plot data from suite artifacts");
  plots->add_option("--out", plot_dir, "directory holding the suite artifacts")->required();

  nasbo::SuiteConfig path_cfg;
  std::string path_ops;
  std::uint64_t path_seed = 0;
  auto* paths = app.add_subcommand("paths", "dump the ranked path table as CSV");
  paths->add_option("--seed", path_seed, "master seed")->capture_default_str();
  paths->add_option("--nodes", path_cfg.nodes)->capture_default_str();
  paths->add_option("--ops", path_ops);
  paths->add_option("--cells", path_cfg.cells)->capture_default_str();
  paths->add_option("--truncation", path_cfg.truncation)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nasbo::kExitConfig;
  }

  if (*run) {
    try {
      cfg.suite = nasbo::parse_suite_kind(suite);
      if (benchmark == "bridge") {
        cfg.benchmark = nasbo::BenchmarkKind::bridge;
      } else if (benchmark != "synthetic") {
        throw std::invalid_argument("unknown benchmark: " + benchmark);
      }
      if (!ops.empty()) cfg.operations = split_ops(ops);
      const nasbo::SuiteResult result = nasbo::run_suite(cfg, std::cout);
      return result.exit_code;
    } catch (const std::invalid_argument& e) {
      std::cerr << "configuration error: " << e.what() << '\n';
      return nasbo::kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return nasbo::kExitPartial;
    }
  }

  if (*plots) {
    try {
      for (const auto& f : nasbo::emit_plots(plot_dir)) std::cout << f << '\n';
      return nasbo::kExitOk;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return nasbo::kExitConfig;
    }
  }

  try {
    if (!path_ops.empty()) path_cfg.operations = split_ops(path_ops);
    const auto spec = nasbo::make_spec(path_cfg.space());
    nasbo::Rng rng(nasbo::derive_seed(path_seed, "path-table"));
    nasbo::build_path_table(spec, path_cfg.truncation, rng).write_csv(std::cout);
    return nasbo::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return nasbo::kExitConfig;
  }
}
