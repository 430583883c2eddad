#pragma once

#include <string>
#include <vector>

namespace nasbo {

/// Writes whitespace-separated plot data next to the suite artifacts in `dir`
/// and returns the file names written. The suite is read from the runs.csv
/// metadata line.
///
///   fig1.dat   method iteration mean se q025 q975              (ablation)
///   fig2a.dat  method iteration mean se q025 q975              (optimizer_compare)
///   fig2b.dat  replication iteration optimizer ei
///   fig2c.dat  replication iteration optimizer relative_acc
///   fig2d.dat  replication iteration optimizer improvement no_improvement
///   fig3a.dat  edit_distance mean_tau q025 q975                (probe)
///   fig3b.dat  edit_distance mean_true_acc q025 q975
///   fig3c.dat  edit_distance mean_ei ei_q025 ei_q975 mean_improvement improvement_q025 improvement_q975
///
/// Strings are double-quoted, missing values are NA. An empty runs.csv yields
/// empty data files. Throws std::runtime_error listing the expected files when
/// an artifact is missing.
std::vector<std::string> emit_plots(const std::string& dir);

}  // namespace nasbo
