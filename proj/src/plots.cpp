#include "nasbo/plots.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "nasbo/csv.hpp"

namespace nasbo {

namespace fs = std::filesystem;

namespace {

std::string suite_of(const CsvTable& runs) {
  for (const auto& c : runs.comments) {
    const auto at = c.find("suite=");
    if (at == std::string::npos) continue;
    const auto end = c.find(' ', at);
    return c.substr(at + 6, end == std::string::npos ? std::string::npos : end - at - 6);
  }
  return {};
}

std::vector<std::string> expected_files(const std::string& suite) {
  if (suite == "ablation") return {"runs.csv", "curves.csv"};
  if (suite == "optimizer_compare") return {"runs.csv", "curves.csv", "shadow.csv"};
  if (suite == "probe") return {"runs.csv", "probe_summary.csv"};
  return {"runs.csv", "curves.csv", "shadow.csv (optimizer_compare)", "probe_summary.csv (probe)"};
}

std::vector<std::string> outputs_of(const std::string& suite) {
  if (suite == "ablation") return {"fig1.dat"};
  if (suite == "optimizer_compare") return {"fig2a.dat", "fig2b.dat", "fig2c.dat", "fig2d.dat"};
  if (suite == "probe") return {"fig3a.dat", "fig3b.dat", "fig3c.dat"};
  return {"fig1.dat", "fig2a.dat", "fig2b.dat", "fig2c.dat", "fig2d.dat", "fig3a.dat", "fig3b.dat", "fig3c.dat"};
}

[[noreturn]] void missing(const std::string& dir, const std::string& suite, const std::string& file) {
  std::string list;
  for (const auto& f : expected_files(suite)) list += (list.empty() ? "" : ", ") + f;
  throw std::runtime_error("missing artifact " + file + " in " + dir + "; expected: " + list);
}

CsvTable load(const std::string& dir, const std::string& suite, const std::string& name) {
  const fs::path path = fs::path(dir) / name;
  if (!fs::exists(path)) missing(dir, suite, name);
  return read_csv_file(path.string());
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

class DatFile {
 public:
  DatFile(const std::string& dir, const std::string& name, const std::string& columns)
      : out_(fs::path(dir) / name, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out_ << "# " << columns << '\n';
  }

  void line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? " " : "") << fields[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_curves(const std::string& dir, const std::string& suite, const std::string& name) {
  const CsvTable curves = load(dir, suite, "curves.csv");
  DatFile dat(dir, name, "method iteration mean se q025 q975");
  for (const auto& r : curves.rows) {
    dat.line({quoted(r[curves.column("method")]), r[curves.column("iteration")], r[curves.column("mean")],
              r[curves.column("se")], r[curves.column("q025")], r[curves.column("q975")]});
  }
}

void write_shadow_figures(const std::string& dir, const std::string& suite) {
  const CsvTable shadow = load(dir, suite, "shadow.csv");
  const auto rep = shadow.column("replication");
  const auto it = shadow.column("iteration");
  const auto opt = shadow.column("optimizer");
  const auto ei = shadow.column("ei");
  const auto acc = shadow.column("true_acc");
  const auto inc = shadow.column("incumbent_acc");
  DatFile b(dir, "fig2b.dat", "replication iteration optimizer ei");
  DatFile c(dir, "fig2c.dat", "replication iteration optimizer relative_acc");
  DatFile d(dir, "fig2d.dat", "replication iteration optimizer improvement no_improvement");
  for (const auto& r : shadow.rows) {
    const double rel = std::stod(r[acc]) - std::stod(r[inc]);
    b.line({r[rep], r[it], quoted(r[opt]), r[ei]});
    c.line({r[rep], r[it], quoted(r[opt]), format_double(rel)});
    d.line({r[rep], r[it], quoted(r[opt]), format_double(rel > 0 ? rel : 0.0), rel > 0 ? "0" : "1"});
  }
}

void write_probe_figures(const std::string& dir, const std::string& suite) {
  const CsvTable summary = load(dir, suite, "probe_summary.csv");
  auto col = [&](const std::vector<std::string>& row, const char* name) { return row[summary.column(name)]; };
  DatFile a(dir, "fig3a.dat", "edit_distance mean_tau q025 q975");
  DatFile b(dir, "fig3b.dat", "edit_distance mean_true_acc q025 q975");
  DatFile c(dir, "fig3c.dat",
            "edit_distance mean_ei ei_q025 ei_q975 mean_improvement improvement_q025 improvement_q975");
  for (const auto& r : summary.rows) {
    a.line({col(r, "edit_distance"), col(r, "mean_tau"), col(r, "tau_q025"), col(r, "tau_q975")});
    b.line({col(r, "edit_distance"), col(r, "mean_true_acc"), col(r, "true_q025"), col(r, "true_q975")});
    c.line({col(r, "edit_distance"), col(r, "mean_ei"), col(r, "ei_q025"), col(r, "ei_q975"),
            col(r, "mean_improvement"), col(r, "improvement_q025"), col(r, "improvement_q975")});
  }
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& dir) {
  const fs::path runs_path = fs::path(dir) / "runs.csv";
  if (!fs::exists(runs_path)) missing(dir, "", "runs.csv");
  const CsvTable runs = read_csv_file(runs_path.string());
  const std::string suite = suite_of(runs);

  if (runs.rows.empty()) {
    for (const auto& name : outputs_of(suite)) {
      std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    }
    return outputs_of(suite);
  }
  if (suite == "ablation") {
    write_curves(dir, suite, "fig1.dat");
  } else if (suite == "optimizer_compare") {
    // Load everything before writing so a missing file leaves nothing behind.
    load(dir, suite, "shadow.csv");
    write_curves(dir, suite, "fig2a.dat");
    write_shadow_figures(dir, suite);
  } else if (suite == "probe") {
    write_probe_figures(dir, suite);
  } else {
    throw std::runtime_error("runs.csv in " + dir + " has no suite metadata line");
  }
  return outputs_of(suite);
}

}  // namespace nasbo
