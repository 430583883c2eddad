#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nasbo/csv.hpp"

namespace fs = std::filesystem;
using namespace nasbo;

namespace {

const std::string kTool = NAS_ABLATE_PATH;
const std::string kStub = BRIDGE_STUB_PATH;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nasbo_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kTool + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

const std::string kTiny = "--nodes 2 --ops a,b,c --truncation 16";

}  // namespace

TEST_CASE("ablation suite on a tiny space") {
  const auto out = scratch("ablation");
  REQUIRE(run("run --suite ablation --replications 1 --iterations 5 --seed 3 " + kTiny + " --out " + out.string()) ==
          0);
  for (const auto* f : {"runs.csv", "curves.csv", "anova.csv", "oneway.csv", "failures.csv"}) {
    CHECK(fs::exists(out / f));
    CHECK(first_line(out / f).rfind("# nas_ablate version=", 0) == 0);
  }
  const auto runs = read_csv_file((out / "runs.csv").string());
  CHECK(runs.header == std::vector<std::string>{"suite", "method", "encoding", "surrogate", "acqf", "acqopt",
                                                "replication", "iteration", "proposed_arch", "proposed_acc",
                                                "incumbent_acc", "seed"});
  std::set<std::string> methods;
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto& r : runs.rows) {
    methods.insert(r[runs.column("method")]);
    cells.insert({r[runs.column("method")], r[runs.column("replication")]});
  }
  CHECK(methods.size() == 22);
  CHECK(cells.size() == 22);
  CHECK(methods.count("BANANAS (k=1)") == 1);
  CHECK(methods.count("BANANAS (k=10)") == 1);
  CHECK(methods.count("LS") == 1);
  CHECK(methods.count("Random") == 1);
  CHECK(methods.count("Tabular+RF+ConstMean+RS") == 1);
  // Budget parity: every cell has init design plus iterations rows.
  CHECK(runs.rows.size() == 22u * 15u);

  // Every seed is distinct per cell.
  std::set<std::string> seeds;
  for (const auto& r : runs.rows) seeds.insert(r[runs.column("seed")]);
  CHECK(seeds.size() == 22);

  const auto failures = read_csv_file((out / "failures.csv").string());
  CHECK(failures.rows.empty());

  REQUIRE(run("plots --out " + out.string()) == 0);
  CHECK(first_line(out / "fig1.dat") == "# method iteration mean se q025 q975");
}

TEST_CASE("identical configurations give identical bytes") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::string args = "run --suite ablation --replications 2 --iterations 3 --seed 17 " + kTiny + " --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  for (const auto* f : {"runs.csv", "curves.csv", "anova.csv", "oneway.csv", "failures.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto c = scratch("det_c");
  REQUIRE(run("run --suite ablation --replications 2 --iterations 3 --seed 18 " + kTiny + " --out " + c.string()) == 0);
  CHECK(slurp(a / "runs.csv") != slurp(c / "runs.csv"));
}

TEST_CASE("optimizer comparison writes shadow rows") {
  const auto out = scratch("compare");
  REQUIRE(run("run --suite optimizer_compare --replications 2 --iterations 3 " + kTiny + " --out " + out.string()) ==
          0);
  const auto shadow = read_csv_file((out / "shadow.csv").string());
  CHECK(shadow.header ==
        std::vector<std::string>{"replication", "iteration", "optimizer", "ei", "true_acc", "incumbent_acc", "improved"});
  CHECK(shadow.rows.size() == 3u * 3u * 2u);
  REQUIRE(run("plots --out " + out.string()) == 0);
  for (const auto* f : {"fig2a.dat", "fig2b.dat", "fig2c.dat", "fig2d.dat"}) CHECK(fs::exists(out / f));
  CHECK(first_line(out / "fig2d.dat") == "# replication iteration optimizer improvement no_improvement");
  std::ifstream d(out / "fig2d.dat");
  std::string line;
  std::getline(d, line);
  int rows = 0;
  while (std::getline(d, line)) {
    ++rows;
    const char flag = line.back();
    CHECK((flag == '0' || flag == '1'));
  }
  CHECK(rows == 18);
}

TEST_CASE("probe suite and its plots") {
  const auto out = scratch("probe");
  REQUIRE(run("run --suite probe --replications 2 --iterations 3 --out " + out.string()) == 0);
  const auto probe = read_csv_file((out / "probe.csv").string());
  CHECK(probe.rows.size() == 2u * 8u * 100u);
  const auto summary = read_csv_file((out / "probe_summary.csv").string());
  CHECK(summary.rows.size() == 8);
  REQUIRE(run("plots --out " + out.string()) == 0);
  CHECK(first_line(out / "fig3a.dat") == "# edit_distance mean_tau q025 q975");
  CHECK(fs::exists(out / "fig3b.dat"));
  CHECK(fs::exists(out / "fig3c.dat"));
}

TEST_CASE("plots on empty and incomplete artifact directories") {
  const auto empty = scratch("empty");
  fs::create_directories(empty);
  {
    std::ofstream f(empty / "runs.csv");
    f << "# nas_ablate version=0.1.0 config_hash=0000000000000000 suite=ablation\n";
    f << "suite,method,encoding,surrogate,acqf,acqopt,replication,iteration,proposed_arch,proposed_acc,"
         "incumbent_acc,seed\n";
  }
  REQUIRE(run("plots --out " + empty.string()) == 0);
  CHECK(fs::exists(empty / "fig1.dat"));
  CHECK(fs::file_size(empty / "fig1.dat") == 0);

  const auto partial = scratch("partial");
  REQUIRE(run("run --suite ablation --replications 1 --iterations 1 " + kTiny + " --out " + partial.string()) == 0);
  fs::remove(partial / "curves.csv");
  CHECK(run("plots --out " + partial.string()) != 0);
  const std::string cmd = kTool + " plots --out " + partial.string() + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  std::string message;
  while (fgets(buf, sizeof buf, pipe) != nullptr) message += buf;
  pclose(pipe);
  CHECK(message.find("curves.csv") != std::string::npos);
  CHECK(message.find("expected") != std::string::npos);

  CHECK(run("plots --out " + (fs::temp_directory_path() / "nasbo_cli" / "does-not-exist").string()) != 0);
}

TEST_CASE("exit codes") {
  const auto out = scratch("codes");
  CHECK(run("run --suite nonsense --out " + out.string()) == 1);
  CHECK(run("run --suite ablation --replications -2 --out " + out.string()) == 1);
  CHECK(run("run --suite ablation --benchmark bridge --out " + out.string()) == 1);  // no command
  CHECK(run("run --suite ablation --ops a --out " + out.string()) == 1);
  CHECK(run("run") == 1);

  const auto ok = scratch("bridge_ok");
  CHECK(run("run --suite ablation --replications 1 --iterations 2 " + kTiny + " --benchmark bridge --bridge-cmd '" +
            kStub + " echo' --out " + ok.string()) == 0);

  const auto dead = scratch("bridge_dead");
  CHECK(run("run --suite ablation --replications 1 --iterations 2 " + kTiny + " --benchmark bridge --bridge-cmd '" +
            kStub + " no-hello' --out " + dead.string()) == 3);

  const auto failing = scratch("bridge_error");
  CHECK(run("run --suite ablation --replications 1 --iterations 2 " + kTiny + " --benchmark bridge --bridge-cmd '" +
            kStub + " error' --out " + failing.string()) == 3);
  const auto failures = read_csv_file((failing / "failures.csv").string());
  CHECK(failures.rows.size() == 22);
  CHECK(fs::exists(failing / "runs.csv"));

  CHECK(run("paths --nodes 2 --ops a,b") == 0);
}
