#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

fs::path scratch_root() {
  static fs::path root = [] {
    fs::path p = fs::temp_directory_path() / ("qsl_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return root;
}

RunResult run(const std::string& args) {
  fs::path log = scratch_root() / "out.txt";
  std::string cmd = std::string(QSL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  int st = std::system(cmd.c_str());
  RunResult r;
  r.code = (st >= 0 && WIFEXITED(st)) ? WEXITSTATUS(st) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double field(const std::string& text, const std::string& key) {
  auto pos = text.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::strtod(text.c_str() + pos + key.size() + 1, nullptr);
}

std::string line_with(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line;
  return "";
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("single-point compute prints the result fields") {
  RunResult r = run("compute --channel rtn --c 0.6 --state bloch:1,0,0 --method rp --tau 1");
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "tau_qsl") > 0.0);
  CHECK(field(r.out, "angle") > 0.0);
  CHECK(field(r.out, "degenerate") == 0.0);

  RunResult closed = run(
      "compute --channel rtn --c 0.6 --state bloch:1,0,0 --method rp --tau 1 --closed-form");
  REQUIRE(closed.code == 0);
  CHECK(field(closed.out, "tau_qsl") ==
        doctest::Approx(field(r.out, "tau_qsl")).epsilon(1e-9));
}

TEST_CASE("output is in kappa*tau units: scaling all rates together changes nothing") {
  RunResult unit = run("compute --channel nmad --lambda 0.1 --state bloch:1,0,0 --tau 2");
  RunResult scaled =
      run("compute --channel nmad --kappa 4 --lambda 0.4 --state bloch:1,0,0 --tau 2");
  REQUIRE(unit.code == 0);
  REQUIRE(scaled.code == 0);
  CHECK(field(unit.out, "tau_qsl") ==
        doctest::Approx(field(scaled.out, "tau_qsl")).epsilon(1e-9));
  CHECK(field(unit.out, "averaged_norm") ==
        doctest::Approx(field(scaled.out, "averaged_norm")).epsilon(1e-9));
}

TEST_CASE("grid sweep writes a csv with the expected shape") {
  fs::path dir = scratch_root() / "sweep";
  RunResult r = run("compute --channel oun --lambda 0.1 --state bloch:1,0,0 --grid 0.2:2:10 --out " +
                    dir.string());
  REQUIRE(r.code == 0);
  auto rows = read_csv(dir / "compute.csv");
  REQUIRE(rows.size() == 10);
  CHECK(rows.front()[0] == doctest::Approx(0.2));
  CHECK(rows.back()[0] == doctest::Approx(2.0));
  for (const auto& row : rows) {
    REQUIRE(row.size() == 5);
    CHECK(row[1] > 0.0);       // bound
    CHECK(row[4] <= 1.0 + 1e-9);  // m_cl
  }
  std::string raw = slurp(dir / "compute.csv");
  CHECK(raw.find("kappa_tau,tau_qsl,cl1,s_l,m_cl\n") == 0);
  CHECK(raw.find('\r') == std::string::npos);
}

TEST_CASE("figure output is deterministic across thread counts") {
  fs::path d1 = scratch_root() / "f1";
  fs::path d2 = scratch_root() / "f2";
  REQUIRE(run("figure --id fig1b --grid 0.1:4:25 --threads 1 --out " + d1.string()).code == 0);
  REQUIRE(run("figure --id fig1b --grid 0.1:4:25 --threads 8 --out " + d2.string()).code == 0);
  for (const char* stem : {"fig1b_pure", "fig1b_mixed"}) {
    std::string a = slurp(d1 / (std::string(stem) + ".csv"));
    std::string b = slurp(d2 / (std::string(stem) + ".csv"));
    CHECK(a == b);
    CHECK(!a.empty());
  }
  CHECK(fs::exists(d1 / "fig1b.gp"));
}

TEST_CASE("parametric figures put the measure in the first column") {
  fs::path dir = scratch_root() / "par";
  REQUIRE(run("figure --id fig2 --grid 0.2:6:15 --out " + dir.string()).code == 0);
  auto rows = read_csv(dir / "fig2_pure.csv");
  REQUIRE(rows.size() == 15);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 3);
    CHECK(row[0] >= 0.0);
    CHECK(row[0] <= 1.0 + 1e-9);
  }
}

TEST_CASE("witness reports the bell partition") {
  fs::path dir = scratch_root() / "wit";
  RunResult r = run("witness --n 2 --family bell --grid 0.1:4:25 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(line_with(r.out, "partition=") == "partition=1,2|3,4");
  CHECK(field(r.out, "min_inter_gap") > 1e-3);
  CHECK(fs::exists(dir / "witness_bell2_4.csv"));
}

TEST_CASE("config file supplies defaults, flags still win") {
  fs::path cfg = scratch_root() / "run.cfg";
  std::ofstream(cfg) << "# settings\nchannel=rtn\nc = 0.6\ntau=2.0\nmethod rp\n";
  RunResult base = run("compute --config " + cfg.string());
  REQUIRE(base.code == 0);
  RunResult override_tau = run("compute --config " + cfg.string() + " --tau 1.0");
  REQUIRE(override_tau.code == 0);
  RunResult direct = run("compute --channel rtn --c 0.6 --method rp --tau 1.0");
  CHECK(field(override_tau.out, "tau_qsl") ==
        doctest::Approx(field(direct.out, "tau_qsl")).epsilon(1e-12));
  CHECK(field(base.out, "tau_qsl") != doctest::Approx(field(direct.out, "tau_qsl")));
}

TEST_CASE("nonmarkov prints the report and writes gamma csv") {
  fs::path dir = scratch_root() / "nm";
  RunResult r = run("nonmarkov --channel rtn --c 0.6 --horizon 20 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "n_l") > 0.0);
  CHECK(line_with(r.out, "negative_intervals=") != "negative_intervals=none");
  auto rows = read_csv(dir / "gamma.csv");
  CHECK(rows.size() > 100);
  RunResult oun = run("nonmarkov --channel oun --lambda 0.1 --out " + dir.string());
  CHECK(line_with(oun.out, "negative_intervals=") == "negative_intervals=none");
}

TEST_CASE("exit codes separate usage, computation and validation failures") {
  CHECK(run("compute --tau -3").code == 2);
  CHECK(run("compute --grid 0:1:10").code == 2);
  CHECK(run("compute --norm frobenius").code == 2);
  CHECK(run("figure --id fig99").code == 3);
  CHECK(run("compute --state bell:chi+").code == 3);
  CHECK(run("witness --n 7").code == 2);
  CHECK(run("validate --inject pt-sign --filter pt-consistency").code == 1);
  CHECK(run("validate --filter matrix").code == 0);
  CHECK(run("--help").code == 0);
  CHECK(run("compute --help").code == 0);
}
