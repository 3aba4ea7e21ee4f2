#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "discharge/commands.hpp"
#include "discharge/config.hpp"
#include "discharge/error.hpp"
#include "discharge/output.hpp"

using namespace discharge;
namespace fs = std::filesystem;

namespace {

const char* kStationary = R"(# flat densities, no field
[domain]
r = 1
profile = touchdown
g0 = 0.5
c = 0.5
nx = 8
ny = 4

[params]
V = 0
theta_p = 0.2
theta_n = 0.2

[step]
dt = 1e-3
t_end = 5e-3
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("discharge_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "discharge_sim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

void expect_message(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    INFO(e.what());
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const RunConfig c = parse_config("[domain]\nnx = 4\nny = 4\n");
  CHECK(c.domain.is_rectangle());
  CHECK(c.step.poisson_tol == 1e-10);
  CHECK(c.step.scheme == Scheme::AuxiliaryM);
  CHECK(c.step.M == 1e6);
  CHECK(c.step.source_treatment == SourceTreatment::SemiImplicitSink);
  CHECK(c.step.density_bc == DensityBoundary::Dirichlet);
  CHECK_FALSE(c.monitors.constants.has_value());
}

TEST_CASE("validation messages") {
  expect_message("[params]\neta0 = -1\n", "params.eta0 must be > 0");
  expect_message("[params]\nmu = 1\n", "params.mu");
  expect_message("[nowhere]\nx = 1\n", "nowhere");
  expect_message("[domain]\nnx = 4\nnx = 5\n", "line 3");
  expect_message("[domain]\nprofile = rectangle\ng0 = 0.1\n", "domain.g0");
  expect_message("[domain]\nprofile = touchdown\ng0 = 0\n", "domain.g0 must be > 0");
  expect_message("[monitors]\nH4 = 1\n", "monitors");
  expect_message("[step]\ndt = abc\n", "line 2");
  expect_message("[truncation]\nlevels = 3, 2, 4\n", "truncation.levels");
  expect_message("[params]\n\n\neta0 = -1\n", "line 4");
}

TEST_CASE("round trip through the canonical text") {
  RunConfig c = parse_config(R"(
[domain]
r = 0.75
profile = touchdown
g0 = 0.2
c = 1.5
exponent = 1.3333333333333333
nx = 12
ny = 6
[params]
eps0 = 0.9
eps_plus = 0.1
eps_minus = 0.3
V = 2.5
theta_p = 0.15
theta_n = 0.05
[velocity]
kind = stream
v0 = 0.4
kx = 2
[step]
dt = 2.5e-4
t_end = 0.01
scheme = original
source_treatment = explicit
density_bc = zero_flux
source = false
[truncation]
M = 12345.678
levels = 1000, 2000, 4000
[monitors]
H4 = 1
H5 = 0.5
H6 = 2
blowup_threshold = 100
[output]
dir = somewhere/else
stride = 7
[galerkin]
modes_x = 6
modes_y = 5
[verify]
kind = coupled
levels = 4
)");
  const std::string text = serialize_config(c);
  const RunConfig d = parse_config(text);
  CHECK(serialize_config(d) == text);
  CHECK(d.domain.r == 0.75);
  CHECK(std::get<TouchDown>(d.domain.profile).exponent == 1.3333333333333333);
  CHECK(d.step.M == 12345.678);
  CHECK(d.step.dt == 2.5e-4);
  CHECK(d.step.scheme == Scheme::OriginalF);
  CHECK_FALSE(d.step.source_enabled);
  CHECK(d.step.density_bc == DensityBoundary::ZeroFlux);
  CHECK(d.truncation.levels == std::vector<double>{1000, 2000, 4000});
  CHECK(d.monitors.constants->H6 == 2.0);
  CHECK(*d.monitors.blowup_threshold == 100.0);
  CHECK(d.output.dir == "somewhere/else");
  CHECK(d.output.stride == 7);
  CHECK(d.galerkin.modes_y == 5);
  CHECK(d.verify.kind == MmsKind::Coupled);
  CHECK(d.velocity.kx == 2);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::nan("")) == "");
  CHECK(std::stod(format_number(std::numbers::pi)) == std::numbers::pi);
  CHECK(fields_filename(42) == "fields_000042.csv");
}

TEST_CASE("timeseries csv layout") {
  std::vector<MonitorRecord> recs(2);
  recs[1].t = 0.5;
  recs[1].clamp_active = true;
  const std::vector<std::string> ls = lines(timeseries_csv(recs));
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == kTimeseriesHeader);
  // Unconfigured monitors are empty cells.
  CHECK(ls[1] == "0,0,0,0,0,0,0,,0,,0,1");
  CHECK(ls[2].rfind("0.5,", 0) == 0);
  CHECK(timeseries_csv(recs).find('\r') == std::string::npos);
}

TEST_CASE("run on a stationary config") {
  const fs::path dir = scratch_dir("run");
  {
    std::ofstream(dir / "c.cfg") << kStationary;
  }
  const fs::path out = dir / "out";
  CHECK(invoke({"run", "--config", (dir / "c.cfg").string(), "--out", out.string()}) == kExitOk);
  const std::vector<std::string> ls = lines(slurp(out / "timeseries.csv"));
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == kTimeseriesHeader);
  // Constant rows (to rounding) apart from t and the residual column.
  auto cells = [](const std::string& row) {
    std::vector<double> out;
    std::stringstream ss(row);
    std::string cell;
    for (int c = 0; c < 7 && std::getline(ss, cell, ','); ++c) {
      if (c > 0) out.push_back(std::stod(cell));
    }
    return out;
  };
  const std::vector<double> first = cells(ls[1]);
  for (std::size_t i = 2; i < ls.size(); ++i) {
    const std::vector<double> row = cells(ls[i]);
    for (std::size_t c = 0; c < row.size(); ++c) CHECK(std::abs(row[c] - first[c]) <= 1e-12);
  }

  const auto meta = nlohmann::json::parse(slurp(out / "meta.json"));
  CHECK(meta["subcommand"] == "run");
  CHECK(meta["exit_code"] == 0);
  CHECK(meta["stop_cause"] == "completed");

  // Byte-identical output on a rerun.
  const fs::path out2 = dir / "out2";
  CHECK(invoke({"run", "--config", (dir / "c.cfg").string(), "--out", out2.string()}) == kExitOk);
  CHECK(slurp(out / "timeseries.csv") == slurp(out2 / "timeseries.csv"));
}

TEST_CASE("field snapshots follow the stride") {
  const fs::path dir = scratch_dir("stride");
  {
    std::ofstream(dir / "c.cfg") << kStationary << "[output]\nstride = 2\n";
  }
  CHECK(invoke({"run", "--config", (dir / "c.cfg").string(), "--out", dir.string()}) == kExitOk);
  CHECK(fs::exists(dir / "fields_000000.csv"));
  CHECK(fs::exists(dir / "fields_000002.csv"));
  CHECK(fs::exists(dir / "fields_000004.csv"));
  CHECK_FALSE(fs::exists(dir / "fields_000001.csv"));
  const std::vector<std::string> ls = lines(slurp(dir / "fields_000002.csv"));
  CHECK(ls[0] == kFieldsHeader);
  CHECK(ls.size() == 1 + 9 * 5);
}

TEST_CASE("verify writes a convergence report") {
  const fs::path dir = scratch_dir("verify");
  {
    std::ofstream(dir / "mms.cfg") << "[domain]\nnx = 8\nny = 8\n[verify]\nkind = poisson\nlevels = 3\n";
  }
  CHECK(invoke({"verify", "--config", (dir / "mms.cfg").string(), "--out", dir.string()}) ==
        kExitOk);
  const std::vector<std::string> ls = lines(slurp(dir / "convergence_report.csv"));
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].rfind("level,nx,ny,dt", 0) == 0);
}

TEST_CASE("msweep writes pairwise differences") {
  const fs::path dir = scratch_dir("msweep");
  {
    std::ofstream(dir / "c.cfg") << kStationary;
  }
  CHECK(invoke({"msweep", "--config", (dir / "c.cfg").string(), "--out", dir.string(),
                "--levels", "1e4,1e5,1e6"}) == kExitOk);
  const std::vector<std::string> ls = lines(slurp(dir / "sweep_report.csv"));
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].rfind("level,M,ok", 0) == 0);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch_dir("exit");
  {
    std::ofstream(dir / "bad.cfg") << "[params]\neta0 = -1\n";
    std::ofstream(dir / "c.cfg") << kStationary;
  }
  CHECK(invoke({"run", "--config", (dir / "bad.cfg").string()}) == kExitValidation);
  CHECK(invoke({"run", "--config", (dir / "missing.cfg").string()}) == kExitValidation);
  CHECK(invoke({"run"}) == kExitValidation);
  CHECK(invoke({"explode", "--config", "x"}) == kExitValidation);
  CHECK(invoke({"dependence", "--config", (dir / "c.cfg").string(), "--out", dir.string()}) ==
        kExitValidation);
  // Threshold below the initial norms is a precondition failure.
  CHECK(invoke({"run", "--config", (dir / "c.cfg").string(), "--out", dir.string(),
                "--threshold", "1e-9"}) == kExitValidation);
}
