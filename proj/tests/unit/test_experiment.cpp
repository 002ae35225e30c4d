#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "swl/experiment.hpp"

using namespace swl;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("swl_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

cfg::SimConfig small_superlinear() {
  cfg::SimConfig c;
  c.grid.n = 64;
  c.grid.dt = 1.0 / 64;
  c.grid.T = 0.5;
  c.grid.L = 6.0;
  c.coeff.family = CoefficientFamily::Superlinear;
  c.coeff.theta2 = 1.0;
  c.coeff.delta = 1.0;
  c.coeff.sigma1 = 1.0;
  c.coeff.sigma2 = 1.0;
  c.coeff.a = 0.25;
  c.init.family = InitialFamily::Bump;
  c.init.amplitude = 3.0;
  c.blowup.levels = {2.0, 3.0, 4.0, 8.0};
  c.mc.replicas = 12;
  return c;
}

// Every file in the directory except the manifest is listed with its hash.
void check_manifest_complete(const fs::path& dir) {
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::size_t on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") ++on_disk;
  CHECK(j["files"].size() == on_disk);
  for (const auto& f : j["files"]) {
    const auto path = dir / f["name"].get<std::string>();
    REQUIRE(fs::exists(path));
    CHECK(io::sha256_file(path) == f["sha256"].get<std::string>());
  }
}
}  // namespace

TEST_CASE("experiment kind names") {
  for (auto k : all_experiment_kinds()) CHECK(experiment_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(experiment_kind_from_string("nope"));
}

TEST_CASE("kernel-table lists the catalog plus the configured kernel") {
  cfg::SimConfig c;
  c.grid.dim = 2;
  c.grid.n = 32;
  c.kernel.family = "riesz";
  c.kernel.beta = 0.7;
  RunOptions o;
  o.out_dir = scratch("table");
  std::ostringstream log;
  const auto r = run_experiment(ExperimentKind::KernelTable, c, o, log);
  CHECK(r.exit_status == 0);
  const auto csv = slurp(o.out_dir / "kernel_table.csv");
  CHECK(csv.rfind("family,dim,params,c_mu,c_mu_gamma,gamma_max,nu,b,bbar\n", 0) == 0);
  CHECK(csv.find("riesz,2,d=2;beta=0.7,") != std::string::npos);
  check_manifest_complete(o.out_dir);
}

TEST_CASE("blowup run is deterministic and thread-independent") {
  const auto c = small_superlinear();
  RunOptions a, b;
  a.out_dir = scratch("blowup_a");
  b.out_dir = scratch("blowup_b");
  b.threads = 3;
  std::ostringstream log;
  const auto ra = run_experiment(ExperimentKind::Blowup, c, a, log);
  const auto rb = run_experiment(ExperimentKind::Blowup, c, b, log);
  CHECK(ra.exit_status == 0);
  CHECK(slurp(a.out_dir / "blowup.csv") == slurp(b.out_dir / "blowup.csv"));
  CHECK(slurp(a.out_dir / "blowup_tau.csv") == slurp(b.out_dir / "blowup_tau.csv"));
  check_manifest_complete(a.out_dir);
  const auto j = nlohmann::json::parse(slurp(a.out_dir / "manifest.json"));
  CHECK(j["checks"][0]["name"] == "tau_N nondecreasing in N on every path");
  CHECK(j["checks"][0]["pass"] == true);
}

TEST_CASE("overrides apply before validation") {
  auto c = small_superlinear();
  RunOptions o;
  o.out_dir = scratch("override");
  o.paths = 3;
  o.seed = 42;
  std::ostringstream log;
  const auto r = run_experiment(ExperimentKind::Simulate, c, o, log);
  CHECK(r.manifest.paths == 3);
  CHECK(r.manifest.seed == 42);
  const auto csv = slurp(o.out_dir / "simulate_paths.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3);
  check_manifest_complete(o.out_dir);
  o.paths = 0;
  CHECK_THROWS_AS(run_experiment(ExperimentKind::Simulate, c, o, log), cfg::ConfigError);
}

TEST_CASE("greens-check passes its hard checks") {
  cfg::SimConfig c;
  c.greens.pairings = false;
  RunOptions o;
  o.out_dir = scratch("greens");
  std::ostringstream log;
  const auto r = run_experiment(ExperimentKind::GreensCheck, c, o, log);
  CHECK(r.exit_status == 0);
  CHECK_FALSE(r.manifest.checks.empty());
}

TEST_CASE("hypcheck report for Riesz d=3") {
  cfg::SimConfig c;
  c.grid.dim = 3;
  c.grid.n = 8;
  c.kernel.family = "riesz";
  c.kernel.beta = 1.0;
  c.hypcheck.h4 = false;
  RunOptions o;
  o.out_dir = scratch("hyp");
  std::ostringstream log;
  const auto r = run_experiment(ExperimentKind::Hypcheck, c, o, log);
  CHECK(r.exit_status == 0);
  const auto j = nlohmann::json::parse(slurp(o.out_dir / "hypcheck_report.json"));
  CHECK(std::abs(j["h3"]["fitted"].get<double>() - 1.0) < 0.05);
  check_manifest_complete(o.out_dir);
}
