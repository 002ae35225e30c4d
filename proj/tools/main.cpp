// swl: command-line front end for the experiments.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "swl/config.hpp"
#include "swl/experiment.hpp"

namespace {

struct KernelOverride {
  std::string family;
  int dim = 0;
  std::optional<double> beta, kappa;
  std::vector<double> hurst;

  void register_on(CLI::App* app) {
    app->add_option("--kernel", family, "kernel family: white | riesz | bessel | fractional");
    app->add_option("--dim", dim, "spatial dimension (sets grid.dim)");
    app->add_option("--beta", beta, "Riesz exponent");
    app->add_option("--kappa", kappa, "Bessel order");
    app->add_option("--hurst", hurst, "fractional Hurst indices")->delimiter(',');
  }

  void apply(swl::cfg::SimConfig& c) const {
    if (!family.empty()) c.kernel.family = family;
    if (dim > 0) c.grid.dim = dim;
    if (beta) c.kernel.beta = *beta;
    if (kappa) c.kernel.kappa = *kappa;
    if (!hurst.empty()) {
      c.kernel.hurst = hurst;
      if (dim == 0) c.grid.dim = static_cast<int>(hurst.size());
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for stochastic wave equations with superlinear coefficients"};
  app.require_subcommand(1);
  app.set_version_flag("--version", swl::kToolVersion);

  std::string config_path;
  swl::RunOptions opts;
  std::optional<std::size_t> paths;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  KernelOverride kernel;

  std::map<CLI::App*, swl::ExperimentKind> experiments;
  for (auto kind : swl::all_experiment_kinds()) {
    auto* sub = app.add_subcommand(swl::to_string(kind), fmt::format("run the {} experiment", swl::to_string(kind)));
    sub->add_option("--config", config_path, "INI configuration (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--paths", paths, "override mc.replicas");
    sub->add_option("--threads", threads, "override mc.threads");
    sub->add_option("--seed-override", seed, "override mc.seed");
    if (kind == swl::ExperimentKind::Hypcheck || kind == swl::ExperimentKind::KernelTable) kernel.register_on(sub);
    experiments[sub] = kind;
  }
  auto* validate = app.add_subcommand("validate", "print the normalized configuration and advisories");
  validate->add_option("--config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
  auto* reference = app.add_subcommand("reference-config", "print the annotated default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reference->parsed()) {
      std::cout << swl::cfg::reference_config();
      return 0;
    }
    swl::cfg::SimConfig config = config_path.empty() ? swl::cfg::SimConfig{} : swl::cfg::parse_config_file(config_path);
    if (validate->parsed()) {
      const auto v = swl::cfg::validate(config);
      std::cout << swl::cfg::to_ini(v.config);
      for (const auto& a : v.advisories) std::cout << "; advisory: " << a << "\n";
      return 0;
    }
    for (const auto& [sub, kind] : experiments) {
      if (!sub->parsed()) continue;
      kernel.apply(config);
      opts.out_dir = out_dir;
      opts.paths = paths;
      opts.threads = threads;
      opts.seed = seed;
      const auto result = swl::run_experiment(kind, config, opts, std::cerr);
      std::cerr << fmt::format("{}: {} files written to {}, exit status {}\n", swl::to_string(kind),
                               result.manifest.files.size() + 1, out_dir, result.exit_status);
      return result.exit_status;
    }
  } catch (const swl::cfg::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
