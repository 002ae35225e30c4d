#pragma once
// Experiment configuration: INI file (one table per section), validation into
// a normalized form with advisories, canonical serialization, and the
// annotated reference config.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "swl/kernels.hpp"
#include "swl/model.hpp"
#include "swl/noise.hpp"
#include "swl/solver.hpp"

namespace swl::cfg {

struct KernelConfig {
  std::string family = "white";
  double beta = 1.0;
  double kappa = 2.0;
  std::vector<double> hurst;
  double gamma = -1.0;  // gamma for C_mu^(gamma); negative selects gamma_max / 2
};

struct McConfig {
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct ObservationConfig {
  double radius = 1.0;
  std::vector<double> output_times;  // empty: {T}
};

struct BlowupConfig {
  std::vector<double> levels{4.0, 8.0, 16.0, 32.0};
  double confidence = 0.95;
};

struct MomentsConfig {
  std::vector<double> orders{2.0};
  double alpha = 0.0;
  double margin = 0.15;
  std::size_t resamples = 400;
};

struct HolderConfig {
  std::vector<std::size_t> space_lags{1, 2, 4, 8, 16, 32};  // grid cells
  std::vector<std::size_t> time_lags{1, 2, 4, 8, 16, 32};   // time steps
  double order = 2.0;
  double margin = 0.07;
  double window = -1.0;  // base-point window radius; negative selects the observation radius
};

struct HypcheckConfig {
  bool h4 = true;
  std::size_t samples = 1000000;
};

struct GreensConfig {
  bool pairings = true;
};

struct SimConfig {
  GridSpec grid;
  KernelConfig kernel;
  CoefficientSpec coeff;
  InitialSpec init;
  McConfig mc;
  ObservationConfig observation;
  BlowupConfig blowup;
  MomentsConfig moments;
  HolderConfig holder;
  HypcheckConfig hypcheck;
  GreensConfig greens;
};

// Field-level problems collected while parsing or validating.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Unknown sections/keys and unparsable values are errors.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_file(const std::string& path);

struct Validation {
  SimConfig config;                 // normalized
  std::vector<std::string> advisories;
};

// Throws ConfigError listing every hard violation.
Validation validate(const SimConfig& config);

// Canonical INI text of every key (normalized configs round-trip exactly).
std::string to_ini(const SimConfig& config);

// Defaults with one comment line per key.
std::string reference_config();

// Lag ranges against the grid; only the holder experiment needs them.
void check_holder_lags(const SimConfig& config);

KernelSpec kernel_spec(const SimConfig& config);
// Solver setup for a validated config.
SolverSetup make_setup(const SimConfig& config);

}  // namespace swl::cfg
