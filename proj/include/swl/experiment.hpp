#pragma once
// Experiment orchestration: runs one experiment kind for a configuration,
// writes CSV artifacts and a manifest (config hash, seed, file hashes,
// per-check outcomes) into an output directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swl/config.hpp"
#include "swl/io.hpp"

namespace swl {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExperimentKind { Simulate, Moments, Holder, Blowup, Hypcheck, GreensCheck, KernelTable };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);
const std::vector<ExperimentKind>& all_experiment_kinds();

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::size_t> paths;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

// Exit status: 0 when every hard check passes, 2 otherwise. Invalid
// configurations throw cfg::ConfigError before any computation.
struct RunResult {
  int exit_status = 0;
  io::Manifest manifest;
};

// Overrides from `opts` are applied before validation.
RunResult run_experiment(ExperimentKind kind, const cfg::SimConfig& config, const RunOptions& opts,
                         std::ostream& log);

// Kernels listed by the kernel-table experiment (the configured kernel is
// appended when it is not white noise and not already present).
std::vector<KernelSpec> kernel_table_catalog();

}  // namespace swl
