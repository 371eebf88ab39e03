#pragma once

// Experiment configuration (plain `key = value` text) and the runners that
// integrate, analyse and write CSV / JSON outputs.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphon/kernel.hpp"
#include "json.hpp"

namespace graphon {

enum class ExperimentKind { leader, balanced_cycle, symmetric_switch, non_consensus, rate_sweep, custom };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::leader;
  int n = 100;
  int d = 1;
  double dt = 0.01;
  double t_end = 100.0;
  std::optional<double> tau;
  std::optional<double> kernel_T;
  std::optional<int> kernel_n;
  /// sin2_4i | constant:<value> | file:<path>
  std::string initial_profile = "sin2_4i";
  std::string out_dir = "out";
  std::vector<int> sweep_ns = {10, 20, 40, 80};
  /// constant | cucker_smale; experiment default when unset.
  std::optional<std::string> phi;
  int record_stride = 10;
  /// builtin:<name> | file:<path>
  std::optional<std::string> kernel;
  int quadrature_order = 4;
  std::optional<double> decay_threshold;
  double grid_block_duration = 1.0;

  bool operator==(const ExperimentConfig& other) const = default;
};

/// Throws ConfigError carrying the offending line and field.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
/// Field-level checks shared by the parser and the CLI overrides.
void validate_config(const ExperimentConfig& cfg);

/// Experiment defaults resolved against the config.
struct ResolvedExperiment {
  TimeKernel kernel;
  NonlinKernel phi;
  double tau;
  double decay_threshold;
};

ResolvedExperiment resolve(const ExperimentConfig& cfg);

struct ExperimentResult {
  /// 0 success, 4 envelope or monotonicity assertion failure.
  int exit_code = 0;
  nlohmann::json summary;
  std::vector<std::string> failures;
};

/// Runs one experiment and writes its files into cfg.out_dir. Throws
/// ConfigError (bad config, unwritable out_dir) or NumericalError.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// One run per N in sweep_ns, plus rates.csv `N,lambda2,rate_l2,rate_linf`.
ExperimentResult run_rate_sweep(const ExperimentConfig& cfg);

}  // namespace graphon
