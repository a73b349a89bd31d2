#pragma once

#include <map>
#include <string>
#include <vector>

#include "irsevo/analysis.hpp"
#include "irsevo/io.hpp"

namespace irsevo {

struct DynamicsVariant {
  std::string name;  // used in table cells and file names
  DynamicsConfig config;
};

struct ExperimentSpec {
  std::string name;
  std::string description;      // study id and the claim it checks
  std::string scenario_path;    // resolved against the scenario directory
  std::string sweep_parameter;  // scenario or dynamics parameter
  std::vector<double> sweep_values;
  std::vector<DynamicsVariant> dynamics;
  std::vector<std::string> outputs;  // table names this experiment emits
  std::uint64_t seed = 0;

  /// Claim evaluated by the acceptance suite; empty when purely descriptive.
  std::string claim;
};

void validate_spec(const ExperimentSpec& spec);

/// Applies a sweep value to a scenario. Supported names:
///   user.x, population, sp<m>.elements_per_module, sp<m>.price_per_element,
///   sp<m>.price_per_watt, physics.frequency
/// Throws ValidationError for unknown names.
Scenario apply_scenario_parameter(const Scenario& base, const std::string& name,
                                  double value);

/// True when the sweep parameter acts on the dynamics config instead
/// (mu, beta, delta, step, horizon).
bool is_dynamics_parameter(const std::string& name);
DynamicsConfig apply_dynamics_parameter(const DynamicsConfig& base, const std::string& name,
                                        double value);

struct RunRecord {
  double sweep_value = 0.0;
  std::string variant;
  bool failed = false;
  std::string failure;
  Trajectory trajectory;
  EquilibriumReport equilibrium;
  AdaptationMetrics metrics;
  Eigen::VectorXd group_gains;
  std::vector<std::string> strategy_labels;
  std::vector<int> strategy_sp;
  double total_equilibrium_utility = 0.0;
  double delay_bound = std::numeric_limits<double>::quiet_NaN();
  bool direction_ok = false;       // direction-field study only
  std::string direction_detail;
};

struct ClaimOutcome {
  bool checked = false;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<RunRecord> runs;   // ordered by (sweep value index, variant index)
  std::vector<std::pair<std::string, Table>> tables;
  ClaimOutcome claim;
};

std::vector<std::string> builtin_experiment_names();

/// Throws ValidationError listing the catalog for unknown names.
ExperimentSpec builtin_experiment(const std::string& name,
                                  const std::filesystem::path& scenario_dir);

/// Parses a user-provided experiment spec (JSON, comments allowed).
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Runs every sweep value × dynamics variant; cells run concurrently when
/// jobs > 1 and results assemble in deterministic order. A failing cell is
/// recorded and the sweep continues.
ExperimentResult run_experiment(const ExperimentSpec& spec, int jobs = 1);

/// Writes tables and the manifest under `outdir`/<experiment name>/.
std::vector<std::string> write_experiment(const ExperimentResult& result,
                                          const std::filesystem::path& outdir,
                                          const std::string& command_line);

}  // namespace irsevo
