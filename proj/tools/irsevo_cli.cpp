#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "irsevo/analysis.hpp"
#include "irsevo/channel.hpp"
#include "irsevo/errors.hpp"
#include "irsevo/experiments.hpp"
#include "irsevo/io.hpp"

namespace {

using namespace irsevo;

std::string join_command_line(int argc, char** argv) {
  std::ostringstream out;
  for (int i = 0; i < argc; ++i) {
    if (i) out << ' ';
    out << argv[i];
  }
  return out.str();
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("IRSEVO_OUTPUT_DIR")) return env;
  return "out";
}

struct RunFlags {
  std::string scenario;
  std::string kind = "classical";
  double beta = 1.0;
  double mu = 0.1353352832366127;
  double delta = 0.0;
  double step = 0.01;
  double horizon = 200.0;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::string init = "uniform";
  int record_stride = 1;
  int nlos_paths = 0;
  bool no_stop = false;
  bool no_irs = false;
  bool paper_cost_sign = false;
  std::string output;
};

DynamicsConfig make_config(const RunFlags& flags, int group_count) {
  DynamicsConfig config;
  if (flags.kind == "classical") {
    config.kind = DynamicsKind::classical;
  } else if (flags.kind == "delayed") {
    config.kind = DynamicsKind::delayed;
  } else if (flags.kind == "fractional") {
    config.kind = DynamicsKind::fractional;
  } else {
    throw ValidationError("--kind: must be classical, delayed or fractional");
  }
  config.learning_rate = flags.mu;
  config.delay = flags.delta;
  config.order = flags.beta;
  config.step = flags.step;
  config.horizon = flags.horizon;
  config.convergence_tol = flags.tol;
  config.stop_on_convergence = !flags.no_stop;
  config.record_stride = flags.record_stride;
  if (flags.init == "dirichlet") {
    config.initial_shares = dirichlet_shares(group_count, flags.seed);
  } else if (flags.init != "uniform") {
    throw ValidationError("--init: must be uniform or dirichlet");
  }
  validate_config(config, group_count);
  return config;
}

int cmd_validate(const std::string& scenario_path) {
  const Scenario scenario = load_scenario(scenario_path);
  std::cout << "scenario: " << scenario_path << "\n";
  std::cout << "providers: " << scenario.providers.size()
            << ", panels: " << scenario.irs_panels.size()
            << ", population: " << scenario.population << "\n";
  std::cout << "G=" << scenario.group_count() << "\n";

  const double f = scenario.physics.carrier_frequency_hz;
  const double zeta = scenario.physics.absorption_coeff_per_m;
  std::cout << "strategy  elements  power_w  r_bs_user  r_bs_irs  r_irs_user  "
               "|gain_direct|  |gain_cascade|\n";
  for (const auto& strategy : scenario.strategies) {
    const auto& sp = scenario.provider(strategy.sp);
    const auto& panel = scenario.panel(strategy.sp, strategy.irs);
    const double r_bu = distance(sp.bs_position, scenario.user_position);
    const double r_bi = distance(sp.bs_position, panel.position);
    const double r_iu = distance(panel.position, scenario.user_position);
    const double gain_direct = std::abs(los_path_gain(f, r_bu, zeta));
    const double cascade = std::sqrt(static_cast<double>(sp.antennas) *
                                     strategy.active_elements) *
                           std::abs(los_path_gain(f, r_bi, zeta)) *
                           std::abs(los_path_gain(f, r_iu, zeta));
    std::cout << strategy.label() << "  " << strategy.active_elements << "  "
              << format_double(sp.power_levels_w[strategy.power_index - 1]) << "  "
              << format_double(r_bu) << "  " << format_double(r_bi) << "  "
              << format_double(r_iu) << "  " << format_double(gain_direct) << "  "
              << format_double(cascade) << "\n";
  }
  return 0;
}

int cmd_run(const RunFlags& flags, const std::string& command_line) {
  const Scenario scenario = load_scenario(flags.scenario);

  EconomicsOptions economics_options;
  economics_options.channels.seed = flags.seed;
  economics_options.channels.nlos_paths = flags.nlos_paths;
  economics_options.channels.zero_reflection = flags.no_irs;
  const GameEconomics economics = build_economics(scenario, economics_options);
  const ReplicatorGame game(economics, flags.mu, flags.paper_cost_sign);

  const DynamicsConfig config = make_config(flags, game.group_count());
  const Trajectory trajectory = integrate(game, config);
  const EquilibriumReport report = detect_equilibrium(game, trajectory, config.convergence_tol);

  std::filesystem::path output = flags.output.empty()
                                     ? default_output_dir() / "trajectory.csv"
                                     : std::filesystem::path(flags.output);
  write_file(output, trajectory_table(trajectory).to_csv());

  RunManifest manifest;
  manifest.command_line = command_line;
  manifest.scenario_path = flags.scenario;
  manifest.scenario_hash = content_hash(read_file(flags.scenario));
  manifest.seed = flags.seed;
  manifest.created_utc = utc_timestamp();
  manifest.outputs = {output.string()};
  manifest.notes.emplace_back("kind", flags.kind);
  manifest.notes.emplace_back("mu", format_double(flags.mu));
  manifest.notes.emplace_back("beta", format_double(flags.beta));
  manifest.notes.emplace_back("delta", format_double(flags.delta));
  manifest.notes.emplace_back("step", format_double(flags.step));
  manifest.notes.emplace_back("zeta",
                              format_double(scenario.physics.absorption_coeff_per_m));
  manifest.notes.emplace_back("converged", report.converged ? "yes" : "no");
  manifest.notes.emplace_back(
      "cumulative_renormalization",
      format_double(trajectory.stats.cumulative_renormalization));
  const std::filesystem::path manifest_path = output.parent_path() / "manifest.json";
  write_manifest(manifest, manifest_path);

  std::cout << "wrote " << output.string() << " and " << manifest_path.string() << "\n";
  std::cout << "steps=" << trajectory.stats.steps << " converged="
            << (report.converged ? "yes" : "no");
  if (report.converged) std::cout << " t_conv=" << format_double(report.time_to_converge);
  std::cout << " residual=" << format_double(report.residual)
            << " utility_spread=" << format_double(report.utility_spread) << "\n";
  return 0;
}

int cmd_experiment(const std::string& name, const std::filesystem::path& outdir,
                   const std::filesystem::path& scenario_dir, int jobs, std::uint64_t seed,
                   const std::string& command_line) {
  ExperimentSpec spec = std::filesystem::exists(name) && name.find('.') != std::string::npos
                            ? load_experiment_spec(name)
                            : builtin_experiment(name, scenario_dir);
  spec.seed = seed;
  const ExperimentResult result = run_experiment(spec, jobs);
  const auto written = write_experiment(result, outdir, command_line);
  for (const auto& path : written) std::cout << "wrote " << path << "\n";
  int failed_cells = 0;
  for (const auto& record : result.runs) failed_cells += record.failed ? 1 : 0;
  if (failed_cells) {
    std::cout << failed_cells << " of " << result.runs.size() << " cells failed\n";
  }
  if (result.claim.checked) {
    std::cout << "claim: " << (result.claim.passed ? "pass" : "FAIL") << " ("
              << result.claim.detail << ")\n";
  }
  return 0;
}

int cmd_bound(const std::string& scenario_path, double mu) {
  const Scenario scenario = load_scenario(scenario_path);
  const GameEconomics economics = build_economics(scenario);
  const ReplicatorGame game(economics, mu);
  const DelayBound bound = delay_stability_bound(game);
  std::cout << "kappa=" << format_double(bound.kappa) << "\n";
  std::cout << "delta_star=" << format_double(bound.delta_star) << "\n";
  if (!bound.theorem_scope) {
    std::cout << "note: derived for two single-service providers; with G="
              << game.group_count() << " this is a heuristic\n";
  }
  return 0;
}

int cmd_field(const std::string& scenario_path, double mu, int grid_n, int axis_a, int axis_b,
              const std::string& output) {
  const Scenario scenario = load_scenario(scenario_path);
  const GameEconomics economics = build_economics(scenario);
  const ReplicatorGame game(economics, mu);

  DynamicsConfig config;
  config.learning_rate = mu;
  config.convergence_tol = 1e-8;
  config.horizon = 600.0;
  const Trajectory trajectory = integrate_classical(game, config);
  const EquilibriumReport report = detect_equilibrium(game, trajectory, 1e-6);
  if (!report.converged) {
    throw NumericalError("direction field needs a converged base run; extend --horizon");
  }
  int closure = game.group_count() - 1;
  if (closure == axis_a || closure == axis_b) closure = game.group_count() - 2;
  const DirectionField field = direction_field(game, axis_a, axis_b, closure,
                                               report.equilibrium_shares, grid_n,
                                               trajectory.times.back());
  Table table({"p_a", "p_b", "dp_a", "dp_b"});
  for (std::size_t i = 0; i < field.points.size(); ++i) {
    table.add_row({format_double(field.points[i][0]), format_double(field.points[i][1]),
                   format_double(field.vectors[i][0]), format_double(field.vectors[i][1])});
  }
  const std::filesystem::path path =
      output.empty() ? default_output_dir() / "direction_field.csv"
                     : std::filesystem::path(output);
  write_file(path, table.to_csv());
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Service-selection dynamics simulator for IRS-assisted networks"};
  app.require_subcommand(1);
  const std::string command_line = join_command_line(argc, argv);

  std::string validate_scenario_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file and list services");
  validate_cmd->add_option("scenario", validate_scenario_path, "scenario file")->required();

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Integrate the selection dynamics once");
  run_cmd->add_option("scenario", run_flags.scenario, "scenario file")->required();
  run_cmd->add_option("--kind", run_flags.kind, "classical | delayed | fractional");
  run_cmd->add_option("--beta", run_flags.beta, "fractional order in (0,2)");
  run_cmd->add_option("--mu", run_flags.mu, "learning rate");
  run_cmd->add_option("--delta", run_flags.delta, "information delay");
  run_cmd->add_option("--step", run_flags.step, "integration step");
  run_cmd->add_option("--horizon", run_flags.horizon, "time horizon");
  run_cmd->add_option("--tol", run_flags.tol, "convergence tolerance on max |dp/dt|");
  run_cmd->add_option("--seed", run_flags.seed, "seed for channel draws and dirichlet start");
  run_cmd->add_option("--init", run_flags.init, "uniform | dirichlet");
  run_cmd->add_option("--record-stride", run_flags.record_stride, "record every n-th step");
  run_cmd->add_option("--nlos", run_flags.nlos_paths, "number of scattered paths per link");
  run_cmd->add_flag("--no-stop", run_flags.no_stop, "integrate the full horizon");
  run_cmd->add_flag("--no-irs", run_flags.no_irs, "zero all reflection gains");
  run_cmd->add_flag("--paper-cost-sign", run_flags.paper_cost_sign,
                    "use the published cost sign (power term subtracted)");
  run_cmd->add_option("--output,-o", run_flags.output, "trajectory CSV path");

  std::string experiment_name;
  std::string experiment_outdir;
  std::string scenario_dir = "scenarios";
  int jobs = 1;
  std::uint64_t experiment_seed = 0;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a named experiment");
  experiment_cmd->add_option("name", experiment_name, "built-in name or spec file")->required();
  experiment_cmd->add_option("--output,-o", experiment_outdir, "output directory");
  experiment_cmd->add_option("--scenario-dir", scenario_dir, "directory with scenario files");
  experiment_cmd->add_option("--jobs", jobs, "concurrent sweep cells");
  experiment_cmd->add_option("--seed", experiment_seed, "channel seed");

  std::string bound_scenario_path;
  double bound_mu = 0.1353352832366127;
  auto* bound_cmd = app.add_subcommand("bound", "Delay stability bound of a scenario");
  bound_cmd->add_option("scenario", bound_scenario_path, "scenario file")->required();
  bound_cmd->add_option("--mu", bound_mu, "learning rate");

  std::string field_scenario_path;
  std::string field_output;
  double field_mu = 0.1353352832366127;
  int field_grid = 21;
  int field_axis_a = 0;
  int field_axis_b = 1;
  auto* field_cmd = app.add_subcommand("field", "Direction field around the equilibrium");
  field_cmd->add_option("scenario", field_scenario_path, "scenario file")->required();
  field_cmd->add_option("--mu", field_mu, "learning rate");
  field_cmd->add_option("--grid", field_grid, "grid resolution per axis");
  field_cmd->add_option("--axis-a", field_axis_a, "first strategy index (0-based)");
  field_cmd->add_option("--axis-b", field_axis_b, "second strategy index (0-based)");
  field_cmd->add_option("--output,-o", field_output, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_scenario_path);
    if (*run_cmd) return cmd_run(run_flags, command_line);
    if (*experiment_cmd) {
      const std::filesystem::path outdir = experiment_outdir.empty()
                                               ? default_output_dir()
                                               : std::filesystem::path(experiment_outdir);
      return cmd_experiment(experiment_name, outdir, scenario_dir, jobs, experiment_seed,
                            command_line);
    }
    if (*bound_cmd) return cmd_bound(bound_scenario_path, bound_mu);
    if (*field_cmd) {
      return cmd_field(field_scenario_path, field_mu, field_grid, field_axis_a, field_axis_b,
                       field_output);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
