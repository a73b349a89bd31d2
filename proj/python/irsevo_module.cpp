#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "irsevo/analysis.hpp"
#include "irsevo/channel.hpp"
#include "irsevo/errors.hpp"
#include "irsevo/experiments.hpp"
#include "irsevo/io.hpp"

namespace py = pybind11;
using namespace irsevo;

namespace {

DynamicsKind parse_kind(const std::string& kind) {
  if (kind == "classical") return DynamicsKind::classical;
  if (kind == "delayed") return DynamicsKind::delayed;
  if (kind == "fractional") return DynamicsKind::fractional;
  throw ValidationError("kind: must be classical, delayed or fractional");
}

Eigen::MatrixXd stack_states(const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) return {};
  Eigen::MatrixXd matrix(states.size(), states.front().size());
  for (std::size_t n = 0; n < states.size(); ++n) matrix.row(static_cast<Eigen::Index>(n)) = states[n];
  return matrix;
}

py::dict trajectory_dict(const ReplicatorGame& game, const Trajectory& trajectory,
                         double tol) {
  const EquilibriumReport report = detect_equilibrium(game, trajectory, tol);
  py::dict out;
  out["times"] = trajectory.times;
  out["shares"] = stack_states(trajectory.states);
  out["utilities"] = stack_states(trajectory.utilities);
  out["average_utility"] = trajectory.average_utilities;
  out["converged_at"] =
      trajectory.converged_at ? py::cast(*trajectory.converged_at) : py::none();
  out["steps"] = trajectory.stats.steps;
  out["cumulative_renormalization"] = trajectory.stats.cumulative_renormalization;
  out["max_simplex_deviation"] = trajectory.stats.max_simplex_deviation;
  out["residual"] = report.residual;
  out["converged"] = report.converged;
  out["time_to_converge"] = report.time_to_converge;
  out["utility_spread"] = report.utility_spread;
  out["relative_utility_spread"] = report.relative_utility_spread;
  out["equilibrium_shares"] = report.equilibrium_shares;
  return out;
}

struct GameBundle {
  GameEconomics economics;
  std::unique_ptr<ReplicatorGame> game;
};

GameBundle make_game(const Scenario& scenario, double mu, std::uint64_t seed, int nlos_paths,
                     bool zero_reflection, bool paper_cost_sign) {
  EconomicsOptions options;
  options.channels.seed = seed;
  options.channels.nlos_paths = nlos_paths;
  options.channels.zero_reflection = zero_reflection;
  GameBundle bundle;
  bundle.economics = build_economics(scenario, options);
  bundle.game =
      std::make_unique<ReplicatorGame>(bundle.economics, mu, paper_cost_sign);
  return bundle;
}

}  // namespace

PYBIND11_MODULE(_irsevo, m) {
  m.doc() = "Service-selection dynamics in IRS-assisted networks: channels, "
            "phase-shift optimization, replicator variants, analysis.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<Strategy>(m, "Strategy")
      .def_readonly("sp", &Strategy::sp)
      .def_readonly("irs", &Strategy::irs)
      .def_readonly("subset_size", &Strategy::subset_size)
      .def_readonly("power_index", &Strategy::power_index)
      .def_readonly("active_elements", &Strategy::active_elements)
      .def("label", &Strategy::label)
      .def("__repr__", [](const Strategy& s) { return "<Strategy " + s.label() + ">"; });

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("group_count", &Scenario::group_count)
      .def_readonly("population", &Scenario::population)
      .def_readonly("strategies", &Scenario::strategies)
      .def_property_readonly("strategy_labels",
                             [](const Scenario& s) {
                               std::vector<std::string> labels;
                               for (const auto& strategy : s.strategies) {
                                 labels.push_back(strategy.label());
                               }
                               return labels;
                             })
      .def("__repr__", [](const Scenario& s) {
        return "<Scenario providers=" + std::to_string(s.providers.size()) +
               " G=" + std::to_string(s.group_count()) + ">";
      });

  m.def("load_scenario", [](const std::filesystem::path& path) { return load_scenario(path); },
        py::arg("path"), "Load and validate a scenario file.");

  m.def("steering_vector", &steering_vector, py::arg("n"), py::arg("spatial_direction"));
  m.def("spreading_loss", &spreading_loss, py::arg("frequency_hz"), py::arg("range_m"));
  m.def("absorption_loss", &absorption_loss, py::arg("range_m"), py::arg("absorption_per_m"));
  m.def("los_path_gain", &los_path_gain, py::arg("frequency_hz"), py::arg("range_m"),
        py::arg("absorption_per_m"));

  m.def(
      "build_economics",
      [](const Scenario& scenario, std::uint64_t seed, int nlos_paths, bool zero_reflection) {
        EconomicsOptions options;
        options.channels.seed = seed;
        options.channels.nlos_paths = nlos_paths;
        options.channels.zero_reflection = zero_reflection;
        const GameEconomics economics = build_economics(scenario, options);
        py::list rows;
        for (std::size_t g = 0; g < economics.per_strategy.size(); ++g) {
          const auto& e = economics.per_strategy[g];
          py::dict row;
          row["strategy"] = scenario.strategies[g].label();
          row["sinr"] = e.sinr;
          row["rate_numerator"] = e.rate_numerator;
          row["element_cost"] = e.element_cost;
          row["power_cost"] = e.power_cost;
          row["value"] = e.value;
          row["group_gain"] = e.group_gain();
          rows.append(row);
        }
        return rows;
      },
      py::arg("scenario"), py::arg("seed") = 0, py::arg("nlos_paths") = 0,
      py::arg("zero_reflection") = false,
      "Per-strategy SINR, rate and cost terms after phase-shift optimization.");

  m.def(
      "optimize_strategy",
      [](const Scenario& scenario, int index, std::uint64_t seed) {
        if (index < 0 || index >= scenario.group_count()) {
          throw ValidationError("strategy index out of range");
        }
        ChannelOptions channel_options;
        channel_options.seed = seed;
        const ChannelSet channels =
            synthesize_channels(scenario, scenario.strategies[index], channel_options);
        const PhaseOptimResult optimum = optimize_phase_shifts(channels);
        const auto& sp = scenario.provider(scenario.strategies[index].sp);
        const Beamformer w = compute_beamformer(
            channels, optimum.phases,
            sp.power_levels_w[scenario.strategies[index].power_index - 1]);
        py::dict out;
        out["phases"] = optimum.phases.phases;
        out["iterations"] = optimum.iterations;
        out["objective_history"] = optimum.objective_history;
        out["beamformer"] = w.weights;
        out["sinr"] = sinr(channels, optimum.phases, w, sp.bandwidth_hz,
                           scenario.physics.noise_psd_w_per_hz);
        return out;
      },
      py::arg("scenario"), py::arg("index"), py::arg("seed") = 0,
      "Phase-shift optimization and matched beamformer for one strategy.");

  m.def(
      "simulate",
      [](const Scenario& scenario, const std::string& kind, double mu, double beta,
         double delta, double step, double horizon, double tol, std::uint64_t seed,
         const std::string& init, bool stop_on_convergence, int record_stride,
         int nlos_paths, bool zero_reflection, bool paper_cost_sign) {
        const GameBundle bundle =
            make_game(scenario, mu, seed, nlos_paths, zero_reflection, paper_cost_sign);
        DynamicsConfig config;
        config.kind = parse_kind(kind);
        config.learning_rate = mu;
        config.order = beta;
        config.delay = delta;
        config.step = step;
        config.horizon = horizon;
        config.convergence_tol = tol;
        config.stop_on_convergence = stop_on_convergence;
        config.record_stride = record_stride;
        if (init == "dirichlet") {
          config.initial_shares = dirichlet_shares(bundle.game->group_count(), seed);
        } else if (init != "uniform") {
          throw ValidationError("init: must be uniform or dirichlet");
        }
        validate_config(config, bundle.game->group_count());
        const Trajectory trajectory = integrate(*bundle.game, config);
        return trajectory_dict(*bundle.game, trajectory, tol);
      },
      py::arg("scenario"), py::arg("kind") = "classical", py::arg("mu") = 0.1353352832366127,
      py::arg("beta") = 1.0, py::arg("delta") = 0.0, py::arg("step") = 0.01,
      py::arg("horizon") = 200.0, py::arg("tol") = 1e-6, py::arg("seed") = 0,
      py::arg("init") = "uniform", py::arg("stop_on_convergence") = true,
      py::arg("record_stride") = 1, py::arg("nlos_paths") = 0,
      py::arg("zero_reflection") = false, py::arg("paper_cost_sign") = false,
      "Integrate the selection dynamics and report the trajectory and equilibrium.");

  m.def(
      "picard",
      [](const Scenario& scenario, double mu, double step, double horizon, int sweeps,
         double sweep_tol, std::uint64_t seed) {
        const GameBundle bundle = make_game(scenario, mu, seed, 0, false, false);
        DynamicsConfig config;
        config.learning_rate = mu;
        config.step = step;
        config.horizon = horizon;
        const Trajectory trajectory =
            picard_solve(*bundle.game, config, sweeps, sweep_tol);
        return trajectory_dict(*bundle.game, trajectory, config.convergence_tol);
      },
      py::arg("scenario"), py::arg("mu") = 0.1353352832366127, py::arg("step") = 0.01,
      py::arg("horizon") = 1.0, py::arg("sweeps") = 50, py::arg("sweep_tol") = 1e-10,
      py::arg("seed") = 0, "Whole-horizon fixed-point cross-solver.");

  m.def(
      "delay_bound",
      [](const Scenario& scenario, double mu, std::uint64_t seed) {
        const GameBundle bundle = make_game(scenario, mu, seed, 0, false, false);
        const DelayBound bound = delay_stability_bound(*bundle.game);
        py::dict out;
        out["delta_star"] = bound.delta_star;
        out["kappa"] = bound.kappa;
        out["theorem_scope"] = bound.theorem_scope;
        return out;
      },
      py::arg("scenario"), py::arg("mu") = 0.1353352832366127, py::arg("seed") = 0,
      "Largest information delay with guaranteed convergence.");

  m.def("list_experiments", &builtin_experiment_names);

  m.def(
      "run_experiment",
      [](const std::string& name, const std::filesystem::path& outdir,
         const std::filesystem::path& scenario_dir, std::uint64_t seed, int jobs) {
        ExperimentSpec spec = builtin_experiment(name, scenario_dir);
        spec.seed = seed;
        const ExperimentResult result = run_experiment(spec, jobs);
        const auto written = write_experiment(result, outdir, "python:run_experiment");
        py::dict out;
        out["outputs"] = written;
        out["claim_checked"] = result.claim.checked;
        out["claim_passed"] = result.claim.passed;
        out["claim_detail"] = result.claim.detail;
        return out;
      },
      py::arg("name"), py::arg("outdir"), py::arg("scenario_dir") = "scenarios",
      py::arg("seed") = 0, py::arg("jobs") = 1,
      "Run a built-in experiment and write its tables.");

  m.attr("__version__") = kToolVersion;
}
