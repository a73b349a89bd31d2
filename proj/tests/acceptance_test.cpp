// Acceptance suite: every release criterion in one binary, one line each.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "irsevo/analysis.hpp"
#include "irsevo/errors.hpp"
#include "irsevo/experiments.hpp"
#include "irsevo/io.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

using namespace irsevo;

namespace {

struct Criterion {
  std::string name;
  std::function<std::string()> run;  // returns failure detail, empty on pass
};

ReplicatorGame benchmark_game(double mu = 0.1353352832366127) {
  const Scenario scenario = load_scenario(test_paths::baseline());
  return ReplicatorGame(build_economics(scenario), mu);
}

ChannelSet random_channels(std::uint64_t seed, int antennas, int elements,
                           double cascade_scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&] { return std::complex<double>(normal(rng), normal(rng)); };
  ChannelSet ch;
  ch.direct = CVec(antennas);
  for (int i = 0; i < antennas; ++i) ch.direct[i] = draw();
  ch.irs_user = CVec(elements);
  for (int e = 0; e < elements; ++e) ch.irs_user[e] = cascade_scale * draw();
  ch.bs_irs = CMat(elements, antennas);
  for (int e = 0; e < elements; ++e)
    for (int i = 0; i < antennas; ++i) ch.bs_irs(e, i) = draw();
  return ch;
}

std::string check(bool ok, const std::string& detail) { return ok ? "" : detail; }

std::string simplex_conservation() {
  const ReplicatorGame game = benchmark_game();
  const Trajectory trajectory = integrate_classical(game, DynamicsConfig{});
  for (const auto& state : trajectory.states) {
    if (std::abs(state.sum() - 1.0) > 1e-9) return "share sum drifted";
    if (state.minCoeff() < 0.0) return "negative share recorded";
  }
  std::ostringstream detail;
  detail << "cumulative renormalization "
         << format_double(trajectory.stats.cumulative_renormalization);
  if (trajectory.stats.max_simplex_deviation > 1e-9) return "step deviation above 1e-9";
  if (trajectory.stats.cumulative_renormalization > 1e-4) return detail.str();
  return "";
}

std::string equal_utility() {
  const auto start = std::chrono::steady_clock::now();
  const ReplicatorGame game = benchmark_game();
  const Trajectory trajectory = integrate_classical(game, DynamicsConfig{});
  const EquilibriumReport report = detect_equilibrium(game, trajectory);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!report.converged) return "did not converge";
  if (report.relative_utility_spread > 1e-3) {
    return "relative spread " + format_double(report.relative_utility_spread);
  }
  if (seconds > 60.0) return "runtime above 60 s";
  return "";
}

std::string fractional_reduction() {
  const ReplicatorGame game = benchmark_game();
  DynamicsConfig config;
  config.horizon = 30.0;
  config.stop_on_convergence = false;
  const Trajectory classical = integrate_classical(game, config);
  config.kind = DynamicsKind::fractional;
  config.order = 1.0;
  const Trajectory fractional = integrate_fractional(game, config);
  if (classical.states.size() != fractional.states.size()) return "grid mismatch";
  double gap = 0.0;
  for (std::size_t n = 0; n < classical.states.size(); ++n) {
    gap = std::max(gap,
                   (classical.states[n] - fractional.states[n]).lpNorm<Eigen::Infinity>());
  }
  return check(gap <= 1e-6, "max share gap " + format_double(gap));
}

std::string fractional_oracle() {
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  ode::CaputoIntegrator solver(
      [](double, const Eigen::VectorXd& y) { return Eigen::VectorXd(-y); }, 0.8, y0, 1e-3);
  const ode::Grid grid = solver.integrate(1.0);
  const double expected = oracles::mittag_leffler(0.8, -1.0);
  const double gap = std::abs(grid.states.back()[0] - expected);
  return check(gap <= 1e-3, "gap to series " + format_double(gap));
}

std::string delay_oracle() {
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  const auto lagged_decay = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& lag) {
    return Eigen::VectorXd(-lag);
  };
  const ode::Grid stable = ode::delayed_euler(lagged_decay, y0, 1.0, 0.005, 200.0, 1e9);
  if (std::abs(stable.states.back()[0]) >= 1e-3) {
    return "delta=1.0 did not decay: " + format_double(stable.states.back()[0]);
  }
  const ode::Grid unstable = ode::delayed_euler(lagged_decay, y0, 1.7, 0.005, 200.0, 1e9);
  const auto peak = [&](double from, double to) {
    double best = 0.0;
    for (std::size_t n = 0; n < unstable.times.size(); ++n) {
      if (unstable.times[n] >= from && unstable.times[n] <= to) {
        best = std::max(best, std::abs(unstable.states[n][0]));
      }
    }
    return best;
  };
  return check(peak(180, 200) > peak(80, 100), "delta=1.7 amplitude did not grow");
}

std::string delay_straddle() {
  const Scenario scenario = load_scenario(test_paths::two_provider());
  const ReplicatorGame game(build_economics(scenario), 0.1353352832366127);
  const DelayBound bound = delay_stability_bound(game);

  DynamicsConfig config;
  config.kind = DynamicsKind::delayed;
  config.horizon = 2500.0;
  config.delay = 0.0;
  const Trajectory baseline = integrate_delayed(game, config);
  const EquilibriumReport base_report = detect_equilibrium(game, baseline);
  if (!base_report.converged) return "undelayed run did not converge";
  const double t0 = base_report.time_to_converge;

  config.delay = 0.5 * bound.delta_star;
  const Trajectory half = integrate_delayed(game, config);
  const EquilibriumReport half_report = detect_equilibrium(game, half);
  if (!half_report.converged) return "half-bound run did not converge";
  const double gap = (half_report.equilibrium_shares - base_report.equilibrium_shares)
                         .lpNorm<Eigen::Infinity>();
  if (gap > 1e-2) return "half-bound equilibrium moved by " + format_double(gap);

  config.delay = 4.0 * bound.delta_star;
  config.horizon = 10.0 * t0;
  config.record_stride = 10;
  const Trajectory quadruple = integrate_delayed(game, config);
  const EquilibriumReport quad_report = detect_equilibrium(game, quadruple);
  return check(!quad_report.converged,
               "four-times-bound run converged inside ten baseline times");
}

std::string phase_algorithm() {
  // unit modulus and monotone objective across random channels
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ChannelSet ch = random_channels(seed, 4, 6);
    const PhaseOptimResult result = optimize_phase_shifts(ch);
    if (!result.converged) return "no convergence at seed " + std::to_string(seed);
    for (int e = 0; e < result.phases.element_count(); ++e) {
      if (std::abs(std::abs(result.phases.phases[e]) - 1.0) > 1e-15) {
        return "phase modulus off at seed " + std::to_string(seed);
      }
    }
    for (std::size_t i = 1; i < result.objective_history.size(); ++i) {
      if (result.objective_history[i] <
          result.objective_history[i - 1] * (1.0 - 1e-12)) {
        return "objective decreased at seed " + std::to_string(seed);
      }
    }
  }
  // single-element optimum against a 1e6-point grid
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ChannelSet ch = random_channels(1000 + seed, 4, 1, seed % 2 ? 1.0 : 1e-4);
    const PhaseOptimResult result = optimize_phase_shifts(ch);
    const double achieved = effective_channel(ch, result.phases).norm();
    double best = 0.0;
    PhaseShiftConfig probe;
    probe.phases = CVec(1);
    for (int i = 0; i < 1000000; ++i) {
      probe.phases[0] = std::polar(1.0, 2.0 * M_PI * i / 1000000.0);
      best = std::max(best, effective_channel(ch, probe).norm());
    }
    if (achieved < best * (1.0 - 1e-4)) {
      return "grid search beat the optimizer by " + format_double((best - achieved) / best);
    }
  }
  // exact beamformer power
  const ChannelSet ch = random_channels(77, 4, 8);
  const PhaseOptimResult optimum = optimize_phase_shifts(ch);
  for (const double power : {0.316227766, 1.0, 3.16227766}) {
    const Beamformer w = compute_beamformer(ch, optimum.phases, power);
    if (std::abs(w.weights.squaredNorm() - power) > 1e-12 * power) {
      return "beamformer power off at J=" + format_double(power);
    }
  }
  return "";
}

std::string picard_cross_validation() {
  const ReplicatorGame game = benchmark_game();
  DynamicsConfig config;
  config.horizon = 1.0;
  config.stop_on_convergence = false;
  const Trajectory euler = integrate_classical(game, config);
  const Trajectory picard = picard_solve(game, config);
  double gap = 0.0;
  for (std::size_t n = 0; n < euler.states.size(); ++n) {
    gap = std::max(gap, (euler.states[n] - picard.states[n]).lpNorm<Eigen::Infinity>());
  }
  return check(gap <= 1e-4, "max gap " + format_double(gap));
}

std::string claim_of(const std::string& experiment) {
  const ExperimentSpec spec = builtin_experiment(experiment, test_paths::scenario_dir());
  const ExperimentResult result = run_experiment(spec);
  if (!result.claim.checked) return "claim not evaluated";
  return check(result.claim.passed, result.claim.detail);
}

std::string determinism() {
  const ReplicatorGame game = benchmark_game();
  DynamicsConfig config;
  config.horizon = 10.0;
  config.stop_on_convergence = false;
  const std::string table_a = trajectory_table(integrate_classical(game, config)).to_csv();
  const std::string table_b = trajectory_table(integrate_classical(game, config)).to_csv();
  if (table_a != table_b) return "trajectory tables differ";

  const ExperimentSpec spec = builtin_experiment("fig9_no_irs", test_paths::scenario_dir());
  const ExperimentResult first = run_experiment(spec);
  const ExperimentResult second = run_experiment(spec, 2);
  if (first.tables.size() != second.tables.size()) return "table count differs";
  for (std::size_t i = 0; i < first.tables.size(); ++i) {
    if (first.tables[i].second.to_csv() != second.tables[i].second.to_csv()) {
      return "experiment table " + first.tables[i].first + " differs";
    }
  }
  return "";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"simplex-conservation", simplex_conservation},
      {"equal-utility-equilibrium", equal_utility},
      {"fractional-order-one-reduction", fractional_reduction},
      {"fractional-series-oracle", fractional_oracle},
      {"delay-solver-oracle", delay_oracle},
      {"delay-bound-straddle", delay_straddle},
      {"phase-shift-algorithm", phase_algorithm},
      {"picard-cross-validation", picard_cross_validation},
      {"panel-size-monotonicity", [] { return claim_of("fig8_irs_size"); }},
      {"reflection-benefit", [] { return claim_of("fig9_no_irs"); }},
      {"learning-rate-ordering", [] { return claim_of("fig9_learning_rate"); }},
      {"memory-order-ordering", [] { return claim_of("fig4_convergence"); }},
      {"byte-identical-outputs", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = criteria[i].run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool passed = detail.empty();
    failures += passed ? 0 : 1;
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << (i + 1 < 10 ? "0" : "") << i + 1 << " "
              << criteria[i].name << " (" << format_double(seconds) << "s)";
    if (!passed) std::cout << ": " << detail;
    std::cout << "\n";
  }
  std::cout << (failures == 0 ? "all criteria passed" : "criteria failed: ")
            << (failures == 0 ? "" : std::to_string(failures)) << "\n";
  return failures == 0 ? 0 : 1;
}
