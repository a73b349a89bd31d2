#include "irsevo/analysis.hpp"

#include <cmath>

#include "irsevo/errors.hpp"

namespace irsevo {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EquilibriumReport detect_equilibrium(const ReplicatorGame& game, const Trajectory& trajectory,
                                     double tol, double active_share) {
  if (trajectory.states.empty()) {
    throw ValidationError("detect_equilibrium: empty trajectory");
  }
  EquilibriumReport report;
  const Eigen::VectorXd& final_state = trajectory.states.back();
  report.equilibrium_shares = final_state;
  report.residual = game.field(final_state).lpNorm<Eigen::Infinity>();
  report.converged = report.residual < tol;

  // Time to convergence: the earliest recorded time after which the residual
  // never rises above tol again. A single zero crossing of an oscillating
  // flow does not count.
  if (report.converged) {
    std::size_t first_settled = trajectory.states.size() - 1;
    for (std::size_t n = trajectory.states.size(); n-- > 0;) {
      if (game.field(trajectory.states[n]).lpNorm<Eigen::Infinity>() >= tol) break;
      first_settled = n;
    }
    report.time_to_converge = trajectory.times[first_settled];
  }

  const Eigen::VectorXd utilities = game.utilities(final_state);
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < game.group_count(); ++g) {
    if (final_state[g] > active_share) {
      lowest = std::min(lowest, utilities[g]);
      highest = std::max(highest, utilities[g]);
    }
  }
  if (highest >= lowest) {
    report.utility_spread = highest - lowest;
    const double average = game.average_utility(final_state);
    report.relative_utility_spread =
        average != 0.0 ? report.utility_spread / std::abs(average) : report.utility_spread;
  }
  return report;
}

DelayBound delay_stability_bound(const ReplicatorGame& game) {
  DelayBound bound;
  bound.kappa = game.learning_rate() * game.gains().sum() / game.population();
  if (!(bound.kappa > 0)) {
    throw std::domain_error("delay_stability_bound: non-positive decay rate, bound is undefined");
  }
  bound.delta_star = kPi / (2.0 * bound.kappa);

  // The closed form is derived for two providers with one service each;
  // anything else reports the bound as a heuristic.
  bound.theorem_scope = game.group_count() == 2;
  return bound;
}

DirectionField direction_field(const ReplicatorGame& game, int axis_a, int axis_b,
                               int closure_strategy, const Eigen::VectorXd& fixed_shares,
                               int grid_n, double t_eval) {
  const int g_count = game.group_count();
  if (axis_a < 0 || axis_a >= g_count || axis_b < 0 || axis_b >= g_count ||
      closure_strategy < 0 || closure_strategy >= g_count) {
    throw ValidationError("direction_field: strategy index out of range");
  }
  if (axis_a == axis_b || axis_a == closure_strategy || axis_b == closure_strategy) {
    throw ValidationError("direction_field: axes and closure strategy must be distinct");
  }
  if (fixed_shares.size() != g_count) {
    throw ValidationError("direction_field: fixed_shares must have length G");
  }
  if (grid_n < 2) throw ValidationError("direction_field: grid_n must be >= 2");

  double fixed_total = 0.0;
  for (int g = 0; g < g_count; ++g) {
    if (g == axis_a || g == axis_b || g == closure_strategy) continue;
    if (fixed_shares[g] < 0) throw ValidationError("direction_field: negative fixed share");
    fixed_total += fixed_shares[g];
  }
  const double budget = 1.0 - fixed_total;
  if (budget < 0) throw ValidationError("direction_field: fixed shares exceed the simplex");

  DirectionField field;
  field.axis_a = axis_a;
  field.axis_b = axis_b;
  field.closure_strategy = closure_strategy;
  field.evaluated_at_time = t_eval;

  Eigen::VectorXd shares = fixed_shares;
  Eigen::VectorXd rate(g_count);
  for (int ia = 0; ia < grid_n; ++ia) {
    for (int ib = 0; ib < grid_n; ++ib) {
      const double pa = budget * ia / (grid_n - 1);
      const double pb = budget * ib / (grid_n - 1);
      if (pa + pb > budget + 1e-12) continue;  // triangular grid
      shares[axis_a] = pa;
      shares[axis_b] = pb;
      // Snap float residue to an exact zero: the field treats exact zeros as
      // extinct, so boundary points must not carry ±1e-17 leftovers.
      double rest = budget - pa - pb;
      if (std::abs(rest) < 1e-15) rest = 0.0;
      shares[closure_strategy] = rest;
      game.field(shares, rate);
      field.points.push_back({pa, pb});
      field.vectors.push_back({rate[axis_a], rate[axis_b]});
    }
  }
  return field;
}

AdaptationMetrics adaptation_metrics(const Trajectory& trajectory, int population,
                                     double early_window) {
  if (trajectory.states.empty()) {
    throw ValidationError("adaptation_metrics: empty trajectory");
  }
  AdaptationMetrics metrics;
  if (trajectory.converged_at) metrics.time_to_convergence = *trajectory.converged_at;

  const Eigen::VectorXd& final_state = trajectory.states.back();
  metrics.total_variation.reserve(trajectory.states.size());
  metrics.total_utility.reserve(trajectory.states.size());
  metrics.total_utility.push_back(population * trajectory.average_utilities.front());

  for (std::size_t n = 1; n < trajectory.states.size(); ++n) {
    const double tv = (trajectory.states[n] - trajectory.states[n - 1]).lpNorm<1>();
    metrics.total_variation.push_back(tv);
    metrics.total_utility.push_back(population * trajectory.average_utilities[n]);
    if (trajectory.times[n] <= early_window) {
      metrics.early_total_variation += tv;
      metrics.early_fluctuation =
          std::max(metrics.early_fluctuation,
                   (trajectory.states[n] - final_state).lpNorm<Eigen::Infinity>());
    }
  }
  return metrics;
}

}  // namespace irsevo
