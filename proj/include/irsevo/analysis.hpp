#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "irsevo/dynamics.hpp"

namespace irsevo {

struct EquilibriumReport {
  Eigen::VectorXd equilibrium_shares;
  double utility_spread = 0.0;           // max−min utility over active strategies
  double relative_utility_spread = 0.0;  // spread / |average utility|
  bool converged = false;
  double time_to_converge = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;  // max_g |dp_g/dt| at the final state
};

/// Equilibrium check on the final state: converged iff the field residual is
/// below `tol`; the utility spread counts only strategies with share above
/// `active_share`.
EquilibriumReport detect_equilibrium(const ReplicatorGame& game, const Trajectory& trajectory,
                                     double tol = 1e-6, double active_share = 1e-3);

struct DelayBound {
  double delta_star = 0.0;  // π / (2κ)
  double kappa = 0.0;       // μ Σ_g a_g / N
  /// The closed form is derived for two providers with one service each;
  /// outside that shape the bound is reported as a heuristic.
  bool theorem_scope = false;
};

/// Largest information delay with guaranteed convergence. Throws
/// std::domain_error when κ ≤ 0.
DelayBound delay_stability_bound(const ReplicatorGame& game);

struct DirectionField {
  int axis_a = 0;
  int axis_b = 0;
  int closure_strategy = 0;  // absorbs 1 − Σ others
  double evaluated_at_time = 0.0;
  std::vector<std::array<double, 2>> points;   // (p_a, p_b)
  std::vector<std::array<double, 2>> vectors;  // (dp_a/dt, dp_b/dt)
};

/// Replicator flow vectors on a triangular grid over two strategy shares.
/// Non-axis strategies keep their `fixed_shares` value except the closure
/// strategy, which absorbs the remainder of the simplex.
DirectionField direction_field(const ReplicatorGame& game, int axis_a, int axis_b,
                               int closure_strategy, const Eigen::VectorXd& fixed_shares,
                               int grid_n, double t_eval = 0.0);

struct AdaptationMetrics {
  double time_to_convergence = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> total_variation;  // Σ_g |Δp_g| per recorded step
  double early_total_variation = 0.0;   // accumulated over [0, early_window]
  double early_fluctuation = 0.0;       // max ‖p(t) − p(end)‖∞ over the window
  std::vector<double> total_utility;    // N·ū per recorded step
};

AdaptationMetrics adaptation_metrics(const Trajectory& trajectory, int population,
                                     double early_window);

}  // namespace irsevo
