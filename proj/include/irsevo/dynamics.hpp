#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "irsevo/utility.hpp"

namespace irsevo {

enum class DynamicsKind { classical, delayed, fractional };

struct DynamicsConfig {
  DynamicsKind kind = DynamicsKind::classical;
  double learning_rate = 0.1353352832366127;  // e^-2
  double delay = 0.0;        // delayed kind only, time units
  double order = 1.0;        // fractional kind only, in (0,2); 1 reduces to classical
  double step = 0.01;
  double horizon = 200.0;
  Eigen::VectorXd initial_shares;  // empty => uniform 1/G

  double convergence_tol = 1e-6;  // on max_g |dp_g/dt|
  int convergence_window = 100;   // consecutive steps below tol
  bool stop_on_convergence = true;
  int record_stride = 1;
  int memory_window = 0;  // fractional: history length in steps, 0 = full
};

void validate_config(const DynamicsConfig& config, int group_count);

/// Uniform 1/G start.
Eigen::VectorXd uniform_shares(int group_count);

/// Flat-Dirichlet random start (normalized exponentials), deterministic in seed.
Eigen::VectorXd dirichlet_shares(int group_count, std::uint64_t seed);

struct SolverStats {
  long steps = 0;
  double cumulative_renormalization = 0.0;  // Σ per-step L1 adjustment
  double max_simplex_deviation = 0.0;       // max |Σp - 1| before renormalizing
  double min_share = 0.0;                   // most negative raw share seen
  double final_residual = std::numeric_limits<double>::infinity();
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> utilities;
  std::vector<double> average_utilities;
  std::optional<double> converged_at;
  SolverStats stats;

  int group_count() const {
    return states.empty() ? 0 : static_cast<int>(states.front().size());
  }
};

/// Replicator field of the selection game, bound to fixed economics.
///
/// Utilities diverge as a share approaches zero, but the replicator product
/// p_g u_g stays finite: p_g u_g = a_g / N with a_g the group gain. The field
/// is computed in that product form, with exact zeros excluded from the
/// average so that extinct strategies keep a field component of exactly zero.
class ReplicatorGame {
 public:
  ReplicatorGame(GameEconomics economics, double learning_rate,
                 bool printed_cost_sign = false);

  int group_count() const { return static_cast<int>(gains_.size()); }
  int population() const { return economics_.population; }
  double learning_rate() const { return learning_rate_; }
  const Eigen::VectorXd& gains() const { return gains_; }
  const GameEconomics& economics() const { return economics_; }

  /// dp_g/dt = μ (a_g 1[p_g>0] − p_g Σ_{h active} a_h) / N.
  void field(const Eigen::VectorXd& shares, Eigen::VectorXd& out) const;
  Eigen::VectorXd field(const Eigen::VectorXd& shares) const;

  /// Per-strategy utility a_g/(p_g N); extinct strategies report 0.
  Eigen::VectorXd utilities(const Eigen::VectorXd& shares) const;
  double average_utility(const Eigen::VectorXd& shares) const;

 private:
  GameEconomics economics_;
  double learning_rate_ = 0.0;
  Eigen::VectorXd gains_;
};

/// Forward Euler with per-step clamping of negative shares and simplex
/// renormalization; the adjustments are accumulated in SolverStats.
Trajectory integrate_classical(const ReplicatorGame& game, const DynamicsConfig& config);

/// Euler with a history ring buffer; the entire right side is evaluated at
/// t − δ. Constant pre-history equal to the initial state. delay = 0 takes
/// the identical code path as integrate_classical.
Trajectory integrate_delayed(const ReplicatorGame& game, const DynamicsConfig& config);

/// Fractional-order integrator (predictor–corrector on the Volterra form).
/// order = 1 delegates to the classical Euler path.
Trajectory integrate_fractional(const ReplicatorGame& game, const DynamicsConfig& config);

/// Dispatch on config.kind.
Trajectory integrate(const ReplicatorGame& game, const DynamicsConfig& config);

/// Whole-horizon fixed-point iteration p ← p⁰ + ∫ field(p) with trapezoidal
/// quadrature; cross-validates the Euler path. Returns the converged grid
/// along with per-sweep residuals in `sweep_residuals`.
Trajectory picard_solve(const ReplicatorGame& game, const DynamicsConfig& config,
                        int max_sweeps = 50, double sweep_tol = 1e-10,
                        std::vector<double>* sweep_residuals = nullptr);

// ---------------------------------------------------------------------------
// Generic fixed-step solvers (also used by oracle self-tests).
// ---------------------------------------------------------------------------
namespace ode {

using Field = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& y)>;
using LaggedField =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& y_lagged)>;

struct Grid {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

/// Plain forward Euler. Throws NumericalError when |y|∞ exceeds blow_up_limit.
Grid euler(const Field& field, const Eigen::VectorXd& y0, double step, double horizon,
           double blow_up_limit = 1e6);

/// Euler for y' = f(t, y(t), y(t−δ)) with constant pre-history y0.
Grid delayed_euler(const LaggedField& field, const Eigen::VectorXd& y0, double delay,
                   double step, double horizon, double blow_up_limit = 1e6);

/// Adams–Bashforth–Moulton predictor–corrector for a Caputo derivative of
/// order β ∈ (0,2) (Volterra form with product-rectangle predictor and
/// product-trapezoid corrector). For β > 1 the extra initial condition is
/// the slope ydot0. Cost is O(n²) in the step count unless memory_window
/// truncates the convolution. The optional post_step hook may project the
/// state after each step; the history stores fields of projected states.
class CaputoIntegrator {
 public:
  using PostStep = std::function<void(Eigen::VectorXd& y)>;

  CaputoIntegrator(Field field, double order, Eigen::VectorXd y0, double step,
                   Eigen::VectorXd ydot0 = {}, int memory_window = 0);

  void set_post_step(PostStep hook) { post_step_ = std::move(hook); }

  const Eigen::VectorXd& state() const { return state_; }
  double time() const { return static_cast<double>(step_count_) * step_; }
  long step_count() const { return step_count_; }

  /// Field history f(t_j, y_j), one entry per completed step (plus t=0).
  std::vector<Eigen::VectorXd>& history() { return field_history_; }

  void advance();  // one step
  Grid integrate(double horizon, double blow_up_limit = 1e6);

 private:
  Eigen::VectorXd lead_term(double t) const;

  Field field_;
  double order_;
  double step_;
  Eigen::VectorXd initial_;
  Eigen::VectorXd initial_slope_;
  Eigen::VectorXd state_;
  std::vector<Eigen::VectorXd> field_history_;
  long step_count_ = 0;
  int memory_window_ = 0;
  PostStep post_step_;
};

}  // namespace ode
}  // namespace irsevo
