#include "irsevo/dynamics.hpp"

#include <cmath>
#include <random>

#include "irsevo/errors.hpp"

namespace irsevo {

void validate_config(const DynamicsConfig& config, int group_count) {
  if (!(config.step > 0)) throw ValidationError("step: must be positive");
  if (!(config.horizon >= config.step)) throw ValidationError("horizon: must be at least one step");
  if (!(config.learning_rate > 0)) throw ValidationError("mu: must be positive");
  if (config.delay < 0) throw ValidationError("delta: must be non-negative");
  if (config.kind == DynamicsKind::fractional &&
      !(config.order > 0.0 && config.order < 2.0)) {
    throw ValidationError("beta: must lie in (0,2)");
  }
  if (config.convergence_window < 1) throw ValidationError("convergence_window: must be >= 1");
  if (config.record_stride < 1) throw ValidationError("record_stride: must be >= 1");
  if (config.memory_window < 0) throw ValidationError("memory_window: must be >= 0");
  if (config.initial_shares.size() != 0) {
    if (config.initial_shares.size() != group_count) {
      throw ValidationError("initial_shares: expected length G=" + std::to_string(group_count));
    }
    if (!on_simplex(config.initial_shares)) {
      throw ValidationError("initial_shares: not on the simplex");
    }
  }
}

Eigen::VectorXd uniform_shares(int group_count) {
  return Eigen::VectorXd::Constant(group_count, 1.0 / group_count);
}

Eigen::VectorXd dirichlet_shares(int group_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exponential(1.0);
  Eigen::VectorXd shares(group_count);
  for (int g = 0; g < group_count; ++g) shares[g] = exponential(rng);
  shares /= shares.sum();
  return shares;
}

ReplicatorGame::ReplicatorGame(GameEconomics economics, double learning_rate,
                               bool printed_cost_sign)
    : economics_(std::move(economics)), learning_rate_(learning_rate) {
  if (!(learning_rate > 0)) throw ValidationError("mu: must be positive");
  if (economics_.population < 1) throw ValidationError("population: must be positive");
  gains_ = economics_.group_gains(printed_cost_sign);
}

void ReplicatorGame::field(const Eigen::VectorXd& shares, Eigen::VectorXd& out) const {
  const int g_count = group_count();
  if (shares.size() != g_count) throw ValidationError("field: share vector has wrong length");
  out.resize(g_count);
  // Σ over strategies with non-zero share only, so exact zeros are absorbing.
  double active_gain = 0.0;
  for (int g = 0; g < g_count; ++g) {
    if (shares[g] != 0.0) active_gain += gains_[g];
  }
  const double scale = learning_rate_ / economics_.population;
  for (int g = 0; g < g_count; ++g) {
    out[g] = shares[g] == 0.0 ? 0.0 : scale * (gains_[g] - shares[g] * active_gain);
  }
}

Eigen::VectorXd ReplicatorGame::field(const Eigen::VectorXd& shares) const {
  Eigen::VectorXd out;
  field(shares, out);
  return out;
}

Eigen::VectorXd ReplicatorGame::utilities(const Eigen::VectorXd& shares) const {
  const int g_count = group_count();
  Eigen::VectorXd result(g_count);
  for (int g = 0; g < g_count; ++g) {
    result[g] =
        shares[g] > 0.0 ? gains_[g] / (shares[g] * economics_.population) : 0.0;
  }
  return result;
}

double ReplicatorGame::average_utility(const Eigen::VectorXd& shares) const {
  double total = 0.0;
  for (int g = 0; g < group_count(); ++g) {
    if (shares[g] > 0.0) total += gains_[g];
  }
  return total / economics_.population;
}

namespace {

void project_to_simplex(Eigen::VectorXd& shares, SolverStats& stats) {
  double adjustment = 0.0;
  for (Eigen::Index g = 0; g < shares.size(); ++g) {
    if (shares[g] < 0.0) {
      stats.min_share = std::min(stats.min_share, shares[g]);
      adjustment += -shares[g];
      shares[g] = 0.0;
    }
  }
  const double sum = shares.sum();
  stats.max_simplex_deviation = std::max(stats.max_simplex_deviation, std::abs(sum - 1.0));
  if (!(sum > 0.0)) {
    throw NumericalError("integration lost the whole population; reduce the step size");
  }
  if (sum != 1.0) {
    adjustment += shares.lpNorm<1>() * std::abs(1.0 / sum - 1.0);
    shares /= sum;
  }
  stats.cumulative_renormalization += adjustment;
}

struct Recorder {
  Trajectory* trajectory;
  const ReplicatorGame* game;
  int stride;

  void operator()(long step_index, double time, const Eigen::VectorXd& state, bool force) {
    if (!force && step_index % stride != 0) return;
    if (!trajectory->times.empty() && trajectory->times.back() == time) return;
    trajectory->times.push_back(time);
    trajectory->states.push_back(state);
    trajectory->utilities.push_back(game->utilities(state));
    trajectory->average_utilities.push_back(game->average_utility(state));
  }
};

class ConvergenceWatch {
 public:
  ConvergenceWatch(double tol, long window) : tol_(tol), window_(window) {}

  // Returns true the first time the residual stayed below tol for `window`
  // consecutive steps.
  bool update(double residual) {
    below_ = residual < tol_ ? below_ + 1 : 0;
    if (below_ >= window_ && !fired_) {
      fired_ = true;
      return true;
    }
    return false;
  }

 private:
  double tol_;
  long window_;
  long below_ = 0;
  bool fired_ = false;
};

Eigen::VectorXd starting_shares(const ReplicatorGame& game, const DynamicsConfig& config) {
  return config.initial_shares.size() == 0 ? uniform_shares(game.group_count())
                                           : config.initial_shares;
}

constexpr double kBlowUpLimit = 10.0;

// Shared Euler loop; the classical integrator is the lag_steps = 0 case.
Trajectory run_game_euler(const ReplicatorGame& game, const DynamicsConfig& config,
                          long lag_steps) {
  const double h = config.step;
  const long total_steps = std::max<long>(1, std::llround(config.horizon / h));
  const Eigen::VectorXd initial = starting_shares(game, config);

  Trajectory trajectory;
  Recorder record{&trajectory, &game, config.record_stride};
  // A delayed flow rings at period ~4δ near the stability boundary; the
  // sustained-residual window has to cover a full period or it fires inside
  // an oscillation trough while the envelope is still large.
  const long window_steps =
      std::max<long>(config.convergence_window, 4 * lag_steps);
  ConvergenceWatch watch(config.convergence_tol, window_steps);

  const long ring_size = lag_steps + 1;
  std::vector<Eigen::VectorXd> ring(static_cast<std::size_t>(ring_size));
  ring[0] = initial;

  Eigen::VectorXd state = initial;
  Eigen::VectorXd rate(game.group_count());
  record(0, 0.0, state, true);

  for (long n = 0; n < total_steps; ++n) {
    const Eigen::VectorXd& lagged =
        lag_steps == 0 ? state
                       : (n - lag_steps < 0 ? initial
                                            : ring[static_cast<std::size_t>((n - lag_steps) %
                                                                            ring_size)]);
    game.field(lagged, rate);
    trajectory.stats.final_residual = rate.lpNorm<Eigen::Infinity>();

    state += h * rate;
    if (state.lpNorm<Eigen::Infinity>() > kBlowUpLimit) {
      throw NumericalError("integration diverged (share above " +
                           std::to_string(kBlowUpLimit) + "); reduce the step size");
    }
    project_to_simplex(state, trajectory.stats);
    if (lag_steps > 0) ring[static_cast<std::size_t>((n + 1) % ring_size)] = state;
    ++trajectory.stats.steps;

    const double time = static_cast<double>(n + 1) * h;
    record(n + 1, time, state, n + 1 == total_steps);
    if (watch.update(trajectory.stats.final_residual)) {
      trajectory.converged_at = time;
      if (config.stop_on_convergence) {
        record(n + 1, time, state, true);
        break;
      }
    }
  }
  return trajectory;
}

}  // namespace

Trajectory integrate_classical(const ReplicatorGame& game, const DynamicsConfig& config) {
  validate_config(config, game.group_count());
  return run_game_euler(game, config, 0);
}

Trajectory integrate_delayed(const ReplicatorGame& game, const DynamicsConfig& config) {
  validate_config(config, game.group_count());
  const long lag_steps = std::llround(config.delay / config.step);
  return run_game_euler(game, config, std::max<long>(0, lag_steps));
}

Trajectory integrate_fractional(const ReplicatorGame& game, const DynamicsConfig& config) {
  validate_config(config, game.group_count());
  if (!(config.order > 0.0 && config.order < 2.0)) {
    throw ValidationError("beta: must lie in (0,2)");
  }
  if (config.order == 1.0) {
    return run_game_euler(game, config, 0);  // order one is the classical game
  }

  const double h = config.step;
  const long total_steps = std::max<long>(1, std::llround(config.horizon / h));
  const Eigen::VectorXd initial = starting_shares(game, config);

  Trajectory trajectory;
  Recorder record{&trajectory, &game, config.record_stride};
  ConvergenceWatch watch(config.convergence_tol, config.convergence_window);

  ode::CaputoIntegrator solver(
      [&game](double, const Eigen::VectorXd& y) { return game.field(y); }, config.order,
      initial, h, game.field(initial), config.memory_window);
  solver.set_post_step(
      [&trajectory](Eigen::VectorXd& y) { project_to_simplex(y, trajectory.stats); });

  record(0, 0.0, initial, true);
  for (long n = 0; n < total_steps; ++n) {
    solver.advance();
    ++trajectory.stats.steps;
    const Eigen::VectorXd& state = solver.state();
    if (state.lpNorm<Eigen::Infinity>() > kBlowUpLimit) {
      throw NumericalError("integration diverged (share above " +
                           std::to_string(kBlowUpLimit) + "); reduce the step size");
    }
    trajectory.stats.final_residual = solver.history().back().lpNorm<Eigen::Infinity>();

    const double time = static_cast<double>(n + 1) * h;
    record(n + 1, time, state, n + 1 == total_steps);
    if (watch.update(trajectory.stats.final_residual)) {
      trajectory.converged_at = time;
      if (config.stop_on_convergence) {
        record(n + 1, time, state, true);
        break;
      }
    }
  }
  return trajectory;
}

Trajectory integrate(const ReplicatorGame& game, const DynamicsConfig& config) {
  switch (config.kind) {
    case DynamicsKind::classical:
      return integrate_classical(game, config);
    case DynamicsKind::delayed:
      return integrate_delayed(game, config);
    case DynamicsKind::fractional:
      return integrate_fractional(game, config);
  }
  throw ValidationError("kind: unknown dynamics kind");
}

Trajectory picard_solve(const ReplicatorGame& game, const DynamicsConfig& config,
                        int max_sweeps, double sweep_tol,
                        std::vector<double>* sweep_residuals) {
  validate_config(config, game.group_count());
  if (max_sweeps < 1) throw ValidationError("sweeps: must be >= 1");

  const double h = config.step;
  const long total_steps = std::max<long>(1, std::llround(config.horizon / h));
  const Eigen::VectorXd initial = starting_shares(game, config);

  std::vector<Eigen::VectorXd> grid(static_cast<std::size_t>(total_steps) + 1, initial);
  std::vector<Eigen::VectorXd> fields(grid.size());

  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t n = 0; n < grid.size(); ++n) fields[n] = game.field(grid[n]);

    residual = 0.0;
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(game.group_count());
    for (std::size_t n = 1; n < grid.size(); ++n) {
      integral += 0.5 * h * (fields[n - 1] + fields[n]);
      Eigen::VectorXd updated = initial + integral;
      residual = std::max(residual, (updated - grid[n]).lpNorm<Eigen::Infinity>());
      grid[n] = std::move(updated);
    }
    if (sweep_residuals) sweep_residuals->push_back(residual);
    if (residual < sweep_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("picard_solve: sweeps exhausted, residual " + std::to_string(residual));
  }

  Trajectory trajectory;
  ConvergenceWatch watch(config.convergence_tol, config.convergence_window);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double time = static_cast<double>(n) * h;
    trajectory.times.push_back(time);
    trajectory.states.push_back(grid[n]);
    trajectory.utilities.push_back(game.utilities(grid[n]));
    trajectory.average_utilities.push_back(game.average_utility(grid[n]));
    const double rate = game.field(grid[n]).lpNorm<Eigen::Infinity>();
    trajectory.stats.final_residual = rate;
    trajectory.stats.max_simplex_deviation =
        std::max(trajectory.stats.max_simplex_deviation, std::abs(grid[n].sum() - 1.0));
    if (!trajectory.converged_at && watch.update(rate)) trajectory.converged_at = time;
  }
  trajectory.stats.steps = total_steps;
  return trajectory;
}

// ---------------------------------------------------------------------------
// Generic solvers
// ---------------------------------------------------------------------------
namespace ode {

namespace {
void check_blow_up(const Eigen::VectorXd& y, double limit) {
  if (!y.allFinite() || y.lpNorm<Eigen::Infinity>() > limit) {
    throw NumericalError("integration diverged; reduce the step size");
  }
}
}  // namespace

Grid euler(const Field& field, const Eigen::VectorXd& y0, double step, double horizon,
           double blow_up_limit) {
  const long total_steps = std::max<long>(1, std::llround(horizon / step));
  Grid grid;
  grid.times.reserve(total_steps + 1);
  grid.states.reserve(total_steps + 1);
  grid.times.push_back(0.0);
  grid.states.push_back(y0);
  Eigen::VectorXd y = y0;
  for (long n = 0; n < total_steps; ++n) {
    y += step * field(static_cast<double>(n) * step, y);
    check_blow_up(y, blow_up_limit);
    grid.times.push_back(static_cast<double>(n + 1) * step);
    grid.states.push_back(y);
  }
  return grid;
}

Grid delayed_euler(const LaggedField& field, const Eigen::VectorXd& y0, double delay,
                   double step, double horizon, double blow_up_limit) {
  if (delay < 0) throw ValidationError("delay: must be non-negative");
  const long total_steps = std::max<long>(1, std::llround(horizon / step));
  const long lag_steps = std::max<long>(0, std::llround(delay / step));
  Grid grid;
  grid.times.reserve(total_steps + 1);
  grid.states.reserve(total_steps + 1);
  grid.times.push_back(0.0);
  grid.states.push_back(y0);
  Eigen::VectorXd y = y0;
  for (long n = 0; n < total_steps; ++n) {
    const Eigen::VectorXd& lagged =
        n - lag_steps < 0 ? y0 : grid.states[static_cast<std::size_t>(n - lag_steps)];
    y += step * field(static_cast<double>(n) * step, y, lagged);
    check_blow_up(y, blow_up_limit);
    grid.times.push_back(static_cast<double>(n + 1) * step);
    grid.states.push_back(y);
  }
  return grid;
}

CaputoIntegrator::CaputoIntegrator(Field field, double order, Eigen::VectorXd y0, double step,
                                   Eigen::VectorXd ydot0, int memory_window)
    : field_(std::move(field)),
      order_(order),
      step_(step),
      initial_(std::move(y0)),
      initial_slope_(std::move(ydot0)),
      state_(initial_),
      memory_window_(memory_window) {
  if (!(order_ > 0.0 && order_ < 2.0)) throw ValidationError("order: must lie in (0,2)");
  if (!(step_ > 0.0)) throw ValidationError("step: must be positive");
  if (order_ > 1.0 && initial_slope_.size() != initial_.size()) {
    throw ValidationError("order > 1 requires an initial slope of matching length");
  }
  field_history_.push_back(field_(0.0, initial_));
}

Eigen::VectorXd CaputoIntegrator::lead_term(double t) const {
  if (order_ > 1.0) return initial_ + t * initial_slope_;
  return initial_;
}

void CaputoIntegrator::advance() {
  const long n = step_count_;  // completed steps; computing state n+1
  const double beta = order_;
  const double h_beta = std::pow(step_, beta);
  const double t_next = static_cast<double>(n + 1) * step_;
  const long window_start =
      memory_window_ > 0 ? std::max<long>(0, n + 1 - memory_window_) : 0;

  // Predictor: product-rectangle weights b_j ∝ (n+1-j)^β - (n-j)^β.
  Eigen::VectorXd predictor = Eigen::VectorXd::Zero(initial_.size());
  for (long j = window_start; j <= n; ++j) {
    const double steps_away = static_cast<double>(n + 1 - j);
    const double weight = std::pow(steps_away, beta) - std::pow(steps_away - 1.0, beta);
    predictor += weight * field_history_[static_cast<std::size_t>(j)];
  }
  predictor = lead_term(t_next) + (h_beta / std::tgamma(beta + 1.0)) * predictor;

  const Eigen::VectorXd predicted_field = field_(t_next, predictor);

  // Corrector: product-trapezoid weights.
  Eigen::VectorXd corrector = predicted_field;  // weight 1 on the predicted node
  for (long j = window_start; j <= n; ++j) {
    double weight;
    if (j == 0) {
      const double dn = static_cast<double>(n);
      weight = std::pow(dn, beta + 1.0) - (dn - beta) * std::pow(dn + 1.0, beta);
    } else {
      const double away = static_cast<double>(n - j);
      weight = std::pow(away + 2.0, beta + 1.0) + std::pow(away, beta + 1.0) -
               2.0 * std::pow(away + 1.0, beta + 1.0);
    }
    corrector += weight * field_history_[static_cast<std::size_t>(j)];
  }
  state_ = lead_term(t_next) + (h_beta / std::tgamma(beta + 2.0)) * corrector;

  if (post_step_) post_step_(state_);
  field_history_.push_back(field_(t_next, state_));
  ++step_count_;
}

Grid CaputoIntegrator::integrate(double horizon, double blow_up_limit) {
  const long total_steps = std::max<long>(1, std::llround(horizon / step_));
  Grid grid;
  grid.times.reserve(total_steps + 1);
  grid.states.reserve(total_steps + 1);
  grid.times.push_back(time());
  grid.states.push_back(state_);
  for (long n = 0; n < total_steps; ++n) {
    advance();
    check_blow_up(state_, blow_up_limit);
    grid.times.push_back(time());
    grid.states.push_back(state_);
  }
  return grid;
}

}  // namespace ode
}  // namespace irsevo
