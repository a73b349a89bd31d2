#include <doctest.h>
#include <random>

#include <cmath>

#include "irsevo/analysis.hpp"
#include "irsevo/errors.hpp"
#include "test_paths.hpp"

using namespace irsevo;

namespace {

GameEconomics economics_from_gains(const std::vector<double>& gains, int population) {
  GameEconomics economics;
  economics.population = population;
  for (const double gain : gains) {
    StrategyEconomics e;
    e.value = 1.0;
    e.rate_numerator = gain;
    economics.per_strategy.push_back(e);
  }
  return economics;
}

ReplicatorGame benchmark_game(double mu = 0.1353352832366127) {
  const Scenario scenario = load_scenario(test_paths::baseline());
  return ReplicatorGame(build_economics(scenario), mu);
}

}  // namespace

TEST_CASE("equilibrium detection") {
  const ReplicatorGame game = benchmark_game();

  SUBCASE("a converged run reports equal utilities") {
    DynamicsConfig config;
    const Trajectory trajectory = integrate_classical(game, config);
    const EquilibriumReport report = detect_equilibrium(game, trajectory);
    CHECK(report.converged);
    CHECK(report.relative_utility_spread <= 1e-3);
    CHECK(report.residual < 1e-6);
    CHECK(std::isfinite(report.time_to_converge));
  }

  SUBCASE("a truncated run is not converged") {
    DynamicsConfig config;
    config.horizon = 1.0;
    const Trajectory trajectory = integrate_classical(game, config);
    const EquilibriumReport report = detect_equilibrium(game, trajectory);
    CHECK_FALSE(report.converged);
  }

  SUBCASE("a single-strategy game is converged from the start") {
    const ReplicatorGame degenerate(economics_from_gains({3.0}, 5), 1.0);
    DynamicsConfig config;
    config.horizon = 2.0;
    const Trajectory trajectory = integrate_classical(degenerate, config);
    const EquilibriumReport report = detect_equilibrium(degenerate, trajectory);
    CHECK(report.converged);
    CHECK(report.time_to_converge == 0.0);
    CHECK(report.utility_spread == 0.0);
  }

  SUBCASE("loosening the tolerance never revokes convergence") {
    DynamicsConfig config;
    config.horizon = 40.0;
    config.stop_on_convergence = false;
    const Trajectory trajectory = integrate_classical(game, config);
    bool converged_before = false;
    for (const double tol : {1e-9, 1e-7, 1e-5, 1e-3, 1e-1}) {
      const bool converged = detect_equilibrium(game, trajectory, tol).converged;
      if (converged_before) CHECK(converged);
      converged_before = converged;
    }
  }
}

TEST_CASE("delay stability bound") {
  SUBCASE("matches the closed form on randomized economics") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> gain_draw(0.05, 30.0);
    std::uniform_real_distribution<double> mu_draw(0.01, 2.0);
    std::uniform_int_distribution<int> population_draw(2, 500);
    for (int trial = 0; trial < 25; ++trial) {
      const std::vector<double> gains = {gain_draw(rng), gain_draw(rng)};
      const int population = population_draw(rng);
      const double mu = mu_draw(rng);
      const ReplicatorGame game(economics_from_gains(gains, population), mu);
      const DelayBound bound = delay_stability_bound(game);
      const double kappa = mu * (gains[0] + gains[1]) / population;
      CHECK(bound.kappa == doctest::Approx(kappa).epsilon(1e-12));
      CHECK(bound.delta_star == doctest::Approx(M_PI / (2.0 * kappa)).epsilon(1e-12));
      CHECK(bound.theorem_scope);
    }
  }

  SUBCASE("a 0.02 decay rate caps the delay near 78.54") {
    // gains sum 2, population 100, unit learning rate
    const ReplicatorGame game(economics_from_gains({1.0, 1.0}, 100), 1.0);
    const DelayBound bound = delay_stability_bound(game);
    CHECK(bound.kappa == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(bound.delta_star == doctest::Approx(78.53981633974483).epsilon(1e-12));
  }

  SUBCASE("doubling the learning rate halves the bound") {
    const auto economics = economics_from_gains({1.0, 2.0}, 10);
    const DelayBound slow = delay_stability_bound(ReplicatorGame(economics, 0.1));
    const DelayBound fast = delay_stability_bound(ReplicatorGame(economics, 0.2));
    CHECK(slow.delta_star == doctest::Approx(2.0 * fast.delta_star).epsilon(1e-12));
  }

  SUBCASE("non-positive decay rate is rejected") {
    GameEconomics economics = economics_from_gains({0.0, 0.0}, 10);
    economics.per_strategy[0].element_cost = 1.0;  // gain -1
    const ReplicatorGame game(economics, 1.0);
    CHECK_THROWS_AS(delay_stability_bound(game), std::domain_error);
  }

  SUBCASE("larger games carry the heuristic marker") {
    const DelayBound bound = delay_stability_bound(benchmark_game());
    CHECK_FALSE(bound.theorem_scope);
    CHECK(bound.delta_star > 0.0);
  }
}

TEST_CASE("direction field") {
  const ReplicatorGame game = benchmark_game();
  DynamicsConfig config;
  config.convergence_tol = 1e-8;
  config.horizon = 400.0;
  const Trajectory trajectory = integrate_classical(game, config);
  const Eigen::VectorXd star = trajectory.states.back();

  const int axis_a = 0;
  const int axis_b = 4;
  const int closure = 5;
  const DirectionField field = direction_field(game, axis_a, axis_b, closure, star, 15);

  SUBCASE("the flow vanishes at the equilibrium") {
    CHECK(game.field(star).lpNorm<Eigen::Infinity>() < 1e-6);
  }

  SUBCASE("grid vectors agree with the replicator field and stay tangent") {
    REQUIRE(!field.points.empty());
    double budget = 1.0;
    for (int g = 0; g < game.group_count(); ++g) {
      if (g != axis_a && g != axis_b && g != closure) budget -= star[g];
    }
    Eigen::VectorXd shares = star;
    for (std::size_t i = 0; i < field.points.size(); ++i) {
      shares[axis_a] = field.points[i][0];
      shares[axis_b] = field.points[i][1];
      double rest = budget - field.points[i][0] - field.points[i][1];
      if (std::abs(rest) < 1e-15) rest = 0.0;
      shares[closure] = rest;
      const Eigen::VectorXd rate = game.field(shares);
      CHECK(rate[axis_a] == field.vectors[i][0]);
      CHECK(rate[axis_b] == field.vectors[i][1]);
      CHECK(std::abs(rate.sum()) <= 1e-12);
    }
  }

  SUBCASE("trajectories from random interior starts end at the equilibrium") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      DynamicsConfig random_start;
      random_start.initial_shares = dirichlet_shares(game.group_count(), seed);
      random_start.horizon = 400.0;
      const Trajectory path = integrate_classical(game, random_start);
      CHECK((path.states.back() - star).lpNorm<Eigen::Infinity>() <= 1e-3);
    }
  }

  SUBCASE("index validation") {
    CHECK_THROWS_AS(direction_field(game, 0, 0, 5, star, 10), ValidationError);
    CHECK_THROWS_AS(direction_field(game, 0, 1, 99, star, 10), ValidationError);
    CHECK_THROWS_AS(direction_field(game, 0, 1, 2, star, 1), ValidationError);
  }
}

TEST_CASE("adaptation metrics") {
  SUBCASE("a resting population has zero total variation") {
    const ReplicatorGame game(economics_from_gains({2.0, 2.0}, 10), 1.0);
    DynamicsConfig config;
    config.horizon = 3.0;
    config.stop_on_convergence = false;
    const Trajectory trajectory = integrate_classical(game, config);
    const AdaptationMetrics metrics = adaptation_metrics(trajectory, 10, 3.0);
    CHECK(metrics.early_total_variation == 0.0);
    for (const double tv : metrics.total_variation) CHECK(tv == 0.0);
    CHECK(metrics.total_utility.front() ==
          doctest::Approx(metrics.total_utility.back()).epsilon(1e-12));
  }

  SUBCASE("faster learning converges sooner") {
    double previous = std::numeric_limits<double>::infinity();
    for (const double mu : {0.049787068367863944, 0.1353352832366127, 0.36787944117144233}) {
      const ReplicatorGame game = benchmark_game(mu);
      DynamicsConfig config;
      config.learning_rate = mu;
      config.horizon = 600.0;
      const Trajectory trajectory = integrate_classical(game, config);
      const EquilibriumReport report = detect_equilibrium(game, trajectory);
      REQUIRE(report.converged);
      CHECK(report.time_to_converge < previous);
      previous = report.time_to_converge;
    }
  }
}
