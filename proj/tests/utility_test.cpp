#include <doctest.h>

#include <cmath>
#include <random>

#include "irsevo/errors.hpp"
#include "irsevo/utility.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

using namespace irsevo;

TEST_CASE("tdma sinr") {
  const Scenario scenario = load_scenario(test_paths::baseline());
  const Strategy& strategy = scenario.strategies[1];  // sp1.irs1.k2.j1, 30 dBm
  const ChannelSet ch = synthesize_channels(scenario, strategy);
  const PhaseOptimResult optimum = optimize_phase_shifts(ch);
  const Beamformer w = compute_beamformer(ch, optimum.phases, 1.0);
  const double bandwidth = 2e6;
  const double noise = scenario.physics.noise_psd_w_per_hz;

  SUBCASE("zero beamformer gives zero sinr") {
    Beamformer silent;
    silent.weights = CVec::Zero(4);
    silent.power_w = 0.0;
    CHECK(sinr(ch, optimum.phases, silent, bandwidth, noise) == 0.0);
  }

  SUBCASE("noise scales with bandwidth") {
    const double eta = sinr(ch, optimum.phases, w, bandwidth, noise);
    CHECK(sinr(ch, optimum.phases, w, 2 * bandwidth, noise) ==
          doctest::Approx(eta / 2).epsilon(1e-12));
  }

  SUBCASE("independent dense evaluation agrees") {
    std::vector<std::complex<double>> h(4), h_iu(16), theta(16), weights(4);
    std::vector<std::vector<std::complex<double>>> g(16, std::vector<std::complex<double>>(4));
    for (int i = 0; i < 4; ++i) h[i] = ch.direct[i];
    for (int e = 0; e < 16; ++e) {
      h_iu[e] = ch.irs_user[e];
      theta[e] = optimum.phases.phases[e];
      for (int i = 0; i < 4; ++i) g[e][i] = ch.bs_irs(e, i);
    }
    for (int i = 0; i < 4; ++i) weights[i] = w.weights[i];
    const double reference =
        oracles::sinr_reference(h, h_iu, g, theta, weights, bandwidth, noise);
    const double eta = sinr(ch, optimum.phases, w, bandwidth, noise);
    CHECK(eta == doctest::Approx(reference).epsilon(1e-10));
  }
}

TEST_CASE("sinr with co-scheduled users") {
  const Scenario scenario = load_scenario(test_paths::baseline());
  const ChannelSet ch = synthesize_channels(scenario, scenario.strategies[0]);
  const PhaseOptimResult optimum = optimize_phase_shifts(ch);
  const Beamformer w = compute_beamformer(ch, optimum.phases, 1.0);
  const CRow combined = effective_channel(ch, optimum.phases);
  const double bandwidth = 2e6;
  const double noise = scenario.physics.noise_psd_w_per_hz;

  SUBCASE("single user reduces to the tdma form") {
    CHECK(sinr_with_interference(combined, {w}, 0, bandwidth, noise) ==
          doctest::Approx(sinr(ch, optimum.phases, w, bandwidth, noise)).epsilon(1e-12));
  }

  SUBCASE("a silent interferer changes nothing") {
    Beamformer silent;
    silent.weights = CVec::Zero(4);
    CHECK(sinr_with_interference(combined, {w, silent}, 0, bandwidth, noise) ==
          doctest::Approx(sinr_with_interference(combined, {w}, 0, bandwidth, noise))
              .epsilon(1e-12));
  }

  SUBCASE("two identical users split signal and interference symmetrically") {
    const double signal = std::norm((combined * w.weights).value());
    const double expected = signal / (signal + bandwidth * noise);
    CHECK(sinr_with_interference(combined, {w, w}, 0, bandwidth, noise) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("expected rate") {
  StrategyEconomics economics;
  economics.rate_numerator = 2e6 * std::log2(1.0 + 1e3);
  economics.value = 1e-6;

  CHECK(economics.rate_numerator == doctest::Approx(1.9932e7).epsilon(3e-4));
  CHECK(expected_rate(economics, 1.0, 1) ==
        doctest::Approx(economics.rate_numerator).epsilon(1e-12));
  CHECK(expected_rate(economics, 0.25, 100) ==
        doctest::Approx(2.0 * expected_rate(economics, 0.5, 100)).epsilon(1e-12));
  CHECK_THROWS_AS(expected_rate(economics, 0.0, 100), std::domain_error);
}

TEST_CASE("strategy utility") {
  StrategyEconomics economics;
  economics.rate_numerator = 1.5e7;
  economics.value = 1e-6;
  economics.element_cost = 8e-3;
  economics.power_cost = 0.0948683;

  SUBCASE("free resources leave only the rate value") {
    StrategyEconomics free = economics;
    free.element_cost = 0.0;
    free.power_cost = 0.0;
    CHECK(strategy_utility(free, 0.2, 100) ==
          doctest::Approx(free.value * expected_rate(free, 0.2, 100)).epsilon(1e-12));
  }

  SUBCASE("share scales costs and value together") {
    for (const double share : {0.1, 0.25, 0.5, 1.0}) {
      CHECK(strategy_utility(economics, share, 100) * share * 100 ==
            doctest::Approx(economics.group_gain()).epsilon(1e-12));
    }
  }

  SUBCASE("benchmark provider-2 high-power costs") {
    const Scenario scenario = load_scenario(test_paths::baseline());
    const GameEconomics economics2 = build_economics(scenario);
    const StrategyEconomics& high_power = economics2.per_strategy[5];  // sp2.irs1.k1.j2
    CHECK(high_power.element_cost == doctest::Approx(8e-3).epsilon(1e-12));
    CHECK(high_power.power_cost == doctest::Approx(0.0948683).epsilon(1e-5));
  }

  SUBCASE("printed cost sign flips the power term") {
    CHECK(economics.group_gain(true) ==
          doctest::Approx(economics.value * economics.rate_numerator -
                          economics.element_cost + economics.power_cost)
              .epsilon(1e-12));
  }
}

TEST_CASE("average utility") {
  Eigen::VectorXd shares(2), utilities(2);

  shares << 0.5, 0.5;
  utilities << 2.0, 4.0;
  CHECK(average_utility(shares, utilities) == doctest::Approx(3.0).epsilon(1e-15));

  utilities << 7.5, 7.5;
  CHECK(average_utility(shares, utilities) == doctest::Approx(7.5).epsilon(1e-15));

  shares << 1.0, 0.0;
  utilities << 1.25, -9.0;
  CHECK(average_utility(shares, utilities) == doctest::Approx(1.25).epsilon(1e-15));

  SUBCASE("invariant under a consistent permutation") {
    Eigen::VectorXd p(3), u(3), p2(3), u2(3);
    p << 0.2, 0.3, 0.5;
    u << 1.0, -2.0, 0.25;
    p2 << 0.5, 0.2, 0.3;
    u2 << 0.25, 1.0, -2.0;
    CHECK(average_utility(p, u) == doctest::Approx(average_utility(p2, u2)).epsilon(1e-15));
  }
}

TEST_CASE("congestion lowers the utility of a crowded strategy") {
  StrategyEconomics economics;
  economics.rate_numerator = 1e7;
  economics.value = 1e-6;
  economics.element_cost = 1e-3;
  economics.power_cost = 1e-2;
  REQUIRE(economics.group_gain() > 0);
  double previous = std::numeric_limits<double>::infinity();
  for (const double share : {0.1, 0.2, 0.4, 0.8}) {
    const double u = strategy_utility(economics, share, 100);
    CHECK(u < previous);
    previous = u;
  }
}

TEST_CASE("simplex membership") {
  Eigen::VectorXd ok(3);
  ok << 0.2, 0.3, 0.5;
  CHECK(on_simplex(ok));
  Eigen::VectorXd off(3);
  off << 0.2, 0.3, 0.4;
  CHECK_FALSE(on_simplex(off));
  Eigen::VectorXd negative(2);
  negative << 1.5, -0.5;
  CHECK_FALSE(on_simplex(negative));
}
