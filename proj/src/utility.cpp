#include "irsevo/utility.hpp"

#include <cmath>

#include "irsevo/errors.hpp"

namespace irsevo {

double sinr(const ChannelSet& channels, const PhaseShiftConfig& phases,
            const Beamformer& beamformer, double bandwidth_hz, double noise_psd) {
  if (!(bandwidth_hz > 0) || !(noise_psd > 0)) {
    throw std::domain_error("sinr: bandwidth and noise density must be positive");
  }
  const std::complex<double> received =
      (effective_channel(channels, phases) * beamformer.weights).value();
  return std::norm(received) / (bandwidth_hz * noise_psd);
}

double sinr_with_interference(const CRow& combined,
                              const std::vector<Beamformer>& co_scheduled, int self,
                              double bandwidth_hz, double noise_psd) {
  if (self < 0 || self >= static_cast<int>(co_scheduled.size())) {
    throw ValidationError("sinr_with_interference: self index out of range");
  }
  const double signal = std::norm((combined * co_scheduled[self].weights).value());
  double interference = 0.0;
  for (int n = 0; n < static_cast<int>(co_scheduled.size()); ++n) {
    if (n == self) continue;
    interference += std::norm((combined * co_scheduled[n].weights).value());
  }
  return signal / (interference + bandwidth_hz * noise_psd);
}

double expected_rate(const StrategyEconomics& economics, double share, int population) {
  if (!(share > 0)) throw std::domain_error("expected_rate: share must be positive");
  return economics.rate_numerator / (share * population);
}

double strategy_utility(const StrategyEconomics& economics, double share, int population,
                        bool printed_cost_sign) {
  if (!(share > 0)) throw std::domain_error("strategy_utility: share must be positive");
  return economics.group_gain(printed_cost_sign) / (share * population);
}

double average_utility(const Eigen::VectorXd& shares, const Eigen::VectorXd& utilities) {
  if (shares.size() != utilities.size()) {
    throw ValidationError("average_utility: shares and utilities differ in length");
  }
  return shares.dot(utilities);
}

bool on_simplex(const Eigen::VectorXd& shares, double tol) {
  if (shares.size() == 0) return false;
  if (std::abs(shares.sum() - 1.0) > tol) return false;
  return (shares.array() >= -tol).all();
}

Eigen::VectorXd GameEconomics::group_gains(bool printed_cost_sign) const {
  Eigen::VectorXd gains(per_strategy.size());
  for (std::size_t g = 0; g < per_strategy.size(); ++g) {
    gains[static_cast<Eigen::Index>(g)] = per_strategy[g].group_gain(printed_cost_sign);
  }
  return gains;
}

GameEconomics build_economics(const Scenario& scenario, const EconomicsOptions& options) {
  GameEconomics economics;
  economics.population = scenario.population;
  economics.per_strategy.reserve(scenario.strategies.size());

  for (const Strategy& strategy : scenario.strategies) {
    const ServiceProvider& sp = scenario.provider(strategy.sp);
    const ChannelSet channels = synthesize_channels(scenario, strategy, options.channels);
    const PhaseOptimResult optimum = optimize_phase_shifts(channels, options.phase_optim);
    const double power = sp.power_levels_w[strategy.power_index - 1];
    const Beamformer beamformer = compute_beamformer(channels, optimum.phases, power);

    StrategyEconomics e;
    e.sinr = sinr(channels, optimum.phases, beamformer, sp.bandwidth_hz,
                  scenario.physics.noise_psd_w_per_hz);
    e.rate_numerator = sp.bandwidth_hz * std::log2(1.0 + e.sinr);
    e.element_cost = sp.price_per_element * strategy.active_elements;
    e.power_cost = sp.price_per_watt * power;
    e.value = sp.unit_data_value;
    economics.per_strategy.push_back(e);
  }
  return economics;
}

}  // namespace irsevo
