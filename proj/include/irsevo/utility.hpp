#pragma once

#include <vector>

#include "irsevo/irs_optim.hpp"

namespace irsevo {

/// Signal-to-noise ratio of one strategy under time-division access:
/// |(h^H + (h^IU)^H Θ^H G) w|² / (B σ₀²).
double sinr(const ChannelSet& channels, const PhaseShiftConfig& phases,
            const Beamformer& beamformer, double bandwidth_hz, double noise_psd);

/// SINR of user `self` with co-scheduled users on the same BS: the other
/// beamformers contribute |c w_n|² interference terms.
double sinr_with_interference(const CRow& combined,
                              const std::vector<Beamformer>& co_scheduled,
                              int self, double bandwidth_hz, double noise_psd);

/// Share-independent economics of one strategy. The group of users selecting
/// it splits both the channel access and the resource bill, so everything a
/// user sees is group_gain() / (share · population).
struct StrategyEconomics {
  double sinr = 0.0;
  double rate_numerator = 0.0;  // B log₂(1+η), bit/s
  double element_cost = 0.0;    // γ^I · active elements
  double power_cost = 0.0;      // γ^P · J
  double value = 0.0;           // currency per bit/s

  /// value·rate − element_cost − power_cost. `printed_cost_sign` reproduces
  /// the published form value·rate − element_cost + power_cost instead.
  double group_gain(bool printed_cost_sign = false) const {
    const double power_term = printed_cost_sign ? -power_cost : power_cost;
    return value * rate_numerator - element_cost - power_term;
  }
};

/// rate_numerator / (share · population). Throws std::domain_error at share 0.
double expected_rate(const StrategyEconomics& economics, double share, int population);

/// value·expected_rate − (element_cost + power_cost)/(share · population).
double strategy_utility(const StrategyEconomics& economics, double share, int population,
                        bool printed_cost_sign = false);

/// Σ_g p_g u_g.
double average_utility(const Eigen::VectorXd& shares, const Eigen::VectorXd& utilities);

struct PopulationState {
  Eigen::VectorXd shares;
  double time = 0.0;
};

/// Simplex membership: Σp within `tol` of one, entries ≥ -tol.
bool on_simplex(const Eigen::VectorXd& shares, double tol = 1e-9);

struct EconomicsOptions {
  ChannelOptions channels;
  PhaseOptimOptions phase_optim;
};

struct GameEconomics {
  std::vector<StrategyEconomics> per_strategy;
  int population = 0;

  int group_count() const { return static_cast<int>(per_strategy.size()); }
  Eigen::VectorXd group_gains(bool printed_cost_sign = false) const;
};

/// Full per-strategy pipeline: synthesize channels, optimize phase shifts,
/// matched beamformer at the strategy's power level, SINR, costs.
GameEconomics build_economics(const Scenario& scenario,
                              const EconomicsOptions& options = {});

}  // namespace irsevo
