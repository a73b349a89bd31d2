#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "irsevo/scenario.hpp"

namespace irsevo {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using CRow = Eigen::RowVectorXcd;

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

/// Unit-norm ULA steering vector: entries (1/sqrt(n)) exp(-j 2π Φ (i - (n-1)/2)).
CVec steering_vector(int n, double spatial_direction);

/// Geometric amplitude decay c / (4π f r). Throws std::domain_error at r = 0.
double spreading_loss(double frequency_hz, double range_m);

/// Molecular absorption amplitude factor exp(-ζ r / 2).
double absorption_loss(double range_m, double absorption_per_m);

/// Complex line-of-sight gain: spreading × absorption × exp(-j 2π f r / c).
std::complex<double> los_path_gain(double frequency_hz, double range_m,
                                   double absorption_per_m);

/// Sine of the angle between the link direction and array broadside.
/// Arrays are laid along the y axis with broadside facing ±x, so this is
/// simply Δy / r.
double broadside_sine(const Vec2& from, const Vec2& to);

struct ChannelOptions {
  int nlos_paths = 0;        // 0 = line-of-sight only
  std::uint64_t seed = 0;    // drives NLoS gains/angles only
  bool zero_reflection = false;  // null the IRS-side channels
};

/// Complex channels of one strategy: direct BS-user vector (length L),
/// IRS-user vector (length k·E) and BS-IRS matrix (k·E × L).
struct ChannelSet {
  Strategy strategy;
  CVec direct;    // h
  CVec irs_user;  // h^IU
  CMat bs_irs;    // G

  int antenna_count() const { return static_cast<int>(direct.size()); }
  int element_count() const { return static_cast<int>(irs_user.size()); }
};

/// Pure function of (scenario, strategy, options): repeated calls with the
/// same inputs return bit-identical channels.
ChannelSet synthesize_channels(const Scenario& scenario, const Strategy& strategy,
                               const ChannelOptions& options = {});

}  // namespace irsevo
