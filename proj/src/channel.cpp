#include "irsevo/channel.hpp"

#include <cmath>
#include <random>

#include "irsevo/errors.hpp"

namespace irsevo {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

CVec steering_vector(int n, double spatial_direction) {
  if (n < 1) throw std::domain_error("steering_vector: element count must be >= 1");
  CVec v(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double center = (n - 1) / 2.0;
  for (int i = 0; i < n; ++i) {
    const double phase = -kTwoPi * spatial_direction * (i - center);
    v[i] = std::polar(scale, phase);
  }
  return v;
}

double spreading_loss(double frequency_hz, double range_m) {
  if (!(frequency_hz > 0)) throw std::domain_error("spreading_loss: frequency must be positive");
  if (!(range_m > 0)) {
    throw std::domain_error("spreading_loss: range must be positive (transmitter co-located)");
  }
  return kSpeedOfLight / (2.0 * kTwoPi * frequency_hz * range_m);
}

double absorption_loss(double range_m, double absorption_per_m) {
  if (range_m < 0) throw std::domain_error("absorption_loss: range must be non-negative");
  if (absorption_per_m < 0) {
    throw std::domain_error("absorption_loss: coefficient must be non-negative");
  }
  return std::exp(-0.5 * absorption_per_m * range_m);
}

std::complex<double> los_path_gain(double frequency_hz, double range_m,
                                   double absorption_per_m) {
  const double amplitude =
      spreading_loss(frequency_hz, range_m) * absorption_loss(range_m, absorption_per_m);
  const double propagation_delay = range_m / kSpeedOfLight;
  return std::polar(amplitude, -kTwoPi * frequency_hz * propagation_delay);
}

double broadside_sine(const Vec2& from, const Vec2& to) {
  const double r = distance(from, to);
  if (!(r > 0)) throw std::domain_error("broadside_sine: endpoints coincide");
  return (to[1] - from[1]) / r;
}

namespace {

// Half-wavelength element spacing makes the spatial direction sin(ξ)/2.
double spatial_direction(const Vec2& from, const Vec2& to) {
  return 0.5 * broadside_sine(from, to);
}

struct NlosDraw {
  std::complex<double> gain;
  double direction_a = 0.0;
  double direction_b = 0.0;
};

// Scattered paths: circular complex Gaussian gain 20 dB below the LoS
// amplitude, angles uniform in [-π/2, π/2].
std::vector<NlosDraw> draw_nlos(std::mt19937_64& rng, int count, double los_amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-kTwoPi / 4.0, kTwoPi / 4.0);  // [-π/2, π/2]
  std::vector<NlosDraw> draws;
  draws.reserve(count);
  const double sigma = los_amplitude * 0.1 / std::sqrt(2.0);  // -20 dB power split re/im
  for (int i = 0; i < count; ++i) {
    NlosDraw d;
    d.gain = {sigma * normal(rng), sigma * normal(rng)};
    d.direction_a = 0.5 * std::sin(angle(rng));
    d.direction_b = 0.5 * std::sin(angle(rng));
    draws.push_back(d);
  }
  return draws;
}

}  // namespace

ChannelSet synthesize_channels(const Scenario& scenario, const Strategy& strategy,
                               const ChannelOptions& options) {
  const ServiceProvider& sp = scenario.provider(strategy.sp);
  const IrsPanel& panel = scenario.panel(strategy.sp, strategy.irs);
  const int antennas = sp.antennas;
  const int elements = strategy.active_elements;
  const double f = scenario.physics.carrier_frequency_hz;
  const double zeta = scenario.physics.absorption_coeff_per_m;

  const double r_bs_user = distance(sp.bs_position, scenario.user_position);
  const double r_bs_irs = distance(sp.bs_position, panel.position);
  const double r_irs_user = distance(panel.position, scenario.user_position);

  ChannelSet channels;
  channels.strategy = strategy;

  // Deterministic per-(strategy, seed) stream; only NLoS synthesis draws.
  std::mt19937_64 rng(options.seed * 0x9e3779b97f4a7c15ULL + strategy.sp * 8191 +
                      strategy.irs * 131 + strategy.subset_size * 17 + strategy.power_index);

  const std::complex<double> gain_bu = los_path_gain(f, r_bs_user, zeta);
  channels.direct = gain_bu * steering_vector(antennas, spatial_direction(sp.bs_position,
                                                                          scenario.user_position));
  if (options.nlos_paths > 0) {
    for (const NlosDraw& d : draw_nlos(rng, options.nlos_paths, std::abs(gain_bu))) {
      channels.direct += d.gain * steering_vector(antennas, d.direction_a);
    }
  }

  if (options.zero_reflection) {
    channels.irs_user = CVec::Zero(elements);
    channels.bs_irs = CMat::Zero(elements, antennas);
    return channels;
  }

  const std::complex<double> gain_bi = los_path_gain(f, r_bs_irs, zeta);
  const std::complex<double> gain_iu = los_path_gain(f, r_irs_user, zeta);
  const int bs_irs_paths = 1 + options.nlos_paths;
  const double prefactor =
      std::sqrt(static_cast<double>(antennas) * elements / bs_irs_paths);

  const CVec arrival_at_irs =
      steering_vector(elements, spatial_direction(panel.position, sp.bs_position));
  const CVec departure_at_bs =
      steering_vector(antennas, spatial_direction(sp.bs_position, panel.position));
  channels.bs_irs = prefactor * gain_bi * (arrival_at_irs * departure_at_bs.adjoint());

  channels.irs_user =
      gain_iu * steering_vector(elements, spatial_direction(panel.position,
                                                            scenario.user_position));
  if (options.nlos_paths > 0) {
    for (const NlosDraw& d : draw_nlos(rng, options.nlos_paths, std::abs(gain_bi))) {
      channels.bs_irs += prefactor * d.gain * (steering_vector(elements, d.direction_a) *
                                               steering_vector(antennas, d.direction_b).adjoint());
    }
    for (const NlosDraw& d : draw_nlos(rng, options.nlos_paths, std::abs(gain_iu))) {
      channels.irs_user += d.gain * steering_vector(elements, d.direction_a);
    }
  }

  if (!channels.direct.allFinite() || !channels.irs_user.allFinite() ||
      !channels.bs_irs.allFinite()) {
    throw NumericalError("synthesize_channels: non-finite channel entry for strategy " +
                         strategy.label());
  }
  return channels;
}

}  // namespace irsevo
