#pragma once

#include <vector>

#include "irsevo/channel.hpp"

namespace irsevo {

/// Diagonal of the reflection matrix; every entry has unit modulus.
struct PhaseShiftConfig {
  CVec phases;

  int element_count() const { return static_cast<int>(phases.size()); }
};

/// Transmit weights with ‖w‖² equal to the selected power level.
struct Beamformer {
  CVec weights;
  double power_w = 0.0;
};

/// Entry-wise a_i / |a_i|. Throws std::domain_error on a zero entry.
CVec unit_projection(const CVec& a);

/// Lifted quadratic-form matrix of size (K+1)×(K+1):
///   [ D^H G G^H D   D^H G h ]
///   [ h^H G^H D     0       ]    with D = diag(h^IU).
/// Hermitian by construction.
CMat build_r_matrix(const ChannelSet& channels);

struct PhaseOptimOptions {
  double tolerance = 1e-8;   // relative plateau of the iteration objective
  int max_iterations = 10000;
  bool accept_last = false;  // return the last iterate instead of throwing
};

struct PhaseOptimResult {
  PhaseShiftConfig phases;
  int iterations = 0;
  bool converged = false;
  /// Power-iteration objective ‖R'v‖₁ per iterate (R' is the PSD-shifted
  /// matrix the iteration runs on); non-decreasing.
  std::vector<double> objective_history;
};

/// Phase-shift optimization: unit-modulus power iteration v ← unt(R'v) from
/// an all-ones start, where R' = R + λI with a Gershgorin shift λ that makes
/// the iteration matrix PSD. The unshifted iteration stalls in a slow
/// two-cycle whenever the direct link dominates the reflected one. The first
/// K entries, rotated so the auxiliary entry has zero phase, form the Θ
/// diagonal.
PhaseOptimResult optimize_phase_shifts(const ChannelSet& channels,
                                       const PhaseOptimOptions& options = {});

/// Matched filter on the effective channel, scaled to the power budget:
/// w = √J (h + G^H Θ h^IU) / ‖h + G^H Θ h^IU‖, so ‖w‖² = J exactly.
Beamformer compute_beamformer(const ChannelSet& channels, const PhaseShiftConfig& phases,
                              double power_w);

/// Row vector h^H + (h^IU)^H Θ^H G seen by the beamformer.
CRow effective_channel(const ChannelSet& channels, const PhaseShiftConfig& phases);

}  // namespace irsevo
