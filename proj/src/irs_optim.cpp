#include "irsevo/irs_optim.hpp"

#include <cmath>

#include "irsevo/errors.hpp"

namespace irsevo {

CVec unit_projection(const CVec& a) {
  CVec out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double magnitude = std::abs(a[i]);
    if (magnitude == 0.0) {
      throw std::domain_error("unit_projection: zero entry has no phase");
    }
    out[i] = a[i] / magnitude;
  }
  return out;
}

CMat build_r_matrix(const ChannelSet& channels) {
  const Eigen::Index k = channels.irs_user.size();
  if (channels.bs_irs.rows() != k || channels.bs_irs.cols() != channels.direct.size()) {
    throw ValidationError("build_r_matrix: inconsistent channel dimensions");
  }
  const CMat reflected = channels.irs_user.conjugate().asDiagonal() * channels.bs_irs;
  CMat r(k + 1, k + 1);
  r.topLeftCorner(k, k) = reflected * reflected.adjoint();
  r.topRightCorner(k, 1) = reflected * channels.direct;
  r.bottomLeftCorner(1, k) = r.topRightCorner(k, 1).adjoint();
  r(k, k) = 0.0;
  return r;
}

namespace {

// Entry-wise phase, keeping the previous phase where the argument vanishes.
CVec tolerant_projection(const CVec& a, const CVec& previous) {
  CVec out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double magnitude = std::abs(a[i]);
    out[i] = magnitude == 0.0 ? previous[i] : a[i] / magnitude;
  }
  return out;
}

}  // namespace

PhaseOptimResult optimize_phase_shifts(const ChannelSet& channels,
                                       const PhaseOptimOptions& options) {
  if (!(options.tolerance > 0)) {
    throw ValidationError("optimize_phase_shifts: tolerance must be positive");
  }
  if (options.max_iterations < 1) {
    throw ValidationError("optimize_phase_shifts: max_iterations must be >= 1");
  }

  const CMat r = build_r_matrix(channels);
  const Eigen::Index dim = r.rows();
  const Eigen::Index k = dim - 1;

  PhaseOptimResult result;
  result.phases.phases = CVec::Ones(k);

  // Gershgorin shift: R + λI is PSD, which turns the phase iteration into a
  // damped update. Without it the iteration falls into a slowly decaying
  // two-cycle whenever the direct link is much stronger than the cascade.
  const double shift = r.cwiseAbs().rowwise().sum().maxCoeff();
  if (shift == 0.0) {
    // IRS contributes nothing; any phase configuration is equivalent.
    result.converged = true;
    result.objective_history.push_back(0.0);
    return result;
  }
  CMat iteration_matrix = r;
  iteration_matrix.diagonal().array() += shift;

  CVec v = CVec::Ones(dim);
  double objective = (iteration_matrix * v).cwiseAbs().sum();
  result.objective_history.push_back(objective);

  bool converged = false;
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    const CVec image = iteration_matrix * v;
    v = tolerant_projection(image, v);
    const double next_objective = (iteration_matrix * v).cwiseAbs().sum();
    result.objective_history.push_back(next_objective);
    const double delta = std::abs(next_objective - objective);
    objective = next_objective;
    if (delta <= options.tolerance * std::abs(objective)) {
      converged = true;
      ++iteration;
      break;
    }
  }
  result.iterations = iteration;
  result.converged = converged;
  if (!converged && !options.accept_last) {
    throw NumericalError("optimize_phase_shifts: no convergence after " +
                         std::to_string(options.max_iterations) + " iterations");
  }

  // Rotate so the auxiliary entry carries zero phase, then read the first K
  // entries. The rotation removes the free global phase of the lifted
  // solution; without it the direct and reflected paths would not align.
  const std::complex<double> reference = std::conj(v[k]);
  result.phases.phases = v.head(k) * reference;
  // Renormalize: |θ_e| = 1 to machine precision.
  result.phases.phases = unit_projection(result.phases.phases);
  return result;
}

CRow effective_channel(const ChannelSet& channels, const PhaseShiftConfig& phases) {
  if (phases.phases.size() != channels.irs_user.size()) {
    throw ValidationError("effective_channel: phase vector does not match element count");
  }
  const CVec reflected = phases.phases.conjugate().cwiseProduct(channels.irs_user.conjugate());
  return channels.direct.adjoint() + reflected.transpose() * channels.bs_irs;
}

Beamformer compute_beamformer(const ChannelSet& channels, const PhaseShiftConfig& phases,
                              double power_w) {
  if (!(power_w > 0)) throw std::domain_error("compute_beamformer: power must be positive");
  const CVec combined = effective_channel(channels, phases).adjoint();
  const double norm = combined.norm();
  if (norm == 0.0) {
    throw NumericalError("compute_beamformer: effective channel is zero");
  }
  Beamformer w;
  w.power_w = power_w;
  w.weights = std::sqrt(power_w) * combined / norm;
  return w;
}

}  // namespace irsevo
