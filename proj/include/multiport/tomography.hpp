#pragma once

#include "multiport/povm.hpp"

namespace multiport {

/// Probabilities below this floor count as boundary cases; Fisher-information
/// quantities reject them instead of taking limits.
inline constexpr double kProbabilityFloor = 1e-12;

/// Frame operators with a smaller least eigenvalue are flagged singular
/// (device not informationally complete).
inline constexpr double kSingularFrameFloor = 1e-12;

/// A photon-number distribution rho_n (the operator ket |rho>). Entries are
/// nonnegative and sum to one within 1e-12. The dependent coordinate for
/// estimation purposes is the last one, rho_{d-1}.
class PhotonDistribution {
 public:
  explicit PhotonDistribution(Vector probs);

  const Vector& probs() const { return probs_; }
  int dim() const { return static_cast<int>(probs_.size()); }

 private:
  Vector probs_;
};

/// d x (d-1) measurement matrix with entries beta_{jn} - beta_{j,drop};
/// the all-ones row vector annihilates it from the left.
Matrix measurement_matrix(const Matrix& amplitudes, int drop_index);
Matrix measurement_matrix(const AmplitudeMatrix& B);

/// Frame operator F = sum_j |Pi_j><Pi_j| / Tr Pi_j over the nonzero
/// outcomes. Invertible iff the POVM is informationally complete.
Matrix frame_operator(const Povm& povm);

double smallest_eigenvalue(const Matrix& symmetric);

/// Canonical dual operators |Theta_j> = F^{-1} |Pi_j> / Tr Pi_j, stacked as
/// rows. Throws SingularFrameError when the frame is not invertible.
Matrix canonical_duals(const Povm& povm);

/// Born-rule outcome probabilities p = B rho.
Vector probabilities(const AmplitudeMatrix& B, const PhotonDistribution& rho);

/// (d-1)-dimensional Fisher information operator C^T P^{-1} C per sampling
/// event. Throws BoundaryError if any outcome probability is at or below
/// kProbabilityFloor.
Matrix fisher(const Matrix& amplitudes, const Vector& rho, int drop_index);
Matrix fisher(const AmplitudeMatrix& B, const PhotonDistribution& rho);

/// Cramer-Rao bound tr{F(rho)^{-1}} on the scaled mean squared-error.
double crb(const Matrix& amplitudes, const Vector& rho, int drop_index);
double crb(const AmplitudeMatrix& B, const PhotonDistribution& rho);

/// Same bound through the dual-operator route
///   sum_j <Theta_j|Theta_j> p_j - <rho|rho>, inner products in the support
/// (last coordinate dropped). Agrees with crb() to ~1e-9 relative.
double crb_dual(const AmplitudeMatrix& B, const PhotonDistribution& rho);

/// Linear reconstruction |rho-hat> = sum_j |Theta_j> nu_j from relative
/// frequencies. `raw` is the unbiased estimate (entries may be negative at
/// finite N); `clipped` is projected to the simplex by clipping negatives
/// and renormalizing.
struct LinearEstimate {
  Vector raw;
  Vector clipped;
};
LinearEstimate linear_estimator(const Matrix& duals, const Vector& freqs);

/// Derived objects of one device, computed in a single pass.
struct TomographyKit {
  Matrix frame;
  Matrix gram;          // G = B B^T
  Matrix duals;         // rows <Theta_j|; empty when the frame is singular
  Matrix meas_matrix;   // d x (d-1)
  Vector traces;
  double frame_min_eigenvalue;
  bool ic;
};
TomographyKit make_tomography_kit(const AmplitudeMatrix& B);

}  // namespace multiport
