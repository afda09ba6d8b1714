#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multiport/random.hpp"
#include "multiport/tomography.hpp"

namespace multiport {

/// A finite-N reconstruction experiment: `trials` independent runs of N
/// single-shot detections on a fixed device and true distribution.
struct ExperimentSpec {
  AmplitudeMatrix device;
  PhotonDistribution rho_true;
  long long shots;
  int trials = 1000;
  std::uint64_t seed = 0;
};

/// One multinomial draw of N shots by the sequential conditional-binomial
/// method; exact and reproducible for a fixed generator state.
Eigen::VectorXi sample_counts(const Vector& p, long long n, Rng& rng);

struct MseEstimate {
  double mse = 0.0;        // mean squared-error of the raw linear estimate, in support
  double std_error = 0.0;  // Monte-Carlo standard error of the mean
  int trials = 0;
};

/// Monte-Carlo mean squared-error of the linear estimator over `trials`
/// simulated data sets. The support convention drops rho_{d-1}. Trials run
/// in seeded blocks reduced in fixed order (bit-reproducible for any worker
/// count). Throws BoundaryError when rho_true touches the probability floor.
MseEstimate empirical_mse(const ExperimentSpec& spec);

struct SaturationRow {
  long long shots;
  double n_mse;     // N * MSE
  double n_mse_se;  // N * standard error
  double crb;
  double ratio;     // n_mse / crb
};

/// N*MSE against the Cramer-Rao bound for a family of shot counts.
std::vector<SaturationRow> crb_saturation_report(const AmplitudeMatrix& device,
                                                 const PhotonDistribution& rho_true,
                                                 std::span<const long long> shot_counts,
                                                 int trials, std::uint64_t seed);

}  // namespace multiport
