#pragma once

#include <cstdint>
#include <optional>

#include "multiport/combinatorics.hpp"
#include "multiport/povm.hpp"
#include "multiport/random.hpp"

namespace multiport {

enum class TtfMethod { ClosedForm, MasterFormula, MonteCarlo };

enum class SimplexSampler {
  ComplexGaussian,  // normalized squared magnitudes of d standard complex Gaussians
  Dirichlet,        // flat Dirichlet via exponential spacings
};

struct McStats {
  long long samples = 0;
  std::uint64_t seed = 0;
  double std_error = 0.0;
  long long rejected = 0;
  SimplexSampler sampler = SimplexSampler::ComplexGaussian;
};

/// A tomographic-transfer-function value with its provenance.
struct TtfResult {
  double value = 0.0;
  Regime regime = Regime::InfiniteLossless;
  TtfMethod method = TtfMethod::ClosedForm;
  std::optional<McStats> mc;
};

/// Average Cramer-Rao bound over the probability simplex from the amplitude
/// matrix alone:
///   (1/d) [ sum_j TrPi_j (B B^T)^{-1}_{jj} - 1/TrPi_{d-1} - 2(d-1)/(d+1) ].
/// Throws NonIcError when B is singular.
TtfResult ttf_master(const AmplitudeMatrix& B);

/// Fock-state measurement value (d-1)^2 / (d (d+1)); the lossless optimum.
double ttf_fock(int d);

/// Infinite-port device under loss eps (binomial-mixture outcomes).
double ttf_infinite_lossy(int d, double eps);

/// Finite lossless device; requires s >= d-1.
double ttf_finite_lossless(long s, int d);

/// Finite lossy device; requires s >= d-1. eps = 0 dispatches to the
/// lossless form (the lossy expression carries an eps^{-j} factor).
double ttf_finite_lossy(long s, int d, double eps);

/// Regime-dispatched closed form for a device configuration.
TtfResult ttf_closed_form(const DeviceConfig& cfg);

/// One draw from the uniform (flat-Dirichlet) distribution on the
/// d-simplex. The ComplexGaussian route consumes 2d normals; the Dirichlet
/// route d exponentials. Both sample the same law.
Vector sample_simplex_uniform(int d, Rng& rng,
                              SimplexSampler sampler = SimplexSampler::ComplexGaussian);

/// Monte-Carlo mean of tr F(rho)^{-1} over uniform-simplex photon
/// distributions. The sample stream is split into fixed-size blocks with
/// derived seeds and reduced in block order, so results are bit-identical
/// for any worker count. Boundary samples (some p_j <= 1e-12) are rejected
/// and counted; a rejection rate above 1% throws BoundaryError.
TtfResult ttf_monte_carlo(const AmplitudeMatrix& B, long long n_samples, std::uint64_t seed,
                          SimplexSampler sampler = SimplexSampler::ComplexGaussian);

/// Exact m-th moment of one simplex coordinate: E[p_j^m] = 1 / C(m+d-1, m).
struct Rational {
  BigInt num;
  BigInt den;
  double to_double() const { return num.convert_to<double>() / den.convert_to<double>(); }
};
Rational simplex_moment(int d, int m);

}  // namespace multiport
