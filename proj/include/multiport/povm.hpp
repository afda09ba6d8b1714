#pragma once

#include <Eigen/Dense>
#include <optional>

#include "multiport/errors.hpp"

namespace multiport {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Regime {
  FiniteLossless,
  FiniteLossy,
  InfiniteLossless,  // Fock-state measurement
  InfiniteLossy,     // binomial mixtures of Fock outcomes
};

/// Number of output ports: a finite count or the infinite-port limit.
/// The limit is a distinct state, never a large sentinel integer.
class PortCount {
 public:
  static PortCount finite(long s) {
    if (s < 1) throw std::invalid_argument("PortCount: s must be >= 1");
    PortCount p;
    p.value_ = s;
    return p;
  }
  static PortCount infinite() { return PortCount{}; }

  bool is_infinite() const { return !value_.has_value(); }
  long value() const {
    if (!value_) throw std::logic_error("PortCount: no finite value in the infinite limit");
    return *value_;
  }

  friend bool operator==(const PortCount&, const PortCount&) = default;

 private:
  std::optional<long> value_;
};

/// An (s, d, eps) multiport device with equal port efficiencies
/// eta = (1 - eps) / s.
struct DeviceConfig {
  PortCount ports;
  int dim;      // Hilbert-space dimension d (max photon number d-1)
  double loss;  // photon-loss probability eps in [0, 1)

  DeviceConfig(PortCount s, int d, double eps);

  double port_efficiency() const {
    return ports.is_infinite() ? 0.0 : (1.0 - loss) / static_cast<double>(ports.value());
  }

  /// s >= d-1 is necessary for informational completeness. Configurations
  /// failing it are representable (flagged, not rejected).
  bool ic_capable() const {
    return ports.is_infinite() || ports.value() >= static_cast<long>(dim) - 1;
  }

  Regime regime() const {
    if (ports.is_infinite()) return loss == 0.0 ? Regime::InfiniteLossless : Regime::InfiniteLossy;
    return loss == 0.0 ? Regime::FiniteLossless : Regime::FiniteLossy;
  }
};

/// The d x d matrix of POVM amplitudes beta_{jn} (row j = outcome, column
/// n = photon number). Columns sum to one; beta_{jn} = 0 for j > n.
class AmplitudeMatrix {
 public:
  AmplitudeMatrix(Matrix entries, DeviceConfig config);

  const Matrix& entries() const { return entries_; }
  const DeviceConfig& config() const { return config_; }
  Regime regime() const { return config_.regime(); }
  int dim() const { return config_.dim; }

 private:
  Matrix entries_;
  DeviceConfig config_;
};

/// Diagonal POVM outcomes: row j of `outcomes` is the Fock-basis diagonal of
/// Pi_j; traces are the row sums Tr Pi_j.
struct Povm {
  Matrix outcomes;
  Vector traces;
};

/// Finite-s amplitudes, built by the lossless x binomial factorization
/// B_{s,eps} = B_s B_eps (stable for all s; see amplitudes_finite_direct for
/// the alternating-sum cross-check route).
AmplitudeMatrix amplitudes_finite(const DeviceConfig& cfg);

/// Direct alternating-sum evaluation of the same amplitudes. Cross-check
/// path only: cancellation grows with s (max error is roughly 1e-15 at
/// s = 5, 1e-12 at s = 10, 1e-9 at s = 20, 1e-6 at s = 40).
Matrix amplitudes_finite_direct(const DeviceConfig& cfg);

/// Infinite-port lossless limit: the identity (Fock-state measurement).
AmplitudeMatrix amplitudes_fock(int d);

/// Infinite-port lossy limit: (B_eps)_{jn} = C(n,j) (1-eps)^j eps^{n-j}.
AmplitudeMatrix amplitudes_binomial(int d, double eps);

/// Analytic inverse of the binomial amplitudes:
/// (B_eps^{-1})_{jn} = C(n,j) (1-eps)^{-n} (-eps)^{n-j}.
Matrix inverse_binomial(int d, double eps);

/// Analytic inverse of the finite lossless amplitudes via unsigned Stirling
/// numbers of the first kind.
Matrix inverse_lossless(long s, int d);

/// Analytic inverse of the general finite lossy device through the chain
/// B_{s,eps}^{-1} = B_eps^{-1} B_s^{-1}.
Matrix inverse_general(const DeviceConfig& cfg);

/// inverse_general plus agreement check against a pivoted numerical
/// inversion of amplitudes_finite. The analytic inverses are asserted
/// accurate for d <= 15; beyond that the residual reports conditioning.
struct InverseCheck {
  Matrix inverse;
  double residual;  // max-norm of (analytic - numeric) inverse product gap
  bool within_envelope;
};
InverseCheck inverse_general_checked(const DeviceConfig& cfg, double tolerance = 1e-8);

/// Row sums Tr Pi_j. For the infinite-port lossy regime this matches
/// [1 - I_eps(d-j, j+1)] / (1-eps).
Vector outcome_traces(const AmplitudeMatrix& B);

/// Incomplete-beta closed form of the infinite-port lossy traces.
Vector infinite_lossy_traces(int d, double eps);

Povm make_povm(const AmplitudeMatrix& B);

/// General-B pathway: wraps an arbitrary user-supplied column-stochastic
/// amplitude matrix (columns sum to one, entries in [0, 1]) so the
/// estimation stack can run on devices this library does not synthesize.
Povm make_povm(const Matrix& column_stochastic);

}  // namespace multiport
