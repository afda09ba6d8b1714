#pragma once

#include <optional>
#include <vector>

#include "multiport/povm.hpp"

namespace multiport {

/// Trace threshold matching the plotted diagnostics; always a parameter,
/// never baked in.
inline constexpr double kDefaultMuThres = 1e-3;

/// Largest j in [0, d-1] with 1 - I_eps(d-j, j+1) > mu for the infinite-port
/// device; nullopt when even j = 0 fails.
std::optional<int> j_threshold(int d, double eps, double mu);

/// Analytic resolvable-dimension bound d(1-eps) + atanh(1-2 mu), from the
/// tanh surrogate of the incomplete beta. Returned unclamped; callers that
/// present it next to a numeric d_res should cap it at d.
double d_res_bound(int d, double eps, double mu);

struct CriticalEps {
  double exact;   // bisection root of 1 - I_eps(1, d) = mu, to 1e-10
  double approx;  // atanh(1 - 2 mu) / d
};

/// Largest loss rate at which the infinite-port device stays informationally
/// complete on dimension d.
CriticalEps critical_eps_infinite(int d, double mu);

/// Largest eps with sum_n (B_{s,eps})_{d-1,n} > mu, located by bisection to
/// 1e-8 after a 64-point monotonicity scan of the row sum. Returns nullopt
/// when the row sum is already at or below mu in the lossless device (no
/// loss is tolerable; happens first at s = d = 12 for mu = 1e-3). Throws
/// BracketError if the scan finds the row sum non-monotone.
std::optional<double> critical_eps_finite(long s, int d, double mu);

struct PhaseDiagramRow {
  double eps;
  int d_res_numeric;
  double d_res_bound;  // clamped to d
};

/// Resolvable-dimension table over a loss grid; the numeric boundary is
/// checked nonincreasing before returning.
std::vector<PhaseDiagramRow> phase_diagram(int d, double mu,
                                           const std::vector<double>& eps_grid);

struct IcDiagnostics {
  bool ic = false;
  double gram_min_eigenvalue = 0.0;
  double min_weight = 0.0;            // smallest per-outcome resolvability weight
  std::vector<int> failing_outcomes;  // outcomes whose weight is <= mu
};

/// Informational completeness = every outcome's resolvability weight exceeds
/// mu AND the Gram matrix passes a rank test (least eigenvalue above
/// mu * 1e-9, i.e. 1e-12 at the default mu). The weight is the outcome trace
/// for finite devices and (1-eps) * trace for the infinite lossy regime,
/// matching the thresholds the critical-eps scans bisect on.
IcDiagnostics is_informationally_complete(const AmplitudeMatrix& B, double mu);

struct ResolvabilityReport {
  int dim = 0;
  double loss = 0.0;
  double mu_thres = 0.0;
  std::optional<int> j_thres;
  int d_res_numeric = 0;        // j_thres + 1 (0 when no j qualifies)
  double d_res_analytic_bound;  // unclamped
  bool ic = false;
};

/// Diagnostics of the infinite-port device at loss eps.
ResolvabilityReport resolvability_report(int d, double eps, double mu);

}  // namespace multiport
