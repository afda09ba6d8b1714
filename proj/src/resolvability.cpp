#include "multiport/resolvability.hpp"

#include <cmath>

#include "multiport/combinatorics.hpp"
#include "multiport/tomography.hpp"

namespace multiport {

namespace {

void require_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu_thres must lie in (0, 1)");
}

double last_row_sum(long s, int d, double eps) {
  DeviceConfig cfg(PortCount::finite(s), d, eps);
  return amplitudes_finite(cfg).entries().row(d - 1).sum();
}

// Per-outcome quantity the completeness thresholds compare against mu: the
// raw trace for finite devices, (1-eps) * trace for the infinite lossy
// regime (the same scaling the infinite critical-eps condition uses).
Vector resolvability_weights(const AmplitudeMatrix& B) {
  Vector w = outcome_traces(B);
  if (B.regime() == Regime::InfiniteLossy) w *= (1.0 - B.config().loss);
  return w;
}

}  // namespace

std::optional<int> j_threshold(int d, double eps, double mu) {
  if (d < 1) throw std::invalid_argument("j_threshold: d must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("j_threshold: eps in [0,1)");
  require_mu(mu);
  std::optional<int> best;
  for (int j = 0; j < d; ++j) {
    if (1.0 - reg_inc_beta(eps, d - j, j + 1) > mu) best = j;
  }
  return best;
}

double d_res_bound(int d, double eps, double mu) {
  require_mu(mu);
  return d * (1.0 - eps) + std::atanh(1.0 - 2.0 * mu);
}

CriticalEps critical_eps_infinite(int d, double mu) {
  if (d < 2) throw std::invalid_argument("critical_eps_infinite: d must be >= 2");
  require_mu(mu);
  // 1 - I_eps(1, d) falls monotonically from 1 to 0 on eps in [0, 1).
  double lo = 0.0, hi = 1.0 - 1e-16;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - reg_inc_beta(mid, 1.0, static_cast<double>(d)) > mu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return CriticalEps{0.5 * (lo + hi), std::atanh(1.0 - 2.0 * mu) / static_cast<double>(d)};
}

std::optional<double> critical_eps_finite(long s, int d, double mu) {
  if (d < 2) throw std::invalid_argument("critical_eps_finite: d must be >= 2");
  if (s < static_cast<long>(d) - 1) {
    throw NonIcError("critical_eps_finite: s >= d-1 output ports required");
  }
  require_mu(mu);

  constexpr int kScanPoints = 64;
  const double eps_max = 1.0 - 1e-12;
  double prev = last_row_sum(s, d, 0.0);
  for (int i = 1; i < kScanPoints; ++i) {
    const double e = eps_max * static_cast<double>(i) / (kScanPoints - 1);
    const double cur = last_row_sum(s, d, e);
    if (cur > prev + 1e-12) {
      throw BracketError("critical_eps_finite: last-row sum is not monotone in eps on the "
                         "validation scan; bisection bracket invalid");
    }
    prev = cur;
  }
  if (last_row_sum(s, d, 0.0) <= mu) {
    return std::nullopt;  // below threshold even lossless: no tolerable loss
  }

  double lo = 0.0, hi = eps_max;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (last_row_sum(s, d, mid) > mu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<PhaseDiagramRow> phase_diagram(int d, double mu,
                                           const std::vector<double>& eps_grid) {
  require_mu(mu);
  std::vector<PhaseDiagramRow> rows;
  rows.reserve(eps_grid.size());
  for (double e : eps_grid) {
    if (!(e >= 0.0 && e < 1.0)) {
      throw std::invalid_argument("phase_diagram: eps grid entries must lie in [0, 1)");
    }
    const auto jt = j_threshold(d, e, mu);
    rows.push_back(PhaseDiagramRow{e, jt ? *jt + 1 : 0,
                                   std::min(d_res_bound(d, e, mu), static_cast<double>(d))});
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].eps >= rows[i - 1].eps && rows[i].d_res_numeric > rows[i - 1].d_res_numeric) {
      throw BracketError("phase_diagram: numeric boundary is not nonincreasing in eps");
    }
  }
  return rows;
}

IcDiagnostics is_informationally_complete(const AmplitudeMatrix& B, double mu) {
  require_mu(mu);
  IcDiagnostics diag;
  const Vector w = resolvability_weights(B);
  diag.min_weight = w.minCoeff();
  for (int j = 0; j < w.size(); ++j) {
    if (w(j) <= mu) diag.failing_outcomes.push_back(j);
  }
  const Matrix gram = B.entries() * B.entries().transpose();
  diag.gram_min_eigenvalue = smallest_eigenvalue(gram);
  diag.ic = diag.failing_outcomes.empty() && diag.gram_min_eigenvalue > mu * 1e-9;
  return diag;
}

ResolvabilityReport resolvability_report(int d, double eps, double mu) {
  ResolvabilityReport rep;
  rep.dim = d;
  rep.loss = eps;
  rep.mu_thres = mu;
  rep.j_thres = j_threshold(d, eps, mu);
  rep.d_res_numeric = rep.j_thres ? *rep.j_thres + 1 : 0;
  rep.d_res_analytic_bound = d_res_bound(d, eps, mu);
  rep.ic = rep.d_res_numeric == d;
  return rep;
}

}  // namespace multiport
