#include "multiport/povm.hpp"

#include <cmath>

#include "multiport/combinatorics.hpp"

namespace multiport {

namespace {

// ln s!/(s-j)! as an exact falling-factorial sum (avoids lgamma cancellation
// at large s).
double log_falling_factorial(long s, int j) {
  double acc = 0.0;
  for (int i = 0; i < j; ++i) acc += std::log(static_cast<double>(s - i));
  return acc;
}

double stirling2_log(int n, int j) {
  const auto& tab = CombinatoricsTable::shared();
  return n <= tab.n_max() ? log_abs(tab.stirling2(n, j)) : log_abs(stirling2_exact(n, j));
}

double stirling1_log(int n, int j) {
  const auto& tab = CombinatoricsTable::shared();
  return n <= tab.n_max() ? log_abs(tab.stirling1_unsigned(n, j))
                          : log_abs(stirling1_unsigned_exact(n, j));
}

double binomial_dbl(long long n, long long k) {
  const auto& tab = CombinatoricsTable::shared();
  if (n <= tab.n_max()) {
    return tab.binomial(static_cast<int>(n), static_cast<int>(k)).convert_to<double>();
  }
  return binomial_exact(n, k).convert_to<double>();
}

// Lossless finite-s amplitudes beta_{jn} = (s!/(s-j)!) S2(n,j) / s^n,
// assembled in log space (every factor positive).
Matrix finite_lossless_entries(long s, int d) {
  Matrix B = Matrix::Zero(d, d);
  const double log_s = std::log(static_cast<double>(s));
  for (int j = 0; j < d; ++j) {
    if (j > s) break;  // C(s,j) = 0: outcome cannot fire
    const double log_ff = log_falling_factorial(s, j);
    for (int n = j; n < d; ++n) {
      const double ls2 = stirling2_log(n, j);
      if (std::isinf(ls2)) continue;
      B(j, n) = std::exp(log_ff + ls2 - n * log_s);
    }
  }
  return B;
}

Matrix binomial_entries(int d, double eps) {
  Matrix B = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int n = j; n < d; ++n) {
      B(j, n) = binomial_dbl(n, j) * std::pow(1.0 - eps, j) * std::pow(eps, n - j);
    }
  }
  if (eps == 0.0) B = Matrix::Identity(d, d);
  return B;
}

void require_loss_range(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("loss probability eps must lie in [0, 1)");
  }
}

}  // namespace

DeviceConfig::DeviceConfig(PortCount s, int d, double eps) : ports(s), dim(d), loss(eps) {
  if (d < 2) throw std::invalid_argument("DeviceConfig: dimension d must be >= 2");
  require_loss_range(eps);
}

AmplitudeMatrix::AmplitudeMatrix(Matrix entries, DeviceConfig config)
    : entries_(std::move(entries)), config_(config) {
  const int d = config_.dim;
  if (entries_.rows() != d || entries_.cols() != d) {
    throw std::invalid_argument("AmplitudeMatrix: entries must be d x d");
  }
  if ((entries_.array() < -1e-12).any() || (entries_.array() > 1.0 + 1e-12).any()) {
    throw std::invalid_argument("AmplitudeMatrix: amplitudes must lie in [0, 1]");
  }
  for (int n = 0; n < d; ++n) {
    if (std::abs(entries_.col(n).sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("AmplitudeMatrix: column " + std::to_string(n) +
                                  " does not sum to 1");
    }
    for (int j = n + 1; j < d; ++j) {
      if (entries_(j, n) != 0.0) {
        throw std::invalid_argument("AmplitudeMatrix: a j-click event needs at least j "
                                    "photons (nonzero entry below the diagonal)");
      }
    }
  }
}

AmplitudeMatrix amplitudes_finite(const DeviceConfig& cfg) {
  if (cfg.ports.is_infinite()) {
    throw std::invalid_argument("amplitudes_finite: config has infinite ports");
  }
  const long s = cfg.ports.value();
  const int d = cfg.dim;
  Matrix B = finite_lossless_entries(s, d);
  if (cfg.loss != 0.0) B = B * binomial_entries(d, cfg.loss);
  return AmplitudeMatrix(std::move(B), cfg);
}

Matrix amplitudes_finite_direct(const DeviceConfig& cfg) {
  if (cfg.ports.is_infinite()) {
    throw std::invalid_argument("amplitudes_finite_direct: config has infinite ports");
  }
  const long s = cfg.ports.value();
  const int d = cfg.dim;
  const double eta = cfg.port_efficiency();
  Matrix B = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    if (j > s) break;
    const double csj = binomial_dbl(s, j);
    for (int n = 0; n < d; ++n) {
      double acc = 0.0, comp = 0.0;  // Kahan against the alternating terms
      for (int k = 0; k <= j; ++k) {
        const double term = binomial_dbl(j, k) * ((k % 2) ? -1.0 : 1.0) *
                            std::pow(1.0 - eta * static_cast<double>(s - k), n);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
      }
      B(j, n) = ((j % 2) ? -1.0 : 1.0) * csj * acc;
    }
  }
  return B;
}

AmplitudeMatrix amplitudes_fock(int d) {
  DeviceConfig cfg(PortCount::infinite(), d, 0.0);
  return AmplitudeMatrix(Matrix::Identity(d, d), cfg);
}

AmplitudeMatrix amplitudes_binomial(int d, double eps) {
  DeviceConfig cfg(PortCount::infinite(), d, eps);
  return AmplitudeMatrix(binomial_entries(d, eps), cfg);
}

Matrix inverse_binomial(int d, double eps) {
  require_loss_range(eps);
  if (d < 1) throw std::invalid_argument("inverse_binomial: d must be >= 1");
  Matrix M = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int n = j; n < d; ++n) {
      M(j, n) = binomial_dbl(n, j) * std::pow(1.0 - eps, -n) *
                (((n - j) % 2) ? -1.0 : 1.0) * std::pow(eps, n - j);
    }
  }
  return M;
}

Matrix inverse_lossless(long s, int d) {
  if (s < 1) throw std::invalid_argument("inverse_lossless: s must be >= 1");
  if (d < 1) throw std::invalid_argument("inverse_lossless: d must be >= 1");
  const double log_s = std::log(static_cast<double>(s));
  Matrix M = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int n = j; n < d; ++n) {
      const double lc1 = stirling1_log(n, j);
      if (std::isinf(lc1)) continue;
      const double mag = std::exp(j * log_s - log_falling_factorial(s, n) + lc1);
      M(j, n) = (((n - j) % 2) ? -1.0 : 1.0) * mag;
    }
  }
  return M;
}

Matrix inverse_general(const DeviceConfig& cfg) {
  if (cfg.ports.is_infinite()) {
    throw std::invalid_argument("inverse_general: config has infinite ports");
  }
  const long s = cfg.ports.value();
  if (cfg.loss == 0.0) return inverse_lossless(s, cfg.dim);
  return inverse_binomial(cfg.dim, cfg.loss) * inverse_lossless(s, cfg.dim);
}

InverseCheck inverse_general_checked(const DeviceConfig& cfg, double tolerance) {
  InverseCheck out;
  out.inverse = inverse_general(cfg);
  const Matrix B = amplitudes_finite(cfg).entries();
  const Matrix numeric = Eigen::PartialPivLU<Matrix>(B).inverse();
  out.residual = (out.inverse - numeric).cwiseAbs().maxCoeff();
  out.within_envelope = out.residual <= tolerance;
  return out;
}

Vector outcome_traces(const AmplitudeMatrix& B) { return B.entries().rowwise().sum(); }

Vector infinite_lossy_traces(int d, double eps) {
  require_loss_range(eps);
  Vector t(d);
  for (int j = 0; j < d; ++j) {
    t(j) = eps == 0.0 ? 1.0 : (1.0 - reg_inc_beta(eps, d - j, j + 1)) / (1.0 - eps);
  }
  return t;
}

Povm make_povm(const AmplitudeMatrix& B) { return Povm{B.entries(), outcome_traces(B)}; }

Povm make_povm(const Matrix& column_stochastic) {
  if (column_stochastic.rows() != column_stochastic.cols()) {
    throw std::invalid_argument("make_povm: amplitude matrix must be square");
  }
  if ((column_stochastic.array() < -1e-12).any() ||
      (column_stochastic.array() > 1.0 + 1e-12).any()) {
    throw std::invalid_argument("make_povm: amplitudes must lie in [0, 1]");
  }
  const Vector col_sums = column_stochastic.colwise().sum();
  if (((col_sums.array() - 1.0).abs() > 1e-9).any()) {
    throw std::invalid_argument("make_povm: columns must sum to 1");
  }
  return Povm{column_stochastic, column_stochastic.rowwise().sum()};
}

}  // namespace multiport
