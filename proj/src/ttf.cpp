#include "multiport/ttf.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "multiport/tomography.hpp"

namespace multiport {

namespace {

double simplex_constant(int d) {
  return 2.0 * static_cast<double>(d - 1) / static_cast<double>(d + 1);
}

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

double binomial_log(long long n, long long k) {
  const auto& tab = CombinatoricsTable::shared();
  if (n <= tab.n_max()) return log_abs(tab.binomial(static_cast<int>(n), static_cast<int>(k)));
  return log_abs(binomial_exact(n, k));
}

void require_ic_ports(long s, int d) {
  if (s < static_cast<long>(d) - 1) {
    throw NonIcError("device is not informationally complete: s >= d-1 output ports "
                     "required (got s = " + std::to_string(s) + ", d = " + std::to_string(d) +
                     ")");
  }
}

// ln Tr Pi_j of the finite lossy device, from the factored amplitudes
// (all contributions positive).
double finite_lossy_trace_log(long s, int d, double eps, int j) {
  const double log_s = std::log(static_cast<double>(s));
  const double l1e = std::log1p(-eps);
  const double le = std::log(eps);
  const double log_ff = log_falling_factorial(s, j);
  LogSumAccumulator acc;
  for (int np = j; np < d; ++np) {
    const double ls2 = stirling2_log(np, j);
    if (std::isinf(ls2)) continue;
    const double base = log_ff + ls2 - np * log_s + np * l1e;
    for (int n = np; n < d; ++n) {
      acc.add_log(base + binomial_log(n, np) + (n - np) * le);
    }
  }
  return acc.log_sum();
}

}  // namespace

TtfResult ttf_master(const AmplitudeMatrix& B) {
  const int d = B.dim();
  const Matrix& m = B.entries();
  for (int j = 0; j < d; ++j) {
    if (m(j, j) <= 0.0) {
      throw NonIcError("device is not informationally complete: s >= d-1 output ports "
                       "required (amplitude matrix is singular at outcome " +
                       std::to_string(j) + ")");
    }
  }
  const Vector traces = outcome_traces(B);
  // (B B^T)^{-1}_{jj} is the squared j-th column of B^{-1}; B is upper
  // triangular with positive diagonal, so back-substitution is exact.
  const Matrix inv = m.triangularView<Eigen::Upper>().solve(Matrix::Identity(d, d));
  double acc = 0.0;
  for (int j = 0; j < d; ++j) acc += traces(j) * inv.col(j).squaredNorm();
  const double value =
      (acc - 1.0 / traces(d - 1) - simplex_constant(d)) / static_cast<double>(d);
  return TtfResult{value, B.regime(), TtfMethod::MasterFormula, std::nullopt};
}

double ttf_fock(int d) {
  if (d < 2) throw std::invalid_argument("ttf_fock: d must be >= 2");
  return static_cast<double>((d - 1) * (d - 1)) / static_cast<double>(d * (d + 1));
}

double ttf_infinite_lossy(int d, double eps) {
  if (d < 2) throw std::invalid_argument("ttf_infinite_lossy: d must be >= 2");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("ttf_infinite_lossy: eps must lie in [0, 1)");
  }
  if (eps == 0.0) return ttf_fock(d);
  const Vector traces = infinite_lossy_traces(d, eps);
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    // (eps/(1-eps))^{2j} 2F1(-j,-j;1;1/eps^2) combined termwise: every term
    // positive and bounded, no overflow at small eps.
    double hyp = 0.0;
    for (int n = 0; n <= j; ++n) {
      const double c = std::exp(binomial_log(j, n));
      hyp += c * c * std::pow(eps, 2 * (j - n));
    }
    acc += traces(j) * hyp / std::pow(1.0 - eps, 2 * j);
  }
  return (acc - std::pow(1.0 - eps, 1 - d) - simplex_constant(d)) / static_cast<double>(d);
}

double ttf_finite_lossless(long s, int d) {
  if (d < 2) throw std::invalid_argument("ttf_finite_lossless: d must be >= 2");
  require_ic_ports(s, d);
  const double log_s = std::log(static_cast<double>(s));
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    const double log_r = -log_falling_factorial(s, j);  // ln (s-j)!/s!
    LogSumAccumulator hyp;                              // Stirling 2F1 of the first kind at s^2
    for (int n = 0; n <= j; ++n) {
      const double lc = stirling1_log(j, n);
      if (std::isinf(lc)) continue;
      hyp.add_log(2.0 * lc + 2.0 * n * log_s);
    }
    LogSumAccumulator tail;  // sum_{n'>=j} S2(n',j) / s^{n'}
    for (int np = j; np < d; ++np) {
      const double ls2 = stirling2_log(np, j);
      if (std::isinf(ls2)) continue;
      tail.add_log(ls2 - np * log_s);
    }
    acc += std::exp(log_r + hyp.log_sum() + tail.log_sum());
  }
  const double log_mid = (d - 1) * log_s - log_falling_factorial(s, d - 1);
  return (acc - std::exp(log_mid) - simplex_constant(d)) / static_cast<double>(d);
}

double ttf_finite_lossy(long s, int d, double eps) {
  if (d < 2) throw std::invalid_argument("ttf_finite_lossy: d must be >= 2");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("ttf_finite_lossy: eps must lie in [0, 1)");
  }
  if (eps == 0.0) return ttf_finite_lossless(s, d);
  require_ic_ports(s, d);
  const double le = std::log(eps);
  const double lq = le + std::log(static_cast<double>(s)) - std::log1p(-eps);
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {  // column of the inverse
    const double log_rj = -log_falling_factorial(s, j);
    LogSumAccumulator colsq;
    for (int k = 0; k <= j; ++k) {  // row of the inverse
      LogSumAccumulator inner;
      for (int l = k; l <= j; ++l) {
        const double lc1 = stirling1_log(j, l);
        if (std::isinf(lc1)) continue;
        inner.add_log(l * lq + binomial_log(l, k) + lc1);
      }
      if (inner.empty()) continue;
      const double log_w = -k * le + log_rj + inner.log_sum();
      colsq.add_log(2.0 * log_w);
    }
    acc += std::exp(finite_lossy_trace_log(s, d, eps, j) + colsq.log_sum());
  }
  const double log_mid =
      -((d - 1) * std::log1p(-eps) + log_falling_factorial(s, d - 1) -
        (d - 1) * std::log(static_cast<double>(s)));
  return (acc - std::exp(log_mid) - simplex_constant(d)) / static_cast<double>(d);
}

TtfResult ttf_closed_form(const DeviceConfig& cfg) {
  double value = 0.0;
  switch (cfg.regime()) {
    case Regime::InfiniteLossless:
      value = ttf_fock(cfg.dim);
      break;
    case Regime::InfiniteLossy:
      value = ttf_infinite_lossy(cfg.dim, cfg.loss);
      break;
    case Regime::FiniteLossless:
      value = ttf_finite_lossless(cfg.ports.value(), cfg.dim);
      break;
    case Regime::FiniteLossy:
      value = ttf_finite_lossy(cfg.ports.value(), cfg.dim, cfg.loss);
      break;
  }
  return TtfResult{value, cfg.regime(), TtfMethod::ClosedForm, std::nullopt};
}

Vector sample_simplex_uniform(int d, Rng& rng, SimplexSampler sampler) {
  if (d < 1) throw std::invalid_argument("sample_simplex_uniform: d must be >= 1");
  Vector p(d);
  if (sampler == SimplexSampler::ComplexGaussian) {
    for (int n = 0; n < d; ++n) {
      const double re = rng.normal();
      const double im = rng.normal();
      p(n) = re * re + im * im;
    }
  } else {
    for (int n = 0; n < d; ++n) {
      double u = rng.uniform01();
      while (u == 0.0) u = rng.uniform01();
      p(n) = -std::log(u);
    }
  }
  return p / p.sum();
}

TtfResult ttf_monte_carlo(const AmplitudeMatrix& B, long long n_samples, std::uint64_t seed,
                          SimplexSampler sampler) {
  if (n_samples < 2) throw std::invalid_argument("ttf_monte_carlo: need at least 2 samples");
  const int d = B.dim();
  const Matrix& m = B.entries();
  for (int j = 0; j < d; ++j) {
    if (m(j, j) <= 0.0) {
      throw NonIcError("device is not informationally complete: amplitude matrix singular");
    }
  }
  const Matrix c = measurement_matrix(B);

  constexpr long long kBlock = 4096;
  const std::int64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  struct BlockStats {
    double sum = 0.0, sumsq = 0.0;
    long long accepted = 0, rejected = 0;
  };
  std::vector<BlockStats> blocks(n_blocks);

  parallel_for_blocks(n_blocks, [&](std::int64_t b) {
    Rng rng(derive_block_seed(seed, static_cast<std::uint64_t>(b)));
    const long long count = std::min(kBlock, n_samples - b * kBlock);
    BlockStats st;
    Matrix fisher_mat(d - 1, d - 1);
    for (long long i = 0; i < count; ++i) {
      const Vector rho = sample_simplex_uniform(d, rng, sampler);
      const Vector p = m * rho;
      if ((p.array() <= kProbabilityFloor).any()) {
        ++st.rejected;
        continue;
      }
      fisher_mat.noalias() = c.transpose() * p.cwiseInverse().asDiagonal() * c;
      const double v =
          fisher_mat.ldlt().solve(Matrix::Identity(d - 1, d - 1)).trace();
      st.sum += v;
      st.sumsq += v * v;
      ++st.accepted;
    }
    blocks[b] = st;
  });

  // fixed-order reduction
  double sum = 0.0, sumsq = 0.0;
  long long accepted = 0, rejected = 0;
  for (const auto& st : blocks) {
    sum += st.sum;
    sumsq += st.sumsq;
    accepted += st.accepted;
    rejected += st.rejected;
  }
  if (rejected > n_samples / 100) {
    throw BoundaryError("ttf_monte_carlo: rejection rate above 1% (" +
                        std::to_string(rejected) + " of " + std::to_string(n_samples) + ")");
  }
  const double mean = sum / static_cast<double>(accepted);
  const double var = (sumsq / static_cast<double>(accepted) - mean * mean) /
                     static_cast<double>(accepted - 1);
  TtfResult out;
  out.value = mean;
  out.regime = B.regime();
  out.method = TtfMethod::MonteCarlo;
  out.mc = McStats{n_samples, seed, std::sqrt(std::max(0.0, var)), rejected, sampler};
  return out;
}

Rational simplex_moment(int d, int m) {
  if (d < 1 || m < 0) throw std::invalid_argument("simplex_moment: need d >= 1, m >= 0");
  return Rational{BigInt(1), binomial_exact(m + d - 1, m)};
}

}  // namespace multiport
