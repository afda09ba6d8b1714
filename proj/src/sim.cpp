#include "multiport/sim.hpp"

#include <cmath>

namespace multiport {

Eigen::VectorXi sample_counts(const Vector& p, long long n, Rng& rng) {
  const Eigen::Index d = p.size();
  if (n < 1) throw std::invalid_argument("sample_counts: N must be >= 1");
  if (std::abs(p.sum() - 1.0) > 1e-9 || (p.array() < 0.0).any()) {
    throw std::invalid_argument("sample_counts: p is not a probability vector");
  }
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(d);
  long long remaining = n;
  double rest = 1.0;
  for (Eigen::Index j = 0; j + 1 < d && remaining > 0; ++j) {
    const double cond = rest > 0.0 ? std::clamp(p(j) / rest, 0.0, 1.0) : 0.0;
    const long long c = rng.binomial(remaining, cond);
    counts(j) = static_cast<int>(c);
    remaining -= c;
    rest -= p(j);
  }
  counts(d - 1) = static_cast<int>(remaining);
  return counts;
}

MseEstimate empirical_mse(const ExperimentSpec& spec) {
  const int d = spec.device.dim();
  if (spec.trials < 2) throw std::invalid_argument("empirical_mse: need at least 2 trials");
  if ((spec.rho_true.probs().array() <= kProbabilityFloor).any()) {
    throw BoundaryError("empirical_mse: rho_true touches the probability floor; the "
                        "asymptotic theory assumes an interior distribution");
  }
  const Vector p = probabilities(spec.device, spec.rho_true);
  if ((p.array() <= kProbabilityFloor).any()) {
    throw BoundaryError("empirical_mse: an outcome probability is at the boundary");
  }
  const Matrix duals = canonical_duals(make_povm(spec.device));
  const Vector rho_sup = spec.rho_true.probs().head(d - 1);

  constexpr int kBlock = 64;
  const std::int64_t n_blocks = (spec.trials + kBlock - 1) / kBlock;
  struct BlockStats {
    double sum = 0.0, sumsq = 0.0;
  };
  std::vector<BlockStats> blocks(n_blocks);
  parallel_for_blocks(n_blocks, [&](std::int64_t b) {
    Rng rng(derive_block_seed(spec.seed, static_cast<std::uint64_t>(b)));
    const int count = static_cast<int>(
        std::min<std::int64_t>(kBlock, spec.trials - b * kBlock));
    BlockStats st;
    for (int t = 0; t < count; ++t) {
      const Eigen::VectorXi counts = sample_counts(p, spec.shots, rng);
      const Vector freqs = counts.cast<double>() / static_cast<double>(spec.shots);
      const Vector est = duals.transpose() * freqs;
      const double err = (est.head(d - 1) - rho_sup).squaredNorm();
      st.sum += err;
      st.sumsq += err * err;
    }
    blocks[b] = st;
  });

  double sum = 0.0, sumsq = 0.0;
  for (const auto& st : blocks) {
    sum += st.sum;
    sumsq += st.sumsq;
  }
  const double n = static_cast<double>(spec.trials);
  const double mean = sum / n;
  const double var = (sumsq / n - mean * mean) / (n - 1.0);
  return MseEstimate{mean, std::sqrt(std::max(0.0, var)), spec.trials};
}

std::vector<SaturationRow> crb_saturation_report(const AmplitudeMatrix& device,
                                                 const PhotonDistribution& rho_true,
                                                 std::span<const long long> shot_counts,
                                                 int trials, std::uint64_t seed) {
  if ((rho_true.probs().array() <= kProbabilityFloor).any()) {
    throw BoundaryError("crb_saturation_report: rho_true touches the probability floor; "
                        "an interior distribution is required");
  }
  const double bound = crb(device, rho_true);
  std::vector<SaturationRow> rows;
  rows.reserve(shot_counts.size());
  for (std::size_t i = 0; i < shot_counts.size(); ++i) {
    ExperimentSpec spec{device, rho_true, shot_counts[i], trials,
                        derive_block_seed(seed, static_cast<std::uint64_t>(i))};
    const MseEstimate est = empirical_mse(spec);
    const double n = static_cast<double>(shot_counts[i]);
    rows.push_back(SaturationRow{shot_counts[i], n * est.mse, n * est.std_error, bound,
                                 n * est.mse / bound});
  }
  return rows;
}

}  // namespace multiport
