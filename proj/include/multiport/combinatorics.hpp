#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "multiport/signed_log.hpp"

namespace multiport {

using BigInt = boost::multiprecision::cpp_int;

/// ln|v|; -inf for v == 0. Exact for any magnitude (no double overflow).
double log_abs(const BigInt& v);

SignedLogReal to_signed_log(const BigInt& v);

/// Immutable memoized triangles of binomial and Stirling numbers, exact up to
/// n_max. Built once; lookups are plain reads and safe to share across
/// threads. Arguments beyond n_max throw std::out_of_range -- use the
/// *_exact functions for an explicit recomputation instead.
class CombinatoricsTable {
 public:
  static constexpr int kDefaultNMax = 64;

  explicit CombinatoricsTable(int n_max = kDefaultNMax);

  int n_max() const { return n_max_; }

  /// C(n, k); zero when k is outside [0, n].
  const BigInt& binomial(int n, int k) const;

  /// Stirling number of the second kind S2(n, j); zero when j > n.
  const BigInt& stirling2(int n, int j) const;

  /// Unsigned Stirling number of the first kind c(n, j); zero when j > n.
  const BigInt& stirling1_unsigned(int n, int j) const;

  /// Process-wide default table (n_max = 64).
  static const CombinatoricsTable& shared();

 private:
  const BigInt& lookup(const std::vector<std::vector<BigInt>>& tri, int n, int k) const;

  int n_max_;
  std::vector<std::vector<BigInt>> binom_;
  std::vector<std::vector<BigInt>> s2_;
  std::vector<std::vector<BigInt>> c1_;
};

// Unbounded recomputation, any argument size (slow path; explicit opt-in
// beyond the memoized triangle).
BigInt binomial_exact(long long n, long long k);
BigInt stirling2_exact(int n, int j);
BigInt stirling1_unsigned_exact(int n, int j);

/// Terminating Gaussian hypergeometric sum
///   sum_{n=0}^{min(j,j')} C(j,n) C(j',n) y^n  =  2F1(-j,-j'; 1; y).
double hyp2f1_terminating(int j, int jp, double y);

/// Hypergeometric-type sum with unsigned first-kind Stirling numbers:
///   sum_n c(j,n) c(j',n) y^n.
double stirling_hyp1(int j, int jp, double y);
SignedLogReal stirling_hyp1_slr(int j, int jp, const SignedLogReal& y);

/// Same sum with second-kind Stirling numbers.
double stirling_hyp2(int j, int jp, double y);
SignedLogReal stirling_hyp2_slr(int j, int jp, const SignedLogReal& y);

/// Regularized incomplete beta function I_x(a, b) for x in [0,1], a,b > 0.
/// Integer a, b take the exact binomial-tail sum; other parameters use a
/// continued fraction. Absolute accuracy ~1e-13 or better.
double reg_inc_beta(double x, double a, double b);

}  // namespace multiport
