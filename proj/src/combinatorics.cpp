#include "multiport/combinatorics.hpp"

#include <cmath>
#include <stdexcept>

namespace multiport {

namespace {

const BigInt kZero = 0;

// Round-trip safe double bits for a shifted cpp_int mantissa.
constexpr unsigned kMantissaBits = 900;

}  // namespace

double log_abs(const BigInt& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  BigInt a = abs(v);
  const unsigned bits = msb(a);
  if (bits <= kMantissaBits) {
    return std::log(a.convert_to<double>());
  }
  const unsigned shift = bits - kMantissaBits;
  const BigInt m = a >> shift;
  return std::log(m.convert_to<double>()) + shift * std::log(2.0);
}

SignedLogReal to_signed_log(const BigInt& v) {
  if (v == 0) return SignedLogReal::zero();
  return SignedLogReal::from_log(log_abs(v), v > 0 ? +1 : -1);
}

CombinatoricsTable::CombinatoricsTable(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("CombinatoricsTable: n_max must be >= 0");
  binom_.resize(n_max + 1);
  s2_.resize(n_max + 1);
  c1_.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    binom_[n].assign(n + 1, BigInt(0));
    s2_[n].assign(n + 1, BigInt(0));
    c1_[n].assign(n + 1, BigInt(0));
    binom_[n][0] = 1;
    if (n == 0) {
      s2_[0][0] = 1;
      c1_[0][0] = 1;
      continue;
    }
    for (int k = 1; k <= n; ++k) {
      binom_[n][k] = binom_[n - 1][k - 1] + (k < n ? binom_[n - 1][k] : BigInt(0));
      s2_[n][k] = (k < n ? BigInt(k) * s2_[n - 1][k] : BigInt(0)) + s2_[n - 1][k - 1];
      c1_[n][k] = (k < n ? BigInt(n - 1) * c1_[n - 1][k] : BigInt(0)) + c1_[n - 1][k - 1];
    }
  }
}

const BigInt& CombinatoricsTable::lookup(const std::vector<std::vector<BigInt>>& tri,
                                         int n, int k) const {
  if (n < 0 || k < 0 || k > n) return kZero;
  if (n > n_max_) {
    throw std::out_of_range("CombinatoricsTable: n exceeds memoized n_max; "
                            "use the *_exact functions for larger arguments");
  }
  return tri[n][k];
}

const BigInt& CombinatoricsTable::binomial(int n, int k) const { return lookup(binom_, n, k); }
const BigInt& CombinatoricsTable::stirling2(int n, int j) const { return lookup(s2_, n, j); }
const BigInt& CombinatoricsTable::stirling1_unsigned(int n, int j) const {
  return lookup(c1_, n, j);
}

const CombinatoricsTable& CombinatoricsTable::shared() {
  static const CombinatoricsTable table(kDefaultNMax);
  return table;
}

BigInt binomial_exact(long long n, long long k) {
  if (n < 0) throw std::invalid_argument("binomial_exact: n must be >= 0");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (long long i = 0; i < k; ++i) {
    result *= (n - i);
    result /= (i + 1);  // exact: divides a product of i+1 consecutive integers
  }
  return result;
}

BigInt stirling2_exact(int n, int j) {
  if (n < 0 || j < 0) throw std::invalid_argument("stirling2_exact: negative argument");
  if (j > n) return 0;
  std::vector<BigInt> row(j + 1, 0), prev(j + 1, 0);
  prev[0] = 1;
  for (int m = 1; m <= n; ++m) {
    row.assign(j + 1, 0);
    for (int k = 1; k <= std::min(m, j); ++k) row[k] = k * prev[k] + prev[k - 1];
    std::swap(row, prev);
  }
  return prev[j];
}

BigInt stirling1_unsigned_exact(int n, int j) {
  if (n < 0 || j < 0) throw std::invalid_argument("stirling1_unsigned_exact: negative argument");
  if (j > n) return 0;
  std::vector<BigInt> row(j + 1, 0), prev(j + 1, 0);
  prev[0] = 1;
  for (int m = 1; m <= n; ++m) {
    row.assign(j + 1, 0);
    for (int k = 1; k <= std::min(m, j); ++k) row[k] = BigInt(m - 1) * prev[k] + prev[k - 1];
    std::swap(row, prev);
  }
  return prev[j];
}

double hyp2f1_terminating(int j, int jp, double y) {
  if (j < 0 || jp < 0) throw std::invalid_argument("hyp2f1_terminating: negative order");
  const auto& tab = CombinatoricsTable::shared();
  const int top = std::min(j, jp);
  double sum = 0.0;
  double yn = 1.0;
  for (int n = 0; n <= top; ++n) {
    const double cj = (j <= tab.n_max()) ? tab.binomial(j, n).convert_to<double>()
                                         : binomial_exact(j, n).convert_to<double>();
    const double cjp = (jp <= tab.n_max()) ? tab.binomial(jp, n).convert_to<double>()
                                           : binomial_exact(jp, n).convert_to<double>();
    sum += cj * cjp * yn;
    yn *= y;
  }
  return sum;
}

namespace {

template <typename Coeff>
SignedLogReal hyp_sum_slr(int j, int jp, const SignedLogReal& y, Coeff coeff) {
  SignedLogReal acc = SignedLogReal::zero();
  SignedLogReal yn = SignedLogReal::one();
  const int top = std::min(j, jp);
  for (int n = 0; n <= top; ++n) {
    acc = acc + coeff(j, n) * coeff(jp, n) * yn;
    yn = yn * y;
  }
  return acc;
}

SignedLogReal table_or_exact_c1(int n, int k) {
  const auto& tab = CombinatoricsTable::shared();
  return n <= tab.n_max() ? to_signed_log(tab.stirling1_unsigned(n, k))
                          : to_signed_log(stirling1_unsigned_exact(n, k));
}

SignedLogReal table_or_exact_s2(int n, int k) {
  const auto& tab = CombinatoricsTable::shared();
  return n <= tab.n_max() ? to_signed_log(tab.stirling2(n, k))
                          : to_signed_log(stirling2_exact(n, k));
}

}  // namespace

SignedLogReal stirling_hyp1_slr(int j, int jp, const SignedLogReal& y) {
  return hyp_sum_slr(j, jp, y, table_or_exact_c1);
}

double stirling_hyp1(int j, int jp, double y) {
  if (j < 0 || jp < 0) throw std::invalid_argument("stirling_hyp1: negative order");
  return stirling_hyp1_slr(j, jp, SignedLogReal::from_double(y)).to_double();
}

SignedLogReal stirling_hyp2_slr(int j, int jp, const SignedLogReal& y) {
  return hyp_sum_slr(j, jp, y, table_or_exact_s2);
}

double stirling_hyp2(int j, int jp, double y) {
  if (j < 0 || jp < 0) throw std::invalid_argument("stirling_hyp2: negative order");
  return stirling_hyp2_slr(j, jp, SignedLogReal::from_double(y)).to_double();
}

namespace {

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Binomial upper tail P[Bin(n, x) >= a] summed termwise in log space.
double binomial_upper_tail(long long n, long long a, double x) {
  LogSumAccumulator acc;
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  for (long long k = a; k <= n; ++k) {
    acc.add_log(log_choose(static_cast<double>(n), static_cast<double>(k)) + k * lx +
                (n - k) * l1x);
  }
  return acc.empty() ? 0.0 : std::exp(acc.log_sum());
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

bool near_integer(double v, long long& out) {
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-9 && r >= 1.0 && r < 9e15) {
    out = static_cast<long long>(r);
    return true;
  }
  return false;
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("reg_inc_beta: x outside [0, 1]");
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a, b must be > 0");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  long long ia = 0, ib = 0;
  if (near_integer(a, ia) && near_integer(b, ib) && ia + ib - 1 <= 2'000'000) {
    // I_x(a,b) = P[Bin(a+b-1, x) >= a]; sum whichever tail is smaller.
    const long long n = ia + ib - 1;
    if (static_cast<double>(ia) > n * x) {
      return binomial_upper_tail(n, ia, x);
    }
    return 1.0 - binomial_upper_tail(n, n - ia + 1, 1.0 - x);
  }

  const double log_front = a * std::log(x) + b * std::log1p(-x) -
                           (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace multiport
