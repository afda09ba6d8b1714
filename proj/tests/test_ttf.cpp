#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "multiport/ttf.hpp"

using namespace multiport;

namespace {

DeviceConfig finite_cfg(long s, int d, double eps) {
  return DeviceConfig(PortCount::finite(s), d, eps);
}

double master_value(long s, int d, double eps) {
  return ttf_master(amplitudes_finite(finite_cfg(s, d, eps))).value;
}

}  // namespace

TEST_CASE("fock closed form") {
  CHECK(ttf_fock(2) == 1.0 / 6.0);
  CHECK(ttf_fock(3) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(ttf_fock(100) == doctest::Approx(99.0 * 99.0 / (100.0 * 101.0)).epsilon(1e-15));
  CHECK(ttf_fock(100000) > 0.99);  // approaches unity
  CHECK(ttf_master(amplitudes_fock(6)).value == doctest::Approx(ttf_fock(6)).epsilon(1e-12));
}

TEST_CASE("master formula worked example: s=2, d=3, lossless") {
  const TtfResult r = ttf_master(amplitudes_finite(finite_cfg(2, 3, 0.0)));
  CHECK(r.value == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(r.method == TtfMethod::MasterFormula);
  CHECK(ttf_finite_lossless(2, 3) == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("master formula rejects non-IC devices") {
  CHECK_THROWS_AS(ttf_master(amplitudes_finite(finite_cfg(2, 4, 0.0))), NonIcError);
  CHECK_THROWS_AS(ttf_finite_lossless(2, 4), NonIcError);
  CHECK_THROWS_AS(ttf_finite_lossy(3, 5, 0.2), NonIcError);
}

TEST_CASE("d=2 constants") {
  for (long s : {1L, 2L, 5L, 40L}) {
    CHECK(ttf_finite_lossless(s, 2) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  }
  // (1 + 2 eps) / (6 - 6 eps) for any port count
  for (double eps : {0.1, 0.3, 0.75}) {
    const double expected = (1.0 + 2.0 * eps) / (6.0 - 6.0 * eps);
    CHECK(ttf_infinite_lossy(2, eps) == doctest::Approx(expected).epsilon(1e-12));
    for (long s : {2L, 4L, 8L}) {
      CHECK(ttf_finite_lossy(s, 2, eps) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK(ttf_infinite_lossy(2, 0.3) == doctest::Approx(0.38095238095238095).epsilon(1e-12));
}

TEST_CASE("infinite lossy closed form") {
  CHECK(ttf_infinite_lossy(5, 0.0) == ttf_fock(5));
  // 60-digit reference values
  CHECK(ttf_infinite_lossy(3, 0.2) == doctest::Approx(0.77083333333333333).epsilon(1e-12));
  CHECK(ttf_infinite_lossy(4, 0.3) == doctest::Approx(2.7524781341107872).epsilon(1e-12));
  CHECK(ttf_infinite_lossy(6, 0.5) == doctest::Approx(182.42857142857143).epsilon(1e-12));
  CHECK(ttf_infinite_lossy(10, 0.5) == doctest::Approx(51770.636363636364).epsilon(1e-12));
  // master formula route agreement on the binomial amplitudes
  for (int d : {2, 4, 7}) {
    for (double eps : {0.05, 0.35, 0.6}) {
      const double m = ttf_master(amplitudes_binomial(d, eps)).value;
      CHECK(std::abs(m - ttf_infinite_lossy(d, eps)) / m < 1e-10);
    }
  }
}

TEST_CASE("finite lossless closed form") {
  CHECK(ttf_finite_lossless(4, 3) == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(ttf_finite_lossless(3, 4) == doctest::Approx(2.325).epsilon(1e-12));
  // large-s limit approaches the Fock value
  CHECK(std::abs(ttf_finite_lossless(1000000, 4) - ttf_fock(4)) < 1e-3);
}

TEST_CASE("finite lossy closed form") {
  // 60-digit reference values
  CHECK(ttf_finite_lossy(4, 3, 0.2) == doctest::Approx(1.0277777777777778).epsilon(1e-12));
  CHECK(ttf_finite_lossy(8, 5, 0.3) == doctest::Approx(17.686723756966343).epsilon(1e-12));
  CHECK(ttf_finite_lossy(12, 6, 0.1) == doctest::Approx(4.7331950246285937).epsilon(1e-12));
  CHECK(ttf_finite_lossy(5, 4, 0.35) == doctest::Approx(9.0076173949324837).epsilon(1e-12));
  CHECK(ttf_finite_lossy(9, 10, 0.5) == doctest::Approx(195220245.31705712).epsilon(1e-10));
  CHECK(ttf_finite_lossy(40, 10, 0.5) == doctest::Approx(183317.73306623061).epsilon(1e-10));
  CHECK(ttf_finite_lossy(60, 12, 0.7) == doctest::Approx(7300026308.0090897).epsilon(1e-9));
  CHECK(ttf_finite_lossy(7, 4, 0.0) == ttf_finite_lossless(7, 4));
}

TEST_CASE("route agreement on a grid") {
  for (int d : {2, 3, 5, 8, 10}) {
    for (long s : {static_cast<long>(d - 1), static_cast<long>(d), 2L * d, 40L}) {
      if (s < d - 1) continue;
      for (double eps : {0.0, 0.1, 0.3, 0.5}) {
        const double closed =
            eps == 0.0 ? ttf_finite_lossless(s, d) : ttf_finite_lossy(s, d, eps);
        const double master = master_value(s, d, eps);
        CHECK(std::abs(master - closed) / std::abs(closed) < 1e-9);
      }
    }
  }
}

TEST_CASE("regime dispatch") {
  CHECK(ttf_closed_form(DeviceConfig(PortCount::infinite(), 5, 0.0)).value == ttf_fock(5));
  CHECK(ttf_closed_form(DeviceConfig(PortCount::infinite(), 4, 0.3)).value ==
        ttf_infinite_lossy(4, 0.3));
  CHECK(ttf_closed_form(finite_cfg(6, 4, 0.0)).value == ttf_finite_lossless(6, 4));
  CHECK(ttf_closed_form(finite_cfg(6, 4, 0.2)).value == ttf_finite_lossy(6, 4, 0.2));
  CHECK(ttf_closed_form(finite_cfg(6, 4, 0.2)).method == TtfMethod::ClosedForm);
}

TEST_CASE("fock value is the lossless floor") {
  for (int d : {2, 4, 6, 9}) {
    for (long s = d - 1; s <= 30; s += 3) {
      CHECK(ttf_finite_lossless(s, d) >= ttf_fock(d) - 1e-12);
    }
  }
}

TEST_CASE("loss never improves the infinite-port device") {
  double prev = ttf_infinite_lossy(5, 0.0);
  for (int k = 1; k <= 90; ++k) {
    const double cur = ttf_infinite_lossy(5, 0.01 * k);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
}

TEST_CASE("uniform simplex sampling moments") {
  const int d = 5;
  const int n = 100000;
  for (SimplexSampler sampler : {SimplexSampler::ComplexGaussian, SimplexSampler::Dirichlet}) {
    Rng rng(2718);
    double mean = 0.0, mean2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vector p = sample_simplex_uniform(d, rng, sampler);
      mean += p(0);
      mean2 += p(0) * p(0);
    }
    mean /= n;
    mean2 /= n;
    // E[p] = 1/d; Var(p) = (d-1) / (d^2 (d+1))
    const double var1 = (d - 1.0) / (d * d * (d + 1.0));
    CHECK(std::abs(mean - 1.0 / d) < 3.0 * std::sqrt(var1 / n));
    const double exact2 = 2.0 / (d * (d + 1.0));
    const double se2 = std::sqrt(var1 / n);  // conservative scale for the p^2 mean
    CHECK(std::abs(mean2 - exact2) < 3.0 * se2);
  }
  Rng rng(1);
  CHECK(sample_simplex_uniform(1, rng)(0) == 1.0);
}

TEST_CASE("exact simplex moments") {
  CHECK(simplex_moment(5, 1).num == 1);
  CHECK(simplex_moment(5, 1).den == 5);
  CHECK(simplex_moment(7, 2).den == 28);  // 2/(d(d+1)) = 1/28
  CHECK(simplex_moment(3, 3).den == 10);  // 1/C(5,3)
  CHECK(simplex_moment(4, 0).den == 1);
  CHECK(simplex_moment(6, 2).to_double() == doctest::Approx(2.0 / 42).epsilon(1e-15));
}

TEST_CASE("monte carlo reproduces closed forms") {
  struct Case {
    AmplitudeMatrix B;
    double expected;
  };
  const Case cases[] = {
      {amplitudes_fock(3), ttf_fock(3)},
      {amplitudes_finite(finite_cfg(2, 3, 0.0)), 2.0 / 3},
      {amplitudes_binomial(2, 0.3), 0.38095238095238095},
      {amplitudes_finite(finite_cfg(6, 4, 0.2)), ttf_finite_lossy(6, 4, 0.2)},
  };
  for (const auto& c : cases) {
    const TtfResult r = ttf_monte_carlo(c.B, 100000, 99);
    REQUIRE(r.mc.has_value());
    CHECK(std::abs(r.value - c.expected) < 3.0 * r.mc->std_error);
    CHECK(r.method == TtfMethod::MonteCarlo);
    CHECK(r.mc->rejected <= 1000);
  }
}

TEST_CASE("monte carlo boundary rejection accounting") {
  // a device whose second outcome is vanishingly likely rejects essentially
  // every simplex sample at the probability floor
  Matrix starved(2, 2);
  starved << 1.0, 1.0 - 1e-13, 0.0, 1e-13;
  const AmplitudeMatrix B(starved, DeviceConfig(PortCount::finite(1), 2, 0.0));
  CHECK_THROWS_AS(ttf_monte_carlo(B, 1000, 8), BoundaryError);
}

TEST_CASE("monte carlo consistency over repeated seeded runs") {
  // closed form within 3 SE in at least 99 of 100 independent runs
  const AmplitudeMatrix B = amplitudes_finite(finite_cfg(4, 3, 0.2));
  const double closed = ttf_finite_lossy(4, 3, 0.2);
  int hits = 0;
  for (int run = 0; run < 100; ++run) {
    const TtfResult r = ttf_monte_carlo(B, 20000, 7000 + run);
    if (std::abs(r.value - closed) <= 3.0 * r.mc->std_error) ++hits;
  }
  CHECK(hits >= 99);
}

TEST_CASE("monte carlo is bit-reproducible across worker counts") {
  const AmplitudeMatrix B = amplitudes_finite(finite_cfg(4, 3, 0.2));
  setenv("MULTIPORT_TTF_THREADS", "1", 1);
  const TtfResult one = ttf_monte_carlo(B, 20000, 1234);
  setenv("MULTIPORT_TTF_THREADS", "5", 1);
  const TtfResult five = ttf_monte_carlo(B, 20000, 1234);
  unsetenv("MULTIPORT_TTF_THREADS");
  CHECK(one.value == five.value);
  CHECK(one.mc->std_error == five.mc->std_error);
}

TEST_CASE("gaussian and dirichlet sampling routes agree") {
  const AmplitudeMatrix B = amplitudes_binomial(4, 0.25);
  const TtfResult g = ttf_monte_carlo(B, 200000, 5, SimplexSampler::ComplexGaussian);
  const TtfResult di = ttf_monte_carlo(B, 200000, 6, SimplexSampler::Dirichlet);
  const double combined = std::hypot(g.mc->std_error, di.mc->std_error);
  CHECK(std::abs(g.value - di.value) < 3.0 * combined);
}
