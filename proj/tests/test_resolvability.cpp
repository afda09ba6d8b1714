#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "multiport/resolvability.hpp"

using namespace multiport;

namespace {
constexpr double kMu = 1e-3;
}

TEST_CASE("j_threshold") {
  // lossless devices resolve every level
  for (int d : {2, 10, 100}) {
    const auto jt = j_threshold(d, 0.0, kMu);
    REQUIRE(jt.has_value());
    CHECK(*jt == d - 1);
  }
  // frozen values from a direct scan with the exact incomplete beta
  CHECK(j_threshold(100, 0.5, kMu) == 64);
  CHECK(j_threshold(100, 0.2, kMu) == 90);
  CHECK(j_threshold(50, 0.98, kMu) == 4);
  CHECK(j_threshold(200, 0.3, kMu) == 158);
  CHECK(j_threshold(12, 0.4, kMu) == 11);
  // an unattainable threshold reports none
  CHECK_FALSE(j_threshold(5, 0.5, 0.999999).has_value());
}

TEST_CASE("j_threshold is nonincreasing in eps") {
  for (int d : {20, 75}) {
    int prev = d;
    for (int k = 0; k < 100; ++k) {
      const auto jt = j_threshold(d, 0.01 * k, kMu);
      const int cur = jt ? *jt : -1;
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("analytic resolvable-dimension bound") {
  CHECK(d_res_bound(100, 0.5, kMu) == doctest::Approx(53.453377).epsilon(1e-6));
  CHECK(std::atanh(1.0 - 2.0 * kMu) == doctest::Approx(3.4533773893).epsilon(1e-9));
  CHECK(d_res_bound(1000, 0.3, kMu) == doctest::Approx(703.4533774).epsilon(1e-8));
  // unclamped bound exceeds d at eps = 0 (lossless devices resolve everything)
  CHECK(d_res_bound(40, 0.0, kMu) > 40.0);
}

TEST_CASE("bound is a conservative underestimate away from the extreme-loss corner") {
  // Holds at the plotted scales for eps <= 0.95; the tanh surrogate's fixed
  // transition width makes it optimistic only deep in the eps -> 1 corner.
  for (int d : {20, 50, 100, 200}) {
    for (int k = 0; k <= 95; k += 5) {
      const double e = 0.01 * k;
      const auto jt = j_threshold(d, e, kMu);
      const int dres = jt ? *jt + 1 : 0;
      const double clamped = std::min(d_res_bound(d, e, kMu), static_cast<double>(d));
      CHECK(clamped <= dres + 1e-9);
    }
  }
  // pinned corner behavior: at d=20, eps=0.97 the bound exceeds the scan
  const auto jt = j_threshold(20, 0.97, kMu);
  CHECK(*jt + 1 < d_res_bound(20, 0.97, kMu));
}

TEST_CASE("critical eps, infinite ports") {
  // the IC condition reduces to (1-eps)^d > mu, so the root is 1 - mu^(1/d)
  for (int d : {2, 10, 50, 100, 200}) {
    const CriticalEps ce = critical_eps_infinite(d, kMu);
    CHECK(ce.exact ==
          doctest::Approx(1.0 - std::pow(kMu, 1.0 / d)).epsilon(1e-7));
    CHECK(ce.approx == doctest::Approx(3.4533773893 / d).epsilon(1e-9));
  }
  CHECK(critical_eps_infinite(100, kMu).approx == doctest::Approx(0.03453377).epsilon(1e-6));
  // 1/d scaling of the exact threshold
  const double r100 = critical_eps_infinite(200, kMu).exact /
                      critical_eps_infinite(100, kMu).exact;
  CHECK(r100 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("critical eps, finite ports") {
  // d=2: the last-row sum is 1-eps for every s, so eps_crit = 1 - mu
  for (long s : {1L, 4L, 19L}) {
    CHECK(*critical_eps_finite(s, 2, kMu) == doctest::Approx(1.0 - kMu).epsilon(1e-6));
  }
  // closed form of the last-row sum: K_s (1-eps)^(d-1), K_s = s!/((s-d+1)! s^(d-1))
  for (auto [s, d] : {std::pair{6L, 4}, std::pair{24L, 8}}) {
    double log_k = 0.0;
    for (int i = 1; i < d - 1; ++i) log_k += std::log1p(-static_cast<double>(i) / s);
    const double expected = 1.0 - std::pow(kMu / std::exp(log_k), 1.0 / (d - 1));
    CHECK(*critical_eps_finite(s, d, kMu) == doctest::Approx(expected).epsilon(1e-6));
  }
  // the smallest IC-capable devices can sit below the threshold before any
  // loss at all: at d = s = 12 the lossless row sum 12!/12^11 is 6.4e-4
  CHECK_FALSE(critical_eps_finite(12, 12, kMu).has_value());
  CHECK(critical_eps_finite(11, 11, kMu).has_value());
  // nondecreasing in s at fixed d (absent thresholds count as zero)
  for (int d : {4, 8, 12}) {
    const double a = critical_eps_finite(d, d, kMu).value_or(0.0);
    const double b = critical_eps_finite(2 * d, d, kMu).value_or(0.0);
    const double c = critical_eps_finite(4 * d, d, kMu).value_or(0.0);
    CHECK(a <= b + 1e-9);
    CHECK(b <= c + 1e-9);
  }
  // the s -> infinity proxy closes in on the infinite-regime threshold
  for (int d : {4, 8, 12}) {
    const double fin = *critical_eps_finite(1000000, d, kMu);
    const double inf = critical_eps_infinite(d, kMu).exact;
    CHECK(std::abs(fin - inf) / inf < 0.10);
  }
  const double gap4 = std::abs(*critical_eps_finite(1000000, 4, kMu) -
                               critical_eps_infinite(4, kMu).exact);
  const double gap12 = std::abs(*critical_eps_finite(1000000, 12, kMu) -
                                critical_eps_infinite(12, kMu).exact);
  CHECK(gap12 < gap4);  // conventions converge as d grows
  CHECK_THROWS_AS(critical_eps_finite(2, 5, kMu), NonIcError);
}

TEST_CASE("phase diagram") {
  std::vector<double> grid;
  for (int k = 0; k <= 95; ++k) grid.push_back(0.01 * k);
  const auto rows = phase_diagram(50, kMu, grid);
  REQUIRE(rows.size() == grid.size());
  CHECK(rows[0].d_res_numeric == 50);  // lossless row resolves everything
  CHECK(rows[0].d_res_bound == 50.0);  // clamped view reports d
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].d_res_numeric <= rows[i - 1].d_res_numeric);
    CHECK(rows[i].d_res_bound <= rows[i].d_res_numeric + 1e-9);
  }
  // high-loss region resolves only a handful of levels
  CHECK(rows.back().d_res_numeric <= 8);
}

TEST_CASE("informational completeness diagnostics") {
  CHECK(is_informationally_complete(amplitudes_fock(6), kMu).ic);

  // too few ports: rank failure regardless of traces
  const auto few = is_informationally_complete(
      amplitudes_finite(DeviceConfig(PortCount::finite(3), 5, 0.0)), kMu);
  CHECK_FALSE(few.ic);
  CHECK(few.gram_min_eigenvalue < 1e-12);

  // infinite-port device straddling its critical loss
  const int d = 10;
  const double ec = critical_eps_infinite(d, kMu).exact;
  CHECK(is_informationally_complete(amplitudes_binomial(d, ec * 0.999), kMu).ic);
  const auto above = is_informationally_complete(amplitudes_binomial(d, ec * 1.001), kMu);
  CHECK_FALSE(above.ic);
  CHECK(above.failing_outcomes == std::vector<int>{d - 1});
}

TEST_CASE("resolvability report") {
  const ResolvabilityReport rep = resolvability_report(100, 0.5, kMu);
  CHECK(rep.j_thres == 64);
  CHECK(rep.d_res_numeric == 65);
  CHECK(rep.d_res_analytic_bound == doctest::Approx(53.4534).epsilon(1e-4));
  CHECK_FALSE(rep.ic);
  CHECK(resolvability_report(100, 0.001, kMu).ic);
  // numeric d_res never exceeds d, and ic holds exactly when it reaches d
  for (double e : {0.0, 0.2, 0.9}) {
    const auto r = resolvability_report(30, e, kMu);
    CHECK(r.d_res_numeric <= 30);
    CHECK(r.ic == (r.d_res_numeric == 30));
  }
}
