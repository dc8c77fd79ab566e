#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "amkl/kl_diagnostics.hpp"
#include "amkl/rng.hpp"
#include "amkl/toy_oracles.hpp"

using namespace amkl;

namespace {

// A trace with occasional single-step increases but reliable two-step
// decrease, plus positive distances. Used for the randomized identities.
void random_trace(RandomSource& rng, std::vector<double>& f, std::vector<double>& dist) {
  const int len = 40 + static_cast<int>(rng.next_u64() % 160);
  f.clear();
  dist.clear();
  double value = 5.0 + rng.next_uniform();
  for (int k = 0; k < len; ++k) {
    f.push_back(value);
    dist.push_back(rng.next_uniform() < 0.1 ? 0.0 : 0.2 + rng.next_uniform());
    const double drop = 0.05 + 0.3 * rng.next_uniform();
    const double bump = rng.next_uniform() < 0.25 ? 0.2 * rng.next_uniform() : 0.0;
    value = std::max(0.0, value - drop) + bump;
  }
}

}  // namespace

TEST_CASE("one-step certificate on an exact geometric trace") {
  std::vector<double> f, dist;
  for (int k = 0; k < 40; ++k) {
    f.push_back(std::pow(4.0, -k));
    dist.push_back(std::pow(2.0, -k));
  }
  const DecreaseCertificate cert = check_A1(f, dist, 1);
  CHECK(cert.holds_after_k0);
  CHECK(cert.k0_hat == 0);
  CHECK(cert.violations.empty());
  REQUIRE(cert.c1_hat.has_value());
  CHECK(*cert.c1_hat == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("constant trace with zero distance passes vacuously") {
  const std::vector<double> f(10, 5.0);
  const std::vector<double> dist(10, 0.0);
  const DecreaseCertificate cert = check_A1(f, dist, 1);
  CHECK(cert.holds_after_k0);
  CHECK(cert.violations.empty());
  CHECK_FALSE(cert.c1_hat.has_value());  // the unbounded sentinel
}

TEST_CASE("oscillating trace fails per step but certifies with j = 2") {
  const std::vector<double> f = {1.0, 1.1, 0.5, 0.55, 0.25};
  const std::vector<double> dist = {0.9, 0.8, 1.0, 1.0, 0.5};

  const DecreaseCertificate single = check_A1(f, dist, 1);
  REQUIRE(single.violations.size() == 2);
  CHECK(single.violations[0] == 0);
  CHECK(single.violations[1] == 2);
  CHECK(single.holds_after_k0);  // k0 = 3 clears the rest
  CHECK(single.k0_hat == 3);

  const DecreaseCertificate pair = check_A1(f, dist, 2);
  CHECK(pair.holds_after_k0);
  CHECK(pair.violations.empty());
  REQUIRE(pair.c1_hat.has_value());
  CHECK(*pair.c1_hat == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a failing final index leaves no valid burn-in") {
  const std::vector<double> f = {1.0, 0.5, 0.6};
  const std::vector<double> dist = {1.0, 1.0, 1.0};
  const DecreaseCertificate cert = check_A1(f, dist, 1);
  CHECK_FALSE(cert.holds_after_k0);
  CHECK(cert.violations == std::vector<std::int64_t>{1});
  CHECK_FALSE(cert.c1_hat.has_value());
}

TEST_CASE("short traces are rejected") {
  const std::vector<double> f = {1.0, 0.5};
  const std::vector<double> dist = {1.0, 1.0};
  CHECK_THROWS_AS(check_A1(f, dist, 2), std::invalid_argument);
}

TEST_CASE("stronger certificate with alpha = 1/2 reproduces the one-step certificate") {
  RandomSource rng(321);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f, dist;
    random_trace(rng, f, dist);
    const int j = 1 + static_cast<int>(rng.next_u64() % 3);
    const DecreaseCertificate a1 = check_A1(f, dist, j);
    const A2Certificate a2 = check_A2(f, dist, j, 0.5);
    CHECK(a2.j == a1.j);
    CHECK(a2.k0_hat == a1.k0_hat);
    CHECK(a2.violations == a1.violations);
    CHECK(a2.holds_after_k0 == a1.holds_after_k0);
    REQUIRE(a2.c2_hat.has_value() == a1.c1_hat.has_value());
    if (a1.c1_hat.has_value()) {
      CHECK(std::fabs(*a2.c2_hat - *a1.c1_hat) <= 1e-12);
    }
  }
}

TEST_CASE("stronger certificate constant on the quadratic toy") {
  const IterTrace trace = run_toy({2.0}, {ToyIterKind::gradient_descent, 0.25, 0.0}, 1.0, 100);
  const A2Certificate cert = check_A2(trace.f_values(), trace.dist_values(), 1, 0.5);
  CHECK(cert.holds_after_k0);
  REQUIRE(cert.c2_hat.has_value());
  CHECK(std::fabs(*cert.c2_hat - 0.75) <= 1e-9);
}

TEST_CASE("stronger certificate is refused when the ratio collapses") {
  // Polynomial gaps with distances matched to exponent 3/4: under alpha = 2
  // the ratio decays like a power of k, so no constant can certify it.
  std::vector<double> f, dist;
  for (int k = 0; k <= 400; ++k) {
    const double gap = std::pow(k + 1.0, -2.0);
    f.push_back(gap);
    dist.push_back(std::pow(gap, 0.75));
  }
  const A2Certificate cert = check_A2(f, dist, 1, 2.0);
  CHECK_FALSE(cert.holds_after_k0);
  CHECK_FALSE(cert.violations.empty());

  // while the plain certificate on the same trace stands
  const DecreaseCertificate a1 = check_A1(f, dist, 1);
  CHECK(a1.holds_after_k0);
}

TEST_CASE("certificate is self-consistent: the infimum re-checks clean") {
  RandomSource rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> f, dist;
    random_trace(rng, f, dist);
    const DecreaseCertificate cert = check_A1(f, dist, 2);
    if (!cert.holds_after_k0 || !cert.c1_hat.has_value()) continue;
    for (std::size_t k = cert.k0_hat; k + 2 < f.size(); ++k) {
      const double lhs = *cert.c1_hat * dist[k + 2] * dist[k + 2];
      CHECK(lhs <= f[k] - f[k + 2] + 1e-12);
    }
  }
}

TEST_CASE("rate fitting recovers exact generators") {
  SUBCASE("geometric") {
    std::vector<double> gaps;
    for (int k = 0; k < 200; ++k) gaps.push_back(std::pow(2.0, -k));
    const RateReport report = fit_rate(gaps, 1);
    CHECK(report.regime == RateRegime::r_linear);
    REQUIRE(report.eta_hat.has_value());
    CHECK(std::fabs(*report.eta_hat - 0.5) <= 1e-9);
    CHECK(report.fit_residual <= 1e-9);
    REQUIRE(report.r1_hat.has_value());
    CHECK(*report.r1_hat == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("polynomial") {
    std::vector<double> gaps;
    for (int k = 0; k < 400; ++k) gaps.push_back(std::pow(k + 1.0, -2.0));
    const RateReport report = fit_rate(gaps, 1);
    CHECK(report.regime == RateRegime::r_sublinear);
    REQUIRE(report.sublinear_exponent_hat.has_value());
    CHECK(std::fabs(*report.sublinear_exponent_hat - 2.0) <= 1e-6);
    REQUIRE(report.theta_implied.has_value());
    CHECK(*report.theta_implied == doctest::Approx(0.75).epsilon(1e-9));
  }
  SUBCASE("finite") {
    const std::vector<double> gaps = {1.0, 0.3, 0.0, 0.0, 0.0, 0.0};
    const RateReport report = fit_rate(gaps, 1);
    CHECK(report.regime == RateRegime::finite);
    CHECK(report.k1_hat == 2);
  }
  SUBCASE("too short") {
    const std::vector<double> gaps = {1.0, 0.5, 0.25};
    CHECK(fit_rate(gaps, 1).regime == RateRegime::undetermined);
  }
  SUBCASE("negative gaps rejected") {
    CHECK_THROWS_AS(fit_rate({1.0, -0.1}, 1), std::invalid_argument);
  }
}

TEST_CASE("exponent estimation on power toys") {
  SUBCASE("quartic") {
    const IterTrace trace = run_toy({4.0}, {ToyIterKind::gradient_descent, 0.2, 0.0}, 1.0, 500);
    const KlExponentEstimate est = estimate_kl_exponent(trace, 0.0);
    REQUIRE(est.determined);
    CHECK(std::fabs(est.slope - 4.0 / 3.0) <= 1e-9);
    CHECK(std::fabs(est.theta_hat - 0.75) <= 1e-9);
  }
  SUBCASE("quadratic") {
    const IterTrace trace = run_toy({2.0}, {ToyIterKind::gradient_descent, 0.25, 0.0}, 1.0, 500);
    const KlExponentEstimate est = estimate_kl_exponent(trace, 0.0);
    REQUIRE(est.determined);
    CHECK(std::fabs(est.slope - 2.0) <= 1e-9);
    CHECK(std::fabs(est.theta_hat - 0.5) <= 1e-9);
  }
  SUBCASE("degenerate constant gaps") {
    const std::vector<double> f(40, 5.0);
    const std::vector<double> dist(40, 1.0);
    CHECK_FALSE(estimate_kl_exponent(f, dist, 4.0).determined);
  }
}

TEST_CASE("exponent recovery across powers") {
  for (double p : {2.0, 3.0, 4.0, 8.0}) {
    // gentle enough that 500 iterations stay above the underflow threshold
    const double t = p == 2.0 ? 0.25 : 0.9 / p;
    const IterTrace trace = run_toy({p}, {ToyIterKind::gradient_descent, t, 0.0}, 1.0, 500);
    const KlExponentEstimate est = estimate_kl_exponent(trace, 0.0);
    CAPTURE(p);
    REQUIRE(est.determined);
    CHECK(std::fabs(est.theta_hat - (1.0 - 1.0 / p)) <= 1e-3);
  }
}

TEST_CASE("exponent estimate is invariant under objective rescaling") {
  const IterTrace trace = run_toy({4.0}, {ToyIterKind::gradient_descent, 0.2, 0.0}, 1.0, 300);
  std::vector<double> f = trace.f_values();
  std::vector<double> dist = trace.dist_values();
  const double base = estimate_kl_exponent(f, dist, 0.0).theta_hat;
  const double s = 37.5;
  for (double& v : f) v *= s;
  for (double& v : dist) v *= s;
  const double scaled = estimate_kl_exponent(f, dist, 0.0).theta_hat;
  CHECK(std::fabs(base - scaled) <= 1e-9);
}

TEST_CASE("envelope verification on exact sequences") {
  SUBCASE("geometric under theta = 1/2") {
    std::vector<double> gaps;
    for (int k = 0; k < 200; ++k) gaps.push_back(std::pow(2.0, -k));
    const EnvelopeCheck check = verify_envelope(gaps, 1, 0.5, 0);
    CHECK(check.holds);
    CHECK(std::fabs(check.c_min - 1.0) <= 1e-9);
    REQUIRE(check.eta_used.has_value());
    CHECK(std::fabs(*check.eta_used - 0.5) <= 1e-9);
  }
  SUBCASE("polynomial under theta = 3/4") {
    std::vector<double> gaps;
    for (int k = 0; k < 200; ++k) gaps.push_back(std::pow(k + 1.0, -2.0));
    const EnvelopeCheck check = verify_envelope(gaps, 1, 0.75, 0);
    CHECK(check.holds);
    CHECK(std::fabs(check.c_min - 1.0) <= 1e-9);
  }
  SUBCASE("too-slow sequence under theta = 3/4 fails") {
    std::vector<double> gaps;
    for (int k = 0; k < 200; ++k) gaps.push_back(std::pow(k + 1.0, -1.0));
    const EnvelopeCheck check = verify_envelope(gaps, 1, 0.75, 0);
    CHECK_FALSE(check.holds);
    CHECK(check.c_min > 50.0);  // still growing at the end of the trace
  }
}

TEST_CASE("implied exponents from sublinear fits verify their own envelope") {
  for (double expo : {1.5, 2.0, 3.0}) {
    std::vector<double> gaps;
    for (int k = 0; k < 300; ++k) gaps.push_back(std::pow(k + 1.0, -expo));
    const RateReport report = fit_rate(gaps, 1);
    REQUIRE(report.regime == RateRegime::r_sublinear);
    REQUIRE(report.fit_residual < 0.1);
    REQUIRE(report.theta_implied.has_value());
    const EnvelopeCheck check = verify_envelope(gaps, 1, *report.theta_implied, 0);
    CAPTURE(expo);
    CHECK(check.holds);
  }
}

TEST_CASE("ratio bound of consecutive block steps") {
  SUBCASE("geometric diffs") {
    std::vector<double> diffs;
    for (int k = 0; k < 30; ++k) diffs.push_back(std::pow(0.8, k));
    const ChiReport report = check_chi_ratio(diffs);
    CHECK_FALSE(report.vacuous);
    CHECK(report.chi_hat == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(report.k0 == 1);
  }
  SUBCASE("constant diffs") {
    const std::vector<double> diffs(12, 0.7);
    const ChiReport report = check_chi_ratio(diffs);
    CHECK(report.chi_hat == 1.0);
  }
  SUBCASE("zero denominators are skipped and reported") {
    const std::vector<double> diffs = {1.0, 0.5, 0.0, 0.0, 0.4, 0.2, 0.1, 0.05};
    const ChiReport report = check_chi_ratio(diffs);
    CHECK_FALSE(report.vacuous);
    REQUIRE(report.skipped.size() == 2);
    CHECK(report.skipped[0] == 2);
    CHECK(report.skipped[1] == 3);
  }
  SUBCASE("all denominators zero is vacuous") {
    const std::vector<double> diffs = {1.0, 0.0, 0.0};
    CHECK(check_chi_ratio(diffs).vacuous);
  }
  SUBCASE("needs three records") {
    CHECK_THROWS_AS(check_chi_ratio({1.0}), std::invalid_argument);
  }
}
