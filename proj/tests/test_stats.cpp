#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "simlb/error.hpp"
#include "simlb/stats.hpp"

using namespace simlb;

namespace {

// Adaptive Simpson, used as an independent reference for the closed forms.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps) {
    return left + right + (left + right - whole) / 15;
  }
  return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

// Split first so a coarse top-level estimate cannot converge by accident.
double integrate(const std::function<double(double)>& f, double a, double b) {
  constexpr int kPieces = 64;
  double total = 0;
  for (int i = 0; i < kPieces; ++i) {
    const double lo = a + (b - a) * i / kPieces, hi = a + (b - a) * (i + 1) / kPieces;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    total += simpson(f, lo, hi, fa, fm, fb, (hi - lo) / 6 * (fa + 4 * fm + fb), 1e-16, 50);
  }
  return total;
}

double t_two_sided_by_quadrature(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                   std::sqrt(df * std::numbers::pi);
  const auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  return 1.0 - 2.0 * integrate(pdf, 0.0, std::abs(t));
}

double beta_by_quadrature(double x, double a, double b) {
  const double lb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const auto f = [&](double u) {
    return std::exp((a - 1) * std::log(u) + (b - 1) * std::log1p(-u) - lb);
  };
  return integrate(f, 1e-300, x);
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("paired test on differences 1, 2, 3") {
    const PairedSample s{{"a", "b", "c"}, {1, 2, 3}, {0, 0, 0}};
    const TestResult r = paired_t_test(s);
    CHECK(r.t_statistic == doctest::Approx(2 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(r.degrees_of_freedom == 2);
    // df = 2 has the closed form p = 1 - t / sqrt(t^2 + 2).
    const double t = r.t_statistic;
    CHECK(r.p_two_sided == doctest::Approx(1 - t / std::sqrt(t * t + 2)).epsilon(1e-12));
    CHECK(std::abs(r.p_two_sided - 0.07418) <= 1e-4);
  }

  TEST_CASE("equal samples have no spread to test") {
    const PairedSample s{{"a", "b"}, {5, 7}, {5, 7}};
    CHECK_THROWS_AS(paired_t_test(s), DegenerateDifferences);
  }

  TEST_CASE("short or uneven samples are rejected") {
    CHECK_THROWS_AS(paired_t_test({{"a"}, {1}, {0}}), ConfigError);
    CHECK_THROWS_AS(paired_t_test({{"a", "b"}, {1, 2}, {0}}), ConfigError);
  }

  TEST_CASE("swapping the samples flips t and keeps p") {
    const PairedSample s{{}, {10, 12, 9, 15}, {8, 11, 9.5, 11}};
    const PairedSample r{{}, s.b, s.a};
    const auto x = paired_t_test(s), y = paired_t_test(r);
    CHECK(x.t_statistic == doctest::Approx(-y.t_statistic));
    CHECK(x.p_two_sided == doctest::Approx(y.p_two_sided));
  }

  TEST_CASE("two-sided p agrees with numerical integration of the t density") {
    for (double df : {2.0, 5.0, 10.0, 30.0}) {
      for (double t : {0.0, 0.3, 1.0, 2.0, 3.4641, 5.0, 9.0}) {
        CAPTURE(df);
        CAPTURE(t);
        CHECK(std::abs(student_t_two_sided_p(t, df) - t_two_sided_by_quadrature(t, df)) <= 1e-8);
        CHECK(student_t_two_sided_p(-t, df) == student_t_two_sided_p(t, df));
      }
    }
  }

  TEST_CASE("incomplete beta agrees with numerical integration") {
    for (double a : {1.0, 2.5, 5.0, 15.0}) {
      for (double b : {1.0, 1.5, 4.0}) {
        for (double x : {0.05, 0.3, 0.5, 0.8, 0.95}) {
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(x);
          CHECK(std::abs(incomplete_beta(x, a, b) - beta_by_quadrature(x, a, b)) <= 1e-8);
        }
      }
    }
    CHECK(incomplete_beta(0.0, 2, 3) == 0.0);
    CHECK(incomplete_beta(1.0, 2, 3) == 1.0);
  }

  TEST_CASE("percent improvement uses the first sample as baseline") {
    const std::vector<double> a{100}, b{66};
    CHECK(percent_improvement(a, b) == doctest::Approx(34.0));
    CHECK(percent_improvement(a, a) == 0.0);
    const std::vector<double> cost_a{26246}, cost_b{22818};
    CHECK(percent_improvement(cost_a, cost_b) == doctest::Approx(13.06).epsilon(1e-3));
    const std::vector<double> zero{0};
    CHECK_THROWS_AS(percent_improvement(zero, b), ZeroBaseline);
  }
}
