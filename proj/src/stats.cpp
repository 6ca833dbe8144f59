#include "simlb/stats.hpp"

#include <cmath>
#include <limits>

#include "simlb/error.hpp"

namespace simlb {

namespace {

constexpr double kEps = 1e-12;
constexpr int kMaxIterations = 300;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), evaluated with the modified Lentz method.
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
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
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0) || !(b > 0)) throw Error("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw Error("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double percent_improvement(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a);
  if (!(ma > 0)) throw ZeroBaseline("baseline mean must be positive");
  return 100.0 * (ma - mean(b)) / ma;
}

TestResult paired_t_test(const PairedSample& sample) {
  const std::size_t n = sample.a.size();
  if (n != sample.b.size()) throw ConfigError("paired samples differ in length");
  if (n < 2) throw ConfigError("paired t-test needs at least two pairs");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = sample.a[i] - sample.b[i];
  const double md = mean(d);
  double ss = 0.0;
  for (double v : d) ss += (v - md) * (v - md);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0)) throw DegenerateDifferences("paired differences have zero spread");

  TestResult r;
  r.degrees_of_freedom = static_cast<int>(n - 1);
  r.t_statistic = md / (sd / std::sqrt(static_cast<double>(n)));
  r.p_two_sided = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  const double ma = mean(sample.a);
  r.mean_improvement_pct =
      ma > 0 ? percent_improvement(sample.a, sample.b) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace simlb
