#pragma once

#include <span>
#include <string>
#include <vector>

namespace simlb {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction,
// converged to 1e-12 relative or 300 iterations.
double incomplete_beta(double x, double a, double b);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct PairedSample {
  std::vector<std::string> labels;
  std::vector<double> a;  // baseline
  std::vector<double> b;  // candidate
};

struct TestResult {
  double t_statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_two_sided = 1.0;
  double mean_improvement_pct = 0.0;
};

// Two-sided paired t-test on d = a - b. Throws DegenerateDifferences when the
// differences have zero spread, ConfigError on unequal or short samples.
TestResult paired_t_test(const PairedSample& sample);

// 100 * (mean(a) - mean(b)) / mean(a); positive when b is lower than the
// baseline a. Throws ZeroBaseline unless mean(a) > 0.
double percent_improvement(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> values);

inline constexpr const char* kStatsCsvHeader =
    "metric,balancer_a,balancer_b,n,t,df,p_two_sided,improvement_pct";

}  // namespace simlb
