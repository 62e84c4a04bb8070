#pragma once

// Goodness-of-fit statistics used by the verification harness.

#include <functional>
#include <span>
#include <vector>

namespace mmv::stats {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

// P(chi-square with `dof` degrees of freedom > statistic).
double chi_square_sf(double statistic, double dof);

// Kolmogorov limiting survival function Q_KS(lambda).
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
// Two-sample test.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
  int bins_used = 0;
};

// Pearson chi-square of observed counts against expected counts. Adjacent
// bins (in the given order) are pooled until each expected count is at
// least `min_expected`; dof = pooled bins - 1.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               double min_expected = 5.0);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values);

}  // namespace mmv::stats
