#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "mmv/samplers.hpp"
#include "mmv/stats.hpp"

using namespace mmv;

namespace {

bool same_draws(const std::vector<Draw>& a, const std::vector<Draw>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (a[i][j].rows() != b[i][j].rows() || a[i][j].cols() != b[i][j].cols()) return false;
      if (a[i][j] != b[i][j]) return false;
    }
  }
  return true;
}

double student_t3_cdf(double t) {
  const double x = t / std::sqrt(3.0);
  return 0.5 + (std::atan(x) + x / (1.0 + x * x)) / M_PI;
}

}  // namespace

TEST_CASE("spherical gaussian moments") {
  const auto kernel = make_kernel(KernelParams::gaussian(), 1);
  RngStream rng(301, 0);
  const int n = 100000;
  std::vector<double> x(n), x2(n);
  for (int i = 0; i < n; ++i) {
    x[i] = sample_spherical(1, 1, kernel, rng)(0, 0);
    x2[i] = x[i] * x[i];
  }
  const auto m1 = stats::mean_and_se(x);
  const auto m2 = stats::mean_and_se(x2);
  CHECK(std::abs(m1.mean) < 3 * m1.se);
  CHECK(std::abs(m2.mean - 1.0) < 3 * m2.se);
}

TEST_CASE("spherical pearson7 is Student-t") {
  const auto kernel = make_kernel(KernelParams::pearson7(3.0), 1);
  RngStream rng(302, 0);
  std::vector<double> x(20000);
  for (auto& v : x) v = sample_spherical(1, 1, kernel, rng)(0, 0);
  CHECK(stats::ks_one_sample(x, student_t3_cdf).p_value > 0.01);
}

TEST_CASE("spherical draws are direction-uniform across entries") {
  const auto kernel = make_kernel(KernelParams::kotz(2.0, 1.0, 1.0), 6);
  RngStream rng(303, 0);
  std::vector<double> first, last;
  for (int i = 0; i < 20000; ++i) {
    const Matrix z = sample_spherical(3, 2, kernel, rng);
    first.push_back(z(0, 0));
    last.push_back(z(2, 1));
  }
  CHECK(stats::ks_two_sample(first, last).p_value > 0.01);
  CHECK_THROWS_AS((void)sample_spherical(2, 2, make_kernel(KernelParams::gaussian(), 3), rng),
                  ShapeError);
}

TEST_CASE("draws are reproducible and independent of the thread count") {
  const auto shape = ExtendedShape::from_degrees(2, std::vector<int>{3, 2, 2});
  const auto kernel = make_kernel(KernelParams::pearson7(4.0), family_kernel_dim(Family::wishart_beta1, shape));
  setenv("MMV_THREADS", "1", 1);
  const auto one = sample_family(Family::wishart_beta1, shape, kernel, 0, 3000, 99);
  const auto again = sample_family(Family::wishart_beta1, shape, kernel, 0, 3000, 99);
  setenv("MMV_THREADS", "4", 1);
  CHECK(worker_threads() == 4u);
  const auto four = sample_family(Family::wishart_beta1, shape, kernel, 0, 3000, 99);
  unsetenv("MMV_THREADS");
  CHECK(same_draws(one, again));
  CHECK(same_draws(one, four));
  const auto other = sample_family(Family::wishart_beta1, shape, kernel, 0, 3000, 100);
  CHECK_FALSE(same_draws(one, other));

  // draw i is a function of (seed, i) alone
  RngStream rng(99, 17);
  const Draw single = sample_one(Family::wishart_beta1, shape, kernel, 0, rng);
  CHECK(same_draws({single}, {one[17]}));
}

TEST_CASE("gen-wishart mean") {
  const auto shape = ExtendedShape::from_degrees(2, std::vector<int>{5});
  const auto model = FamilyModel::make(Family::gen_wishart, shape);
  const auto draws = sample_family(model, 100000, 304);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      std::vector<double> v;
      v.reserve(draws.size());
      for (const auto& d : draws) v.push_back(d[0](i, j));
      const auto ms = stats::mean_and_se(v);
      CHECK(std::abs(ms.mean - (i == j ? 5.0 : 0.0)) < 3 * ms.se);
    }
  }
}

TEST_CASE("t family with one degree each is standard Cauchy") {
  const auto shape = ExtendedShape::from_degrees(1, std::vector<int>{1, 1});
  const auto draws = sample_family(FamilyModel::make(Family::t, shape), 20000, 305);
  std::vector<double> x;
  for (const auto& d : draws) x.push_back(d.at(0)(0, 0));
  CHECK(stats::ks_one_sample(x, [](double t) { return 0.5 + std::atan(t) / M_PI; }).p_value >
        0.01);
}

TEST_CASE("beta1 draws lie strictly inside the unit interval of matrices") {
  const auto shape = ExtendedShape::from_degrees(3, std::vector<int>{4, 3, 5});
  const auto draws = sample_family(FamilyModel::make(Family::beta1, shape), 2000, 306);
  for (const auto& d : draws) {
    REQUIRE(d.size() == 2);
    for (const auto& u : d) {
      CHECK(is_spd(u));
      CHECK(is_spd(Matrix(identity(3) - u)));
    }
  }
}

TEST_CASE("every family produces draws with its layout and finite density") {
  const auto shape = ExtendedShape::from_degrees(2, std::vector<int>{3, 2, 3});
  for (Family f : all_families()) {
    CAPTURE(family_name(f));
    const int split = (f == Family::gw_inv_wishart || f == Family::beta2_inv) ? 1 : 0;
    const auto model = FamilyModel::make(f, shape, std::nullopt, split);
    const auto layout = family_layout(f, shape, split);
    const auto draws = sample_family(model, 50, 307);
    for (const auto& d : draws) {
      REQUIRE(d.size() == layout.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i].rows() == layout[i].rows);
        CHECK(d[i].cols() == layout[i].cols);
      }
      CHECK(std::isfinite(logpdf(model, d)));
    }
  }
}

TEST_CASE("non-integer parameters cannot be sampled constructively") {
  const auto shape = ExtendedShape::from_params(1, 1.3, {1.0});
  CHECK_THROWS_AS((void)sample_family(FamilyModel::make(Family::beta2, shape), 10, 1),
                  DomainError);
  // fewer than m rows in a block is already rejected as a shape
  CHECK_THROWS_AS((void)ExtendedShape::from_degrees(3, std::vector<int>{2, 3}), DomainError);
}
