#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mmv/densities.hpp"
#include "mmv/quadrature.hpp"
#include "mmv/rng.hpp"
#include "mmv/transforms.hpp"

using namespace mmv;

namespace {

constexpr double kLn2PiRef = 1.8378770664093454836;
constexpr double kLnPiRef = 1.1447298858494001741;
const double kNegInf = -std::numeric_limits<double>::infinity();

Matrix scalar(double x) {
  Matrix s(1, 1);
  s << x;
  return s;
}

Matrix normal_block(int n, int m, RngStream& rng) {
  Matrix x(n, m);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

Matrix random_spd(int m, RngStream& rng) {
  return gram(normal_block(m + 2, m, rng)) + 0.2 * identity(m);
}

Matrix random_unit(int m, RngStream& rng) {
  const Matrix q = Eigen::HouseholderQR<Matrix>(normal_block(m, m, rng)).householderQ();
  Vector ev(m);
  for (int i = 0; i < m; ++i) ev(i) = 0.05 + 0.9 * rng.uniform();
  return symmetrize(Matrix(q * ev.asDiagonal() * q.transpose()));
}

// Oracle ingredients built from std::lgamma and Eigen determinants only.
double ref_ln_mv_gamma(int m, double a) {
  double s = 0.25 * m * (m - 1) * kLnPiRef;
  for (int i = 0; i < m; ++i) s += std::lgamma(a - 0.5 * i);
  return s;
}

double ref_logdet(const Matrix& s) { return std::log(s.determinant()); }

double normal_logpdf(double x, double var) {
  return -0.5 * (kLn2PiRef + std::log(var)) - 0.5 * x * x / var;
}

// Wishart(n, Sigma^{-1} scaled as exp(-tr(P V)/2)) with precision P.
double wishart_logpdf(const Matrix& v, double n, const Matrix& precision) {
  const int m = static_cast<int>(v.rows());
  return 0.5 * (n - m - 1) * ref_logdet(v) - 0.5 * (precision * v).trace() +
         0.5 * n * ref_logdet(precision) - 0.5 * n * m * std::log(2.0) -
         ref_ln_mv_gamma(m, 0.5 * n);
}

KernelSpec gaussian_for(Family family, const ExtendedShape& shape) {
  return make_kernel(KernelParams::gaussian(), family_kernel_dim(family, shape));
}

}  // namespace

TEST_CASE("elliptical: gaussian closed forms") {
  const auto g1 = make_kernel(KernelParams::gaussian(), 1);
  CHECK(logpdf_elliptical(scalar(0), scalar(0), scalar(1), scalar(1), g1) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  const auto g2 = make_kernel(KernelParams::gaussian(), 2);
  CHECK(logpdf_elliptical(Matrix::Zero(2, 1), Matrix::Zero(2, 1), identity(2), scalar(1), g2) ==
        doctest::Approx(-kLn2PiRef).epsilon(1e-14));
}

TEST_CASE("elliptical: diagonal scales factorize into univariate normals") {
  const auto g = make_kernel(KernelParams::gaussian(), 4);
  Matrix sigma = Matrix::Zero(2, 2), theta = Matrix::Zero(2, 2);
  sigma.diagonal() << 1.0, 4.0;
  theta.diagonal() << 1.0, 9.0;
  const double at_zero = logpdf_elliptical(Matrix::Zero(2, 2), Matrix::Zero(2, 2), sigma, theta, g);
  const double expect_zero = normal_logpdf(0, 1) + normal_logpdf(0, 9) + normal_logpdf(0, 4) +
                             normal_logpdf(0, 36);
  CHECK(std::abs(at_zero - expect_zero) < 1e-10);

  RngStream rng(201, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3, m = 1 + trial % 4;
    Vector sd = Vector::Zero(n), td = Vector::Zero(m);
    for (int i = 0; i < n; ++i) sd(i) = 0.2 + 3.0 * rng.uniform();
    for (int j = 0; j < m; ++j) td(j) = 0.2 + 3.0 * rng.uniform();
    const Matrix z = normal_block(n, m, rng), mu = normal_block(n, m, rng);
    double expect = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) expect += normal_logpdf(z(i, j) - mu(i, j), sd(i) * td(j));
    const auto kernel = make_kernel(KernelParams::gaussian(), n * m);
    const double got =
        logpdf_elliptical(z, mu, Matrix(sd.asDiagonal()), Matrix(td.asDiagonal()), kernel);
    CHECK(std::abs(got - expect) < 1e-10);
  }
}

TEST_CASE("elliptical: pearson7 is the multivariate t") {
  RngStream rng(202, 0);
  for (double nu : {1.0, 3.0, 7.5}) {
    const auto kernel = make_kernel(KernelParams::pearson7(nu), 2);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix z = normal_block(1, 2, rng);
      const double q = z.squaredNorm();
      const double expect = std::lgamma(0.5 * (nu + 2)) - std::lgamma(0.5 * nu) -
                            std::log(nu * M_PI) - 0.5 * (nu + 2) * std::log1p(q / nu);
      CHECK(std::abs(logpdf_elliptical(z, Matrix::Zero(1, 2), scalar(1), identity(2), kernel) -
                     expect) < 1e-12);
    }
  }
}

TEST_CASE("gen-wishart: chi-square and Wishart products") {
  const auto one = ExtendedShape::from_params(1, 0.5, {});
  const std::vector<Matrix> v1{scalar(1.0)};
  CHECK(logpdf_gen_wishart(v1, one, nullptr, gaussian_for(Family::gen_wishart, one)) ==
        doctest::Approx(-1.4189385332046727).epsilon(1e-13));

  const auto two = ExtendedShape::from_params(1, 0.5, {0.5});
  RngStream rng(203, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const double x = 0.1 + 3 * rng.uniform(), y = 0.1 + 3 * rng.uniform();
    const double chi = -0.5 * (kLn2PiRef + std::log(x)) - 0.5 * x - 0.5 * (kLn2PiRef + std::log(y)) -
                       0.5 * y;
    const std::vector<Matrix> v{scalar(x), scalar(y)};
    CHECK(std::abs(logpdf_gen_wishart(v, two, nullptr, gaussian_for(Family::gen_wishart, two)) -
                   chi) < 1e-12);
  }

  // integer degrees under the gaussian kernel: independent Wisharts
  const std::vector<int> degrees{4, 3, 5};
  const auto shape = ExtendedShape::from_degrees(3, degrees);
  const auto kernel = gaussian_for(Family::gen_wishart, shape);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Matrix> v{random_spd(3, rng), random_spd(3, rng), random_spd(3, rng)};
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) expect += wishart_logpdf(v[i], degrees[i], identity(3));
    CHECK(std::abs(logpdf_gen_wishart(v, shape, nullptr, kernel) - expect) < 1e-10);

    ScaleSet scales{{random_spd(3, rng), random_spd(3, rng), random_spd(3, rng)}};
    double scaled = 0.0;
    for (int i = 0; i < 3; ++i)
      scaled += wishart_logpdf(v[i], degrees[i], Matrix(scales.sigma[i].inverse()));
    CHECK(std::abs(logpdf_gen_wishart(v, shape, &scales, kernel) - scaled) < 1e-10);
  }
}

TEST_CASE("gen-wishart: a scaled m=1 density still has unit mass") {
  const auto shape = ExtendedShape::from_params(1, 1.5, {});
  const auto kernel = gaussian_for(Family::gen_wishart, shape);
  ScaleSet scales{{scalar(4.0)}};
  const auto mass = quad::integrate_to_infinity(
      [&](double x) {
        if (x <= 0.0) return 0.0;
        const std::vector<Matrix> v{scalar(x)};
        return std::exp(logpdf_gen_wishart(v, shape, &scales, kernel));
      },
      0.0, 4.0);
  CHECK(std::abs(mass.value - 1.0) < 1e-6);
}

TEST_CASE("wishart-t: scalar value and gaussian factorization") {
  const auto shape = ExtendedShape::from_degrees(1, std::vector<int>{1, 1});
  const std::vector<Matrix> t0{scalar(0.0)};
  CHECK(logpdf_wishart_companion(CompanionFamily::t, scalar(1.0), t0, shape,
                                 gaussian_for(Family::wishart_t, shape)) ==
        doctest::Approx(-kLn2PiRef - 0.5).epsilon(1e-13));

  // (V0, T) from normal X0, X1: V0 ~ Wishart(n0), rows of T ~ N(0, V0^{-1})
  RngStream rng(204, 0);
  const std::vector<int> degrees{3, 2, 4};
  const auto big = ExtendedShape::from_degrees(2, degrees);
  const auto kernel = gaussian_for(Family::wishart_t, big);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix v0 = random_spd(2, rng);
    const std::vector<Matrix> t{normal_block(2, 2, rng), normal_block(4, 2, rng)};
    double expect = wishart_logpdf(v0, 3, identity(2));
    for (const auto& ti : t) {
      expect += -0.5 * ti.size() * kLn2PiRef + 0.5 * ti.rows() * ref_logdet(v0) -
                0.5 * (ti * v0 * ti.transpose()).trace();
    }
    CHECK(std::abs(logpdf_wishart_companion(CompanionFamily::t, v0, t, big, kernel) - expect) <
          1e-10);
  }
}

TEST_CASE("wishart-beta2: gaussian factorization") {
  // F | V0 ~ Wishart(n1) with precision V0
  RngStream rng(205, 0);
  const std::vector<int> degrees{3, 2, 3};
  const auto shape = ExtendedShape::from_degrees(2, degrees);
  const auto kernel = gaussian_for(Family::wishart_beta2, shape);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix v0 = random_spd(2, rng);
    const std::vector<Matrix> f{random_spd(2, rng), random_spd(2, rng)};
    const double expect = wishart_logpdf(v0, 3, identity(2)) + wishart_logpdf(f[0], 2, v0) +
                          wishart_logpdf(f[1], 3, v0);
    CHECK(std::abs(logpdf_wishart_companion(CompanionFamily::beta2, v0, f, shape, kernel) -
                   expect) < 1e-10);
  }

  // m = 1: the joint of (v, t) integrated over the sign of t
  const auto s1 = ExtendedShape::from_degrees(1, std::vector<int>{2, 1});
  for (double f : {0.3, 1.0, 2.5}) {
    const std::vector<Matrix> tf{scalar(std::sqrt(f))}, ff{scalar(f)};
    const double tj = logpdf_wishart_companion(CompanionFamily::t, scalar(1.7), tf, s1,
                                               gaussian_for(Family::wishart_t, s1));
    const double bj = logpdf_wishart_companion(CompanionFamily::beta2, scalar(1.7), ff, s1,
                                               gaussian_for(Family::wishart_beta2, s1));
    CHECK(std::abs(bj - (tj - 0.5 * std::log(f))) < 1e-12);
  }
}

TEST_CASE("wishart-pearson2 and wishart-beta1 are pushforwards") {
  RngStream rng(206, 0);
  const std::vector<int> degrees{3, 2, 4};
  const auto shape = ExtendedShape::from_degrees(2, degrees);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix v0 = random_spd(2, rng);
    const std::vector<Matrix> t{normal_block(2, 2, rng), normal_block(4, 2, rng)};
    std::vector<Matrix> r, f, u;
    double jac_r = 0.0, jac_u = 0.0;
    for (const auto& ti : t) {
      const auto fwd = t_to_r(ti);
      r.push_back(fwd.block);
      jac_r += r_to_t(fwd.block).log_jac;
      f.push_back(gram(ti));
      u.push_back(beta2_to_beta1(f.back()));
      jac_u += beta1_to_beta2_log_jac(u.back());
    }
    const double pt = logpdf_wishart_companion(CompanionFamily::t, v0, t, shape,
                                               gaussian_for(Family::wishart_t, shape));
    const double pr = logpdf_wishart_companion(CompanionFamily::pearson2, v0, r, shape,
                                               gaussian_for(Family::wishart_pearson2, shape));
    CHECK(std::abs(pr - (pt + jac_r)) < 1e-9);
    const double pf = logpdf_wishart_companion(CompanionFamily::beta2, v0, f, shape,
                                               gaussian_for(Family::wishart_beta2, shape));
    const double pu = logpdf_wishart_companion(CompanionFamily::beta1, v0, u, shape,
                                               gaussian_for(Family::wishart_beta1, shape));
    CHECK(std::abs(pu - (pf + jac_u)) < 1e-9);
  }
}

TEST_CASE("marginals: scalar closed forms") {
  const auto cauchy = ExtendedShape::from_degrees(1, std::vector<int>{1, 1});
  const std::vector<Matrix> zero{scalar(0.0)};
  CHECK(logpdf_marginal(CompanionFamily::t, zero, cauchy) ==
        doctest::Approx(-kLnPiRef).epsilon(1e-14));
  CHECK(logpdf_marginal(CompanionFamily::pearson2, zero, cauchy) ==
        doctest::Approx(-kLnPiRef).epsilon(1e-14));
  const auto ones = ExtendedShape::from_params(1, 1.0, {1.0});
  const std::vector<Matrix> f1{scalar(1.0)};
  CHECK(logpdf_marginal(CompanionFamily::beta2, f1, ones) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-14));
  for (double u : {0.01, 0.3, 0.77}) {
    const std::vector<Matrix> uu{scalar(u)};
    CHECK(std::abs(logpdf_marginal(CompanionFamily::beta1, uu, ones)) < 1e-14);
  }

  RngStream rng(207, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a0 = 0.3 + 4 * rng.uniform(), a1 = 0.3 + 4 * rng.uniform();
    const auto shape = ExtendedShape::from_params(1, a0, {a1});
    const double lnb = std::lgamma(a0) + std::lgamma(a1) - std::lgamma(a0 + a1);
    const double f = 0.05 + 4 * rng.uniform();
    const double u = 0.02 + 0.96 * rng.uniform();
    // beta prime(a1, a0), beta(a1, a0)
    const std::vector<Matrix> ff{scalar(f)}, uu{scalar(u)};
    CHECK(std::abs(logpdf_marginal(CompanionFamily::beta2, ff, shape) -
                   ((a1 - 1) * std::log(f) - (a0 + a1) * std::log1p(f) - lnb)) < 1e-12);
    CHECK(std::abs(logpdf_marginal(CompanionFamily::beta1, uu, shape) -
                   ((a1 - 1) * std::log(u) + (a0 - 1) * std::log1p(-u) - lnb)) < 1e-12);
  }

  // T = Z / sqrt(chi2_nu) for one row: a scaled Student-t
  for (int nu : {1, 2, 5, 9}) {
    const auto shape = ExtendedShape::from_degrees(1, std::vector<int>{nu, 1});
    for (double t : {-2.0, 0.0, 0.4, 3.0}) {
      const double s = std::sqrt(static_cast<double>(nu)) * t;
      const double student = std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) -
                             0.5 * std::log(nu * M_PI) - 0.5 * (nu + 1) * std::log1p(s * s / nu);
      const std::vector<Matrix> tt{scalar(t)};
      CHECK(std::abs(logpdf_marginal(CompanionFamily::t, tt, shape) -
                     (student + 0.5 * std::log(static_cast<double>(nu)))) < 1e-12);
    }
  }

  // the image of a standard Cauchy under t / sqrt(1 + t^2) is the arcsine law
  for (double r : {-0.9, 0.0, 0.5}) {
    const std::vector<Matrix> rr{scalar(r)};
    CHECK(std::abs(logpdf_marginal(CompanionFamily::pearson2, rr, cauchy) -
                   (-kLnPiRef - 0.5 * std::log1p(-r * r))) < 1e-12);
  }
}

TEST_CASE("marginals: two scalar companions") {
  const auto ones = ExtendedShape::from_params(1, 1.0, {1.0, 1.0});
  const std::vector<Matrix> f{scalar(1.0), scalar(1.0)};
  CHECK(logpdf_marginal(CompanionFamily::beta2, f, ones) ==
        doctest::Approx(-2.6026896854443837648).epsilon(1e-13));

  // inverted Dirichlet
  RngStream rng(208, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a0 = 0.3 + 3 * rng.uniform(), a1 = 0.3 + 3 * rng.uniform(),
                 a2 = 0.3 + 3 * rng.uniform();
    const auto shape = ExtendedShape::from_params(1, a0, {a1, a2});
    const double f1 = 0.1 + 3 * rng.uniform(), f2 = 0.1 + 3 * rng.uniform();
    const double expect = std::lgamma(a0 + a1 + a2) - std::lgamma(a0) - std::lgamma(a1) -
                          std::lgamma(a2) + (a1 - 1) * std::log(f1) + (a2 - 1) * std::log(f2) -
                          (a0 + a1 + a2) * std::log1p(f1 + f2);
    const std::vector<Matrix> ff{scalar(f1), scalar(f2)};
    CHECK(std::abs(logpdf_marginal(CompanionFamily::beta2, ff, shape) - expect) < 1e-12);
  }
}

TEST_CASE("marginals: beta1 with two companions in the bimatrix form") {
  RngStream rng(209, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3;
    const double h = 0.5 * (m + 1);
    const double a0 = h + 2 * rng.uniform(), a1 = h + 2 * rng.uniform(),
                 a2 = h + 2 * rng.uniform();
    const auto shape = ExtendedShape::from_params(m, a0, {a1, a2});
    const Matrix u1 = random_unit(m, rng), u2 = random_unit(m, rng);
    const Matrix id = identity(m);
    const double expect = ref_ln_mv_gamma(m, a0 + a1 + a2) - ref_ln_mv_gamma(m, a0) -
                          ref_ln_mv_gamma(m, a1) - ref_ln_mv_gamma(m, a2) +
                          (a1 - h) * ref_logdet(u1) + (a2 - h) * ref_logdet(u2) +
                          (a0 + a2 - h) * ref_logdet(id - u1) +
                          (a0 + a1 - h) * ref_logdet(id - u2) -
                          (a0 + a1 + a2) * std::log(std::abs((id - u1 * u2).determinant()));
    const std::vector<Matrix> u{u1, u2};
    CHECK(std::abs(logpdf_marginal(CompanionFamily::beta1, u, shape) - expect) < 1e-10);
  }
}

TEST_CASE("joints integrate to their marginals") {
  const auto shape = ExtendedShape::from_degrees(1, std::vector<int>{2, 1});
  auto over_anchor = [&](CompanionFamily fam, Family joint, double c) {
    const auto kernel = gaussian_for(joint, shape);
    const std::vector<Matrix> comp{scalar(c)};
    return quad::integrate_to_infinity(
               [&](double v) {
                 if (v <= 0.0) return 0.0;
                 return std::exp(logpdf_wishart_companion(fam, scalar(v), comp, shape, kernel));
               },
               0.0, 2.0)
        .value;
  };
  for (double t : {-1.5, 0.0, 0.7}) {
    const std::vector<Matrix> comp{scalar(t)};
    CHECK(std::abs(over_anchor(CompanionFamily::t, Family::wishart_t, t) -
                   std::exp(logpdf_marginal(CompanionFamily::t, comp, shape))) < 1e-4);
  }
  for (double u : {0.1, 0.5, 0.9}) {
    const std::vector<Matrix> comp{scalar(u)};
    CHECK(std::abs(over_anchor(CompanionFamily::beta1, Family::wishart_beta1, u) -
                   std::exp(logpdf_marginal(CompanionFamily::beta1, comp, shape))) < 1e-4);
  }
}

TEST_CASE("trimatric: scalar pushforward of three normals") {
  // (x0, x1, x2) -> (W, T, R) = (x0^2 + x2^2, x1 / |x0|, x2 / sqrt(W)); two preimages (sign of x0)
  const auto shape = ExtendedShape::from_degrees(1, std::vector<int>{1, 1, 1});
  const auto model = FamilyModel::make(Family::tri_wtp2, shape, KernelParams::gaussian());
  auto preimage = [](double w, double t, double r) {
    const double x0 = std::sqrt(w * (1 - r * r));
    return std::array<double, 3>{x0, t * x0, r * std::sqrt(w)};
  };
  RngStream rng(210, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double w = 0.2 + 4 * rng.uniform(), t = 2 * rng.normal(),
                 r = 0.95 * (2 * rng.uniform() - 1);
    Eigen::Matrix3d jac;
    const double h = 1e-6;
    const double point[3] = {w, t, r};
    for (int j = 0; j < 3; ++j) {
      double p[3] = {point[0], point[1], point[2]}, q[3] = {point[0], point[1], point[2]};
      p[j] += h;
      q[j] -= h;
      const auto fp = preimage(p[0], p[1], p[2]), fq = preimage(q[0], q[1], q[2]);
      for (int i = 0; i < 3; ++i) jac(i, j) = (fp[i] - fq[i]) / (2 * h);
    }
    const auto x = preimage(w, t, r);
    const double expect = std::log(2.0) + normal_logpdf(x[0], 1) + normal_logpdf(x[1], 1) +
                          normal_logpdf(x[2], 1) + std::log(std::abs(jac.determinant()));
    const std::vector<Matrix> draw{scalar(w), scalar(t), scalar(r)};
    CHECK(std::abs(logpdf(model, draw) - expect) < 1e-7);

    // (W, F, U) = (W, T^2, R^2): four sign preimages against a factor 4 in the Jacobian
    const auto wb = FamilyModel::make(Family::tri_wb2b1, shape, KernelParams::gaussian());
    const std::vector<Matrix> squared{scalar(w), scalar(t * t), scalar(r * r)};
    CHECK(std::abs(logpdf(wb, squared) -
                   (logpdf(model, draw) - 0.5 * std::log(t * t) - 0.5 * std::log(r * r))) < 1e-10);
  }
}

TEST_CASE("trimatric: zero second block leaves a Wishart-T joint") {
  // R = 0: W = W0 ~ Wishart(n0 + n2) restricted to the R = 0 slice
  RngStream rng(211, 0);
  const std::vector<int> degrees{3, 2, 2};
  const auto shape = ExtendedShape::from_degrees(2, degrees);
  const auto reduced = ExtendedShape::from_degrees(2, std::vector<int>{5, 2});
  const auto tri = FamilyModel::make(Family::tri_wtp2, shape, KernelParams::gaussian());
  const auto wt = FamilyModel::make(Family::wishart_t, reduced, KernelParams::gaussian());
  double offset = std::numeric_limits<double>::quiet_NaN();
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix w = random_spd(2, rng), t = normal_block(2, 2, rng);
    const std::vector<Matrix> a{w, t, Matrix::Zero(2, 2)}, b{w, t};
    const double diff = logpdf(tri, a) - logpdf(wt, b);
    if (std::isnan(offset)) offset = diff;
    CHECK(std::abs(diff - offset) < 1e-10);
  }
  // the offset is the normal-to-Pearson-II constant of the vanished block
  const double expect = ref_ln_mv_gamma(2, 2.5) - ref_ln_mv_gamma(2, 1.5) - 2.0 * kLnPiRef;
  CHECK(std::abs(offset - expect) < 1e-10);
}

TEST_CASE("inverted families") {
  // empty tail
  RngStream rng(212, 0);
  const auto shape = ExtendedShape::from_params(2, 2.2, {1.8, 3.0});
  const std::vector<Matrix> v{random_spd(2, rng), random_spd(2, rng), random_spd(2, rng)};
  const auto kernel = gaussian_for(Family::gen_wishart, shape);
  CHECK(logpdf_inverted(InvertedKind::gw_inv_wishart, v, {}, shape, nullptr, &kernel) ==
        doctest::Approx(logpdf_gen_wishart(v, shape, nullptr, kernel)).epsilon(1e-14));
  const std::vector<Matrix> f{random_spd(2, rng), random_spd(2, rng)};
  CHECK(logpdf_inverted(InvertedKind::beta2_inv, f, {}, shape, nullptr, nullptr) ==
        doctest::Approx(logpdf_marginal(CompanionFamily::beta2, f, shape)).epsilon(1e-14));

  // inverse chi-square(1) at 1
  const auto half = ExtendedShape::from_params(1, 0.5, {});
  const auto k1 = gaussian_for(Family::gw_inv_wishart, half);
  const std::vector<Matrix> w1{scalar(1.0)};
  CHECK(logpdf_inverted(InvertedKind::gw_inv_wishart, {}, w1, half, nullptr, &k1) ==
        doctest::Approx(-0.5 * kLn2PiRef - 0.5).epsilon(1e-13));

  // inverse Wishart at m = 2: p_V(W^{-1}) |W|^{-(m+1)}
  const auto wish = ExtendedShape::from_degrees(2, std::vector<int>{5});
  const auto kw = gaussian_for(Family::gw_inv_wishart, wish);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix w = random_spd(2, rng);
    const std::vector<Matrix> ws{w};
    const double expect = wishart_logpdf(Matrix(w.inverse()), 5, identity(2)) - 3 * ref_logdet(w);
    CHECK(std::abs(logpdf_inverted(InvertedKind::gw_inv_wishart, {}, ws, wish, nullptr, &kw) -
                   expect) < 1e-10);
  }

  // beta2-inv: 1/F with F ~ beta prime(a1, a0) is beta prime(a0, a1)
  const auto ones = ExtendedShape::from_params(1, 1.0, {1.0});
  const std::vector<Matrix> e1{scalar(1.0)};
  CHECK(logpdf_inverted(InvertedKind::beta2_inv, {}, e1, ones, nullptr, nullptr) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-14));
  const auto ab = ExtendedShape::from_params(1, 2.5, {1.3});
  const double lnb = std::lgamma(2.5) + std::lgamma(1.3) - std::lgamma(3.8);
  for (double e : {0.2, 1.0, 4.0}) {
    const std::vector<Matrix> ee{scalar(e)};
    CHECK(std::abs(logpdf_inverted(InvertedKind::beta2_inv, {}, ee, ab, nullptr, nullptr) -
                   (1.5 * std::log(e) - 3.8 * std::log1p(e) - lnb)) < 1e-12);
  }
}

TEST_CASE("combination determinant") {
  const Matrix z = Matrix::Zero(3, 3);
  const std::vector<Matrix> zeros{z, z};
  CHECK(std::abs(*combination_logdet(zeros)) < 1e-15);
  const std::vector<Matrix> scal{scalar(0.5), scalar(0.25)};
  CHECK(*combination_logdet(scal) == doctest::Approx(std::log(0.875)).epsilon(1e-14));
  CHECK(std::log(combination_matrix(scal).determinant()) ==
        doctest::Approx(std::log(0.875)).epsilon(1e-14));
  const std::vector<Matrix> bad{scalar(1.5), scalar(0.25)};
  CHECK_FALSE(combination_logdet(bad).has_value());
}

TEST_CASE("support, shape and parameter errors") {
  const auto shape = ExtendedShape::from_params(1, 1.0, {1.0});
  const std::vector<Matrix> neg{scalar(-1.0)}, out{scalar(1.5)};
  CHECK(logpdf_marginal(CompanionFamily::beta2, neg, shape) == kNegInf);
  CHECK(logpdf_marginal(CompanionFamily::beta1, out, shape) == kNegInf);
  CHECK(logpdf_marginal(CompanionFamily::pearson2, out,
                        ExtendedShape::from_degrees(1, std::vector<int>{1, 1})) == kNegInf);
  const std::vector<Matrix> two{scalar(1.0), scalar(1.0)};
  CHECK_THROWS_AS((void)logpdf_marginal(CompanionFamily::beta2, two, shape), ShapeError);
  const std::vector<Matrix> wrong{identity(2)};
  CHECK_THROWS_AS((void)logpdf_marginal(CompanionFamily::beta2, wrong, shape), ShapeError);
  CHECK_THROWS_AS(ExtendedShape::from_params(3, 0.9, {2.0}).validate(), DomainError);
  CHECK_THROWS_AS(ExtendedShape::from_params(2, 2.0, {0.4}).validate(), DomainError);
  CHECK_THROWS_AS((void)family_layout(Family::tri_wtp2, shape), ShapeError);
  CHECK_THROWS_AS((void)family_layout(Family::beta2, ExtendedShape::from_params(1, 1.0, {})),
                  ShapeError);
  CHECK_THROWS_AS((void)family_layout(Family::beta2_inv, shape, 2), ShapeError);

  const auto model = FamilyModel::make(Family::wishart_t,
                                       ExtendedShape::from_degrees(1, std::vector<int>{1, 1}));
  const std::vector<Matrix> bad_anchor{scalar(-2.0), scalar(0.3)};
  CHECK(logpdf(model, bad_anchor) == kNegInf);
}

TEST_CASE("shape helpers and registry names") {
  const auto shape = ExtendedShape::from_degrees(2, std::vector<int>{3, 4, 5});
  CHECK(shape.a0 == 1.5);
  CHECK(shape.a_star() == 6.0);
  CHECK(shape.integer_view() == std::vector<int>{3, 4, 5});
  CHECK_FALSE(ExtendedShape::from_params(1, 1.3, {1.0}).integer_view().has_value());
  CHECK(family_kernel_dim(Family::wishart_t, shape) == 24.0);
  for (Family f : all_families()) {
    CHECK(family_from_name(family_name(f)) == f);
  }
  CHECK_FALSE(family_from_name("normal").has_value());
  CHECK(family_needs_kernel(Family::wishart_beta1));
  CHECK_FALSE(family_needs_kernel(Family::beta1));
}
