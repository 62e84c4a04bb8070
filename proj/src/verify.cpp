#include "mmv/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmv/quadrature.hpp"
#include "mmv/samplers.hpp"
#include "mmv/stats.hpp"
#include "mmv/transforms.hpp"

namespace mmv {

namespace {

// ---------------------------------------------------------------------------
// Scalar coordinates of an m = 1 observation, each mapped onto a bounded
// interval so quadrature and binning work on a box.

enum class Axis { positive, real, unit, ball };

struct Coordinates {
  std::vector<Component> components;
  std::vector<Axis> axes;
};

Coordinates scalar_coordinates(const FamilyModel& model) {
  if (model.shape.m != 1) throw ShapeError("scalar coordinates need m = 1");
  Coordinates c;
  c.components = family_layout(model.family, model.shape, model.split);
  for (const auto& comp : c.components) {
    switch (comp.kind) {
      case ComponentKind::spd:
        c.axes.push_back(Axis::positive);
        break;
      case ComponentKind::spd_unit:
        c.axes.push_back(Axis::unit);
        break;
      case ComponentKind::block:
        c.axes.insert(c.axes.end(), comp.rows, Axis::real);
        break;
      case ComponentKind::block_ball:
        c.axes.insert(c.axes.end(), comp.rows, Axis::ball);
        break;
    }
  }
  return c;
}

double axis_lo(Axis a) { return (a == Axis::real || a == Axis::ball) ? -1.0 : 0.0; }
double axis_hi(Axis) { return 1.0; }

double to_x(Axis a, double t) {
  switch (a) {
    case Axis::positive:
      return t / (1.0 - t);
    case Axis::real:
      return t / (1.0 - t * t);
    default:
      return t;
  }
}

double dx_dt(Axis a, double t) {
  switch (a) {
    case Axis::positive:
      return 1.0 / ((1.0 - t) * (1.0 - t));
    case Axis::real: {
      const double q = 1.0 - t * t;
      return (1.0 + t * t) / (q * q);
    }
    default:
      return 1.0;
  }
}

double to_t(Axis a, double x) {
  switch (a) {
    case Axis::positive:
      return x / (1.0 + x);
    case Axis::real:
      // root of x t^2 + t - x = 0 inside (-1, 1)
      return 2.0 * x / (1.0 + std::sqrt(1.0 + 4.0 * x * x));
    default:
      return x;
  }
}

Draw draw_from_x(const Coordinates& c, std::span<const double> x) {
  Draw d;
  std::size_t pos = 0;
  for (const auto& comp : c.components) {
    Matrix mtx(comp.rows, comp.cols);
    for (int i = 0; i < comp.rows; ++i) mtx(i, 0) = x[pos++];
    d.push_back(std::move(mtx));
  }
  return d;
}

std::vector<double> x_from_draw(const Draw& d) {
  std::vector<double> x;
  for (const auto& mtx : d) {
    for (Eigen::Index i = 0; i < mtx.rows(); ++i) x.push_back(mtx(i, 0));
  }
  return x;
}

// Density in the mapped coordinates: p(x(t)) * prod dx/dt.
quad::BoxIntegrand mapped_density(const FamilyModel& model, const Coordinates& c) {
  return [&model, &c](std::span<const double> t) {
    std::vector<double> x(t.size());
    double jac = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      x[i] = to_x(c.axes[i], t[i]);
      jac *= dx_dt(c.axes[i], t[i]);
    }
    if (!std::isfinite(jac)) return 0.0;
    const double lp = logpdf(model, draw_from_x(c, x));
    if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(lp) * jac;
  };
}

std::string model_label(const FamilyModel& model) {
  std::ostringstream os;
  os.precision(6);
  os << family_name(model.family) << " m=" << model.shape.m << " a=(" << model.shape.a0;
  for (double a : model.shape.a) os << "," << a;
  os << ")";
  if (model.kernel) os << " kernel=" << to_string(model.kernel->params);
  if (model.family == Family::gw_inv_wishart || model.family == Family::beta2_inv) {
    os << " split=" << model.split;
  }
  return os.str();
}

CheckReport failed(std::string name, const std::string& why) {
  CheckReport r;
  r.name = std::move(name);
  r.statistic = std::numeric_limits<double>::quiet_NaN();
  r.passed = false;
  r.detail = why;
  return r;
}

Matrix random_normal(int rows, int cols, RngStream& rng) {
  Matrix x(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) x(i, j) = rng.normal();
  }
  return x;
}

SpdMatrix random_spd(int m, RngStream& rng) {
  return symmetrize(gram(random_normal(m + 2, m, rng)) / (m + 2.0) + 0.2 * identity(m));
}

// ---------------------------------------------------------------------------
// Vectorization for finite differences

std::vector<double> vec_block(const Matrix& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

Matrix unvec_block(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

std::vector<double> vec_sym(const Matrix& s) {
  std::vector<double> v;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) v.push_back(s(i, j));
  }
  return v;
}

Matrix unvec_sym(const std::vector<double>& v, Eigen::Index m) {
  Matrix s(m, m);
  std::size_t pos = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      s(i, j) = v[pos];
      s(j, i) = v[pos];
      ++pos;
    }
  }
  return s;
}

using VecMap = std::function<std::vector<double>(const std::vector<double>&)>;

// ln|det J| of a map R^d -> R^d by central differences.
double fd_log_abs_det(const VecMap& f, const std::vector<double>& x, double eps) {
  const std::size_t d = x.size();
  Matrix jac(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> plus = x, minus = x;
    plus[j] += eps;
    minus[j] -= eps;
    const auto fp = f(plus);
    const auto fm = f(minus);
    for (std::size_t i = 0; i < d; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * eps);
  }
  return logabsdet(jac);
}

}  // namespace

// ---------------------------------------------------------------------------

CheckReport check_normalization(const FamilyModel& model, const NormOptions& options) {
  CheckReport r;
  r.name = "normalization";
  r.target = 1.0;
  try {
    if (options.method == NormMethod::quadrature && model.shape.m == 2) {
      const auto layout = family_layout(model.family, model.shape, model.split);
      if (layout.size() != 1 || (layout[0].kind != ComponentKind::spd &&
                                 layout[0].kind != ComponentKind::spd_unit)) {
        return failed(r.name, "quadrature at m = 2 needs a single-matrix family");
      }
      const Axis diag_axis = layout[0].kind == ComponentKind::spd ? Axis::positive : Axis::unit;
      // S = [[s11, rho sqrt(s11 s22)], [., s22]], dS = sqrt(s11 s22) ds11 drho ds22
      auto integrand = [&](std::span<const double> t) {
        const double s11 = to_x(diag_axis, t[0]);
        const double s22 = to_x(diag_axis, t[2]);
        const double root = std::sqrt(s11 * s22);
        const double jac = dx_dt(diag_axis, t[0]) * dx_dt(diag_axis, t[2]) * root;
        if (!std::isfinite(jac) || jac == 0.0) return 0.0;
        Matrix s(2, 2);
        s << s11, t[1] * root, t[1] * root, s22;
        const std::array<Matrix, 1> draw = {s};
        const double lp = logpdf(model, draw);
        if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
        return std::exp(lp) * jac;
      };
      const std::array<double, 3> lo = {0.0, -1.0, 0.0};
      const std::array<double, 3> hi = {1.0, 1.0, 1.0};
      quad::Options opts;
      opts.abs_tol = 1e-5;
      opts.rel_tol = 1e-7;
      opts.max_intervals = 400;
      const auto res = quad::integrate_box(integrand, lo, hi, opts);
      r.statistic = res.value;
      r.tolerance = 1e-3;
      r.passed = std::abs(res.value - 1.0) <= r.tolerance && std::isfinite(res.value);
      std::ostringstream os;
      os << model_label(model)
         << "; adaptive Gauss-Kronrod over (s11, correlation, s22) of one 2 x 2 matrix, error "
            "estimate "
         << res.error << ", " << (res.converged ? "converged" : "not converged");
      r.detail = os.str();
      return r;
    }
    if (options.method == NormMethod::quadrature) {
      const Coordinates c = scalar_coordinates(model);
      if (c.axes.size() > 3) return failed(r.name, "quadrature supports at most 3 coordinates");
      std::vector<double> lo, hi;
      for (Axis a : c.axes) {
        lo.push_back(axis_lo(a));
        hi.push_back(axis_hi(a));
      }
      quad::Options opts;
      opts.abs_tol = c.axes.size() == 1 ? 1e-9 : 1e-6;
      opts.rel_tol = 1e-9;
      opts.max_intervals = 4000;
      const auto res = quad::integrate_box(mapped_density(model, c), lo, hi, opts);
      r.statistic = res.value;
      r.tolerance = 1e-3;
      r.passed = std::abs(res.value - 1.0) <= r.tolerance && std::isfinite(res.value);
      std::ostringstream os;
      os << model_label(model) << "; adaptive Gauss-Kronrod over " << c.axes.size()
         << " mapped coordinate(s), error estimate " << res.error << ", "
         << (res.converged ? "converged" : "not converged");
      r.detail = os.str();
      return r;
    }
    if (!model.kernel) {
      return failed(r.name, "importance sampling needs a kernel-dependent family");
    }
    const FamilyModel proposal =
        FamilyModel::make(model.family, model.shape, KernelParams::kotz(1.0, 0.25, 1.0), model.split);
    const auto draws = sample_family(proposal, options.n_samples, options.seed);
    std::vector<double> w;
    w.reserve(draws.size());
    for (const auto& d : draws) w.push_back(std::exp(logpdf(model, d) - logpdf(proposal, d)));
    const auto ms = stats::mean_and_se(w);
    r.statistic = ms.mean;
    r.tolerance = 3.0 * ms.se;
    r.passed = std::isfinite(ms.mean) && std::abs(ms.mean - 1.0) <= r.tolerance && ms.se < 0.05;
    std::ostringstream os;
    os << model_label(model) << "; importance sampling with " << options.n_samples
       << " draws from the same family under kotz:T=1,r=0.25,s=1, standard error " << ms.se
       << " (tolerance is 3 standard errors; standard error must stay below 0.05)";
    r.detail = os.str();
    return r;
  } catch (const std::exception& e) {
    return failed(r.name, model_label(model) + ": " + e.what());
  }
}

std::vector<std::string> jacobian_transforms() {
  return {"t_to_r", "r_to_t", "beta1_to_beta2", "invert_spd"};
}

CheckReport check_jacobian_fd(const std::string& transform, int n, int m, int trials, double eps,
                              std::uint64_t seed) {
  CheckReport r;
  {
    std::ostringstream os;
    os << "jacobian " << transform << " n=" << n << " m=" << m;
    r.name = os.str();
  }
  r.target = 0.0;
  r.tolerance = 1e-5;
  if (n < 1 || m < 1 || trials < 1) return failed(r.name, "n, m and trials must be positive");
  const auto names = jacobian_transforms();
  if (std::find(names.begin(), names.end(), transform) == names.end()) {
    return failed(r.name, "unknown transform '" + transform + "'");
  }
  double worst = 0.0;
  int resampled = 0;
  int done = 0;
  for (std::uint64_t attempt = 0; done < trials && attempt < static_cast<std::uint64_t>(trials) * 10;
       ++attempt) {
    RngStream rng(seed, attempt);
    try {
      std::vector<double> x;
      VecMap f;
      double log_jac = 0.0;
      if (transform == "t_to_r") {
        const Matrix t = random_normal(n, m, rng);
        x = vec_block(t);
        log_jac = t_to_r(t).log_jac;
        f = [n, m](const std::vector<double>& v) { return vec_block(t_to_r(unvec_block(v, n, m)).block); };
      } else if (transform == "r_to_t") {
        const Matrix rr = t_to_r(random_normal(n, m, rng)).block;
        x = vec_block(rr);
        log_jac = r_to_t(rr).log_jac;
        f = [n, m](const std::vector<double>& v) { return vec_block(r_to_t(unvec_block(v, n, m)).block); };
      } else if (transform == "beta1_to_beta2") {
        const Matrix u = beta2_to_beta1(random_spd(m, rng));
        x = vec_sym(u);
        log_jac = beta1_to_beta2_log_jac(u);
        f = [m](const std::vector<double>& v) { return vec_sym(beta1_to_beta2(unvec_sym(v, m))); };
      } else {
        // log_jac = ln|dV/dW|: differentiate V = W^{-1} at W.
        const auto inv = invert_spd(random_spd(m, rng));
        x = vec_sym(inv.matrix);
        log_jac = inv.log_jac;
        f = [m](const std::vector<double>& v) { return vec_sym(invert_spd(unvec_sym(v, m)).matrix); };
      }
      const double fd = fd_log_abs_det(f, x, eps);
      worst = std::max(worst, std::abs(std::expm1(fd - log_jac)));
      ++done;
    } catch (const DomainError&) {
      ++resampled;
    }
  }
  r.statistic = worst;
  r.passed = done == trials && worst <= r.tolerance;
  std::ostringstream os;
  os << "max relative error of exp(log_jac) against the central-difference determinant (eps "
     << eps << ") over " << done << " trials; " << resampled << " points resampled";
  r.detail = os.str();
  return r;
}

CheckReport check_bimatrix_identity(int trials, std::uint64_t seed) {
  CheckReport r;
  r.name = "bimatrix identity m=3";
  r.target = 0.0;
  r.tolerance = 1e-10;
  constexpr int m = 3;
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const std::vector<SpdMatrix> u = {beta2_to_beta1(random_spd(m, rng)),
                                      beta2_to_beta1(random_spd(m, rng))};
    const double direct = logabsdet(Matrix(identity(m) - u[0] * u[1]));
    const auto order_free = combination_logdet(u);
    if (!order_free) return failed(r.name, "combination determinant undefined at a valid pair");
    const double literal = logabsdet(combination_matrix(u));
    worst = std::max({worst, std::abs(*order_free - direct), std::abs(literal - direct)});
  }
  r.statistic = worst;
  r.passed = worst <= r.tolerance;
  std::ostringstream os;
  os << "max |ln combination determinant - ln|I - U1 U2|| over " << trials
     << " random pairs, both the order-free and the literal product form";
  r.detail = os.str();
  return r;
}

CheckReport check_pushforward(PushforwardPair pair, int trials, std::uint64_t seed) {
  CheckReport r;
  r.target = 0.0;
  r.tolerance = 1e-10;
  double worst = 0.0;
  if (pair == PushforwardPair::t_to_pearson2) {
    r.name = "pushforward t -> pearson2";
    const std::array<int, 3> n = {3, 2, 4};
    const auto shape = ExtendedShape::from_degrees(2, n);
    for (int i = 0; i < trials; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      std::vector<Matrix> rs, ts;
      double log_jac = 0.0;
      for (int b = 1; b <= 2; ++b) {
        const Matrix rr = t_to_r(random_normal(n[b], 2, rng)).block;
        const auto back = r_to_t(rr);
        rs.push_back(rr);
        ts.push_back(back.block);
        log_jac += back.log_jac;
      }
      const double lhs = logpdf_marginal(CompanionFamily::pearson2, rs, shape);
      const double rhs = logpdf_marginal(CompanionFamily::t, ts, shape) + log_jac;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    r.detail = "pearson2 log-density against t log-density at r_to_t(R) plus its log-Jacobian, m=2, n=(3,2,4)";
  } else {
    r.name = "pushforward beta2 -> beta1";
    const auto shape = ExtendedShape::from_params(2, 1.7, {1.3, 2.2});
    for (int i = 0; i < trials; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      std::vector<Matrix> us, fs;
      double log_jac = 0.0;
      for (int b = 0; b < 2; ++b) {
        const Matrix u = beta2_to_beta1(random_spd(2, rng));
        us.push_back(u);
        fs.push_back(beta1_to_beta2(u));
        log_jac += beta1_to_beta2_log_jac(u);
      }
      const double lhs = logpdf_marginal(CompanionFamily::beta1, us, shape);
      const double rhs = logpdf_marginal(CompanionFamily::beta2, fs, shape) + log_jac;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    r.detail = "beta1 log-density against beta2 log-density at beta1_to_beta2(U) plus its log-Jacobian, m=2, a=(1.7,1.3,2.2)";
  }
  r.statistic = worst;
  r.passed = worst <= r.tolerance;
  r.detail += "; " + std::to_string(trials) + " random points";
  return r;
}

CheckReport check_sampler_density(const FamilyModel& model, const SamplerCheckOptions& options) {
  CheckReport r;
  r.name = "sampler density";
  r.target = 0.01;
  r.tolerance = 0.0;
  try {
    const Coordinates c = scalar_coordinates(model);
    const std::size_t dims = c.axes.size();
    if (dims > 3) return failed(r.name, "binning supports at most 3 coordinates");
    if (options.reference_cdf && dims != 1) {
      return failed(r.name, "a reference CDF needs a single-coordinate family");
    }
    const int bins = dims == 1 ? 40 : dims == 2 ? 10 : 6;
    std::size_t cells = 1;
    for (std::size_t i = 0; i < dims; ++i) cells *= bins;

    KernelSpec generator = model.kernel ? *model.kernel
                                        : make_kernel(KernelParams::gaussian(),
                                                      family_kernel_dim(model.family, model.shape));
    if (options.generator) {
      generator = make_kernel(*options.generator, family_kernel_dim(model.family, model.shape));
    }
    const auto draws = sample_family(model.family, model.shape, generator, model.split,
                                     options.n_draws, options.seed);

    auto cell_of = [&](const std::vector<double>& t) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < dims; ++i) {
        const double lo = axis_lo(c.axes[i]);
        const double width = (axis_hi(c.axes[i]) - lo) / bins;
        int b = static_cast<int>(std::floor((t[i] - lo) / width));
        b = std::clamp(b, 0, bins - 1);
        idx = idx * bins + static_cast<std::size_t>(b);
      }
      return idx;
    };
    std::vector<double> observed(cells, 0.0);
    for (const auto& d : draws) {
      const auto x = x_from_draw(d);
      std::vector<double> t(dims);
      for (std::size_t i = 0; i < dims; ++i) t[i] = to_t(c.axes[i], x[i]);
      observed[cell_of(t)] += 1.0;
    }

    std::vector<double> expected(cells, 0.0);
    const auto density = mapped_density(model, c);
    const double n = static_cast<double>(options.n_draws);
    // A cell error of 1e-3 expected draws is far below the chi-square noise.
    quad::Options opts;
    opts.abs_tol = 1e-3 / n;
    opts.rel_tol = 1e-6;
    opts.max_intervals = 100;
    double mass = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::vector<double> lo(dims), hi(dims);
      std::size_t rest = cell;
      for (std::size_t i = dims; i-- > 0;) {
        const std::size_t b = rest % bins;
        rest /= bins;
        const double a = axis_lo(c.axes[i]);
        const double width = (axis_hi(c.axes[i]) - a) / bins;
        lo[i] = a + width * b;
        hi[i] = b + 1 == static_cast<std::size_t>(bins) ? axis_hi(c.axes[i]) : a + width * (b + 1);
      }
      double p;
      if (options.reference_cdf) {
        p = options.reference_cdf(to_x(c.axes[0], hi[0])) - options.reference_cdf(to_x(c.axes[0], lo[0]));
      } else {
        p = quad::integrate_box(density, lo, hi, opts).value;
      }
      mass += p;
      expected[cell] = n * p;
    }
    const auto gof = stats::chi_square_gof(observed, expected);
    r.statistic = gof.p_value;
    r.passed = std::isfinite(gof.p_value) && gof.p_value > 0.01;
    std::ostringstream os;
    os << model_label(model) << "; draws generated under " << to_string(generator.params) << ", "
       << options.n_draws << " draws, " << cells << " cells pooled to " << gof.bins_used
       << ", chi-square " << gof.statistic << " on " << gof.dof << " dof, expected mass " << mass
       << (options.reference_cdf ? " (reference CDF)" : " (density)") << "; pass when p > 0.01";
    r.detail = os.str();
    return r;
  } catch (const std::exception& e) {
    return failed(r.name, model_label(model) + ": " + e.what());
  }
}

CheckReport check_kernel_invariance(const ExtendedShape& shape, double nu, std::size_t n_draws,
                                    std::uint64_t seed) {
  CheckReport r;
  r.name = "kernel invariance beta2";
  r.target = 0.01;
  try {
    const double dim = family_kernel_dim(Family::beta2, shape);
    const auto gaussian = make_kernel(KernelParams::gaussian(), dim);
    const auto heavy = make_kernel(KernelParams::pearson7(nu), dim);
    auto traces = [&](const KernelSpec& k, std::uint64_t s) {
      std::vector<double> out;
      for (const auto& d : sample_family(Family::beta2, shape, k, 0, n_draws, s)) {
        double tr = 0.0;
        for (const auto& f : d) tr += f.trace();
        out.push_back(tr);
      }
      return out;
    };
    const auto ks = stats::ks_two_sample(traces(gaussian, seed), traces(heavy, seed + 1));
    r.statistic = ks.p_value;
    r.passed = ks.p_value > 0.01;
    std::ostringstream os;
    os << "two-sample KS on tr(F_1+...+F_k), gaussian vs pearson7:nu=" << nu << ", " << n_draws
       << " draws each, D = " << ks.statistic << "; pass when p > 0.01";
    r.detail = os.str();
  } catch (const std::exception& e) {
    return failed(r.name, e.what());
  }
  return r;
}

CheckReport check_wishart_mean(int m, int n0, std::size_t n_draws, std::uint64_t seed) {
  CheckReport r;
  r.name = "wishart mean";
  r.target = 0.0;
  r.tolerance = 3.0;
  try {
    const std::array<int, 1> n = {n0};
    const auto model = FamilyModel::make(Family::gen_wishart, ExtendedShape::from_degrees(m, n));
    const auto draws = sample_family(model, n_draws, seed);
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i <= j; ++i) {
        std::vector<double> v;
        v.reserve(draws.size());
        for (const auto& d : draws) v.push_back(d[0](i, j));
        const auto ms = stats::mean_and_se(v);
        const double truth = i == j ? n0 : 0.0;
        worst = std::max(worst, std::abs(ms.mean - truth) / ms.se);
      }
    }
    r.statistic = worst;
    r.passed = worst <= r.tolerance;
    std::ostringstream os;
    os << "largest |mean - n0 I| / standard error over the upper triangle of V0, m=" << m
       << ", n0=" << n0 << ", " << n_draws << " gaussian draws";
    r.detail = os.str();
  } catch (const std::exception& e) {
    return failed(r.name, e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

FamilyModel model_of(Family f, int m, std::vector<int> n, std::optional<KernelParams> k = {},
                     int split = 0) {
  return FamilyModel::make(f, ExtendedShape::from_degrees(m, n), k, split);
}

FamilyModel model_params(Family f, double a0, std::vector<double> a, int split = 0) {
  return FamilyModel::make(f, ExtendedShape::from_params(1, a0, std::move(a)), std::nullopt, split);
}

RegisteredCheck named(std::string name, CheckKind kind, std::optional<Family> family,
                      std::function<CheckReport()> run) {
  auto wrapped = [name, run = std::move(run)] {
    CheckReport r = run();
    r.name = name;
    return r;
  };
  return {std::move(name), kind, family, std::move(wrapped)};
}

void add_norm(std::vector<RegisteredCheck>& reg, const std::string& label, FamilyModel model,
              NormMethod method = NormMethod::quadrature) {
  const Family f = model.family;
  reg.push_back(named("normalization/" + label, CheckKind::normalization, f,
                      [model = std::move(model), method] {
                        NormOptions o;
                        o.method = method;
                        return check_normalization(model, o);
                      }));
}

void add_sampler(std::vector<RegisteredCheck>& reg, const std::string& label, FamilyModel model,
                 std::optional<KernelParams> generator = {}) {
  const Family f = model.family;
  reg.push_back(named("sampler/" + label, CheckKind::sampler, f,
                      [model = std::move(model), generator] {
                        SamplerCheckOptions o;
                        o.generator = generator;
                        return check_sampler_density(model, o);
                      }));
}

std::vector<RegisteredCheck> build_registry() {
  std::vector<RegisteredCheck> reg;
  const auto p7 = [](double nu) { return KernelParams::pearson7(nu); };
  const auto kz = [](double T, double r, double s) { return KernelParams::kotz(T, r, s); };
  using F = Family;

  add_norm(reg, "gen-wishart", model_of(F::gen_wishart, 1, {2}));
  add_norm(reg, "gen-wishart-kotz", model_of(F::gen_wishart, 1, {2}, kz(2, 0.5, 1)));
  add_norm(reg, "gen-wishart-pearson7-k1", model_of(F::gen_wishart, 1, {2, 3}, p7(3)));
  add_norm(reg, "gen-wishart-m2", model_of(F::gen_wishart, 2, {3, 2}), NormMethod::importance);
  add_norm(reg, "wishart-t", model_of(F::wishart_t, 1, {1, 1}));
  add_norm(reg, "wishart-t-pearson7", model_of(F::wishart_t, 1, {2, 1}, p7(4)));
  add_norm(reg, "wishart-t-m2", model_of(F::wishart_t, 2, {3, 2}), NormMethod::importance);
  add_norm(reg, "t-k1", model_of(F::t, 1, {1, 1}));
  add_norm(reg, "t-k2", model_of(F::t, 1, {2, 1, 1}));
  add_norm(reg, "wishart-beta2", model_of(F::wishart_beta2, 1, {2, 2}));
  add_norm(reg, "beta2-k1", model_params(F::beta2, 1.5, {2.0}));
  add_norm(reg, "beta2-k2", model_params(F::beta2, 1.0, {1.0, 1.0}));
  add_norm(reg, "wishart-pearson2", model_of(F::wishart_pearson2, 1, {2, 1}));
  add_norm(reg, "pearson2-k1", model_of(F::pearson2, 1, {3, 1}));
  add_norm(reg, "pearson2-k2", model_of(F::pearson2, 1, {2, 1, 1}));
  add_norm(reg, "wishart-beta1", model_of(F::wishart_beta1, 1, {2, 2}));
  add_norm(reg, "wishart-beta1-m2-kotz", model_of(F::wishart_beta1, 2, {3, 2}, kz(2, 0.5, 1)),
           NormMethod::importance);
  add_norm(reg, "beta1-k1", model_params(F::beta1, 1.0, {1.0}));
  add_norm(reg, "beta1-k2", model_params(F::beta1, 1.5, {1.0, 1.25}));
  add_norm(reg, "tri-wtp2", model_of(F::tri_wtp2, 1, {2, 1, 1}), NormMethod::importance);
  add_norm(reg, "tri-wtp2-m2", model_of(F::tri_wtp2, 2, {3, 2, 2}), NormMethod::importance);
  add_norm(reg, "tri-wb2b1", model_of(F::tri_wb2b1, 1, {2, 2, 2}), NormMethod::importance);
  add_norm(reg, "gw-inv-wishart", model_of(F::gw_inv_wishart, 1, {2, 2}, {}, 1));
  add_norm(reg, "gw-inv-wishart-m2", model_of(F::gw_inv_wishart, 2, {3, 4}, {}, 1),
           NormMethod::importance);
  add_norm(reg, "beta2-inv", model_params(F::beta2_inv, 1.0, {1.0, 1.5}, 1));
  // One 2 x 2 matrix: exercises the m = 2 multivariate gamma constants.
  add_norm(reg, "gen-wishart-m2-quadrature", model_of(F::gen_wishart, 2, {4}));
  add_norm(reg, "beta2-m2-quadrature",
           FamilyModel::make(F::beta2, ExtendedShape::from_params(2, 3.0, {2.5})));
  add_norm(reg, "beta1-m2-quadrature",
           FamilyModel::make(F::beta1, ExtendedShape::from_params(2, 2.5, {2.0})));
  add_norm(reg, "gw-inv-wishart-m2-quadrature", model_of(F::gw_inv_wishart, 2, {5}, {}, 0));
  add_norm(reg, "beta2-inv-m2-quadrature",
           FamilyModel::make(F::beta2_inv, ExtendedShape::from_params(2, 3.0, {2.5}), {}, 0));

  add_sampler(reg, "gen-wishart", model_of(F::gen_wishart, 1, {3}));
  add_sampler(reg, "gen-wishart-kotz", model_of(F::gen_wishart, 1, {2}, kz(2, 0.5, 1)));
  add_sampler(reg, "gen-wishart-kotz-s2", model_of(F::gen_wishart, 1, {3}, kz(1.5, 1, 2)));
  add_sampler(reg, "wishart-t", model_of(F::wishart_t, 1, {2, 1}));
  add_sampler(reg, "wishart-t-pearson7", model_of(F::wishart_t, 1, {2, 1}, p7(5)));
  add_sampler(reg, "t", model_of(F::t, 1, {1, 1}));
  add_sampler(reg, "wishart-beta2", model_of(F::wishart_beta2, 1, {2, 2}));
  add_sampler(reg, "beta2", model_of(F::beta2, 1, {2, 2}));
  add_sampler(reg, "beta2-under-pearson7", model_of(F::beta2, 1, {3, 2}), p7(5));
  add_sampler(reg, "wishart-pearson2", model_of(F::wishart_pearson2, 1, {2, 1}));
  add_sampler(reg, "pearson2", model_of(F::pearson2, 1, {3, 1}));
  add_sampler(reg, "wishart-beta1", model_of(F::wishart_beta1, 1, {2, 2}));
  add_sampler(reg, "beta1", model_of(F::beta1, 1, {2, 2}));
  add_sampler(reg, "tri-wtp2", model_of(F::tri_wtp2, 1, {4, 1, 1}));
  add_sampler(reg, "tri-wb2b1", model_of(F::tri_wb2b1, 1, {2, 2, 2}));
  add_sampler(reg, "gw-inv-wishart", model_of(F::gw_inv_wishart, 1, {2, 3}, {}, 1));
  add_sampler(reg, "beta2-inv", model_of(F::beta2_inv, 1, {2, 2, 3}, {}, 1));

  for (const auto& t : {std::string("t_to_r"), std::string("r_to_t")}) {
    for (auto [n, m] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 2}}) {
      std::ostringstream os;
      os << "jacobian/" << t << "/" << n << "x" << m;
      reg.push_back(named(os.str(), CheckKind::jacobian, std::nullopt,
                          [t, n = n, m = m] { return check_jacobian_fd(t, n, m, 100); }));
    }
  }
  for (const auto& t : {std::string("beta1_to_beta2"), std::string("invert_spd")}) {
    for (int m : {1, 2, 3}) {
      reg.push_back(named("jacobian/" + t + "/m" + std::to_string(m), CheckKind::jacobian,
                          std::nullopt, [t, m] { return check_jacobian_fd(t, m, m, 100); }));
    }
  }
  reg.push_back(named("identity/bimatrix", CheckKind::identity, std::nullopt,
                      [] { return check_bimatrix_identity(1000); }));
  reg.push_back(named("pushforward/t-pearson2", CheckKind::pushforward, std::nullopt,
                      [] { return check_pushforward(PushforwardPair::t_to_pearson2, 500); }));
  reg.push_back(named("pushforward/beta2-beta1", CheckKind::pushforward, std::nullopt,
                      [] { return check_pushforward(PushforwardPair::beta2_to_beta1, 500); }));
  reg.push_back(named("invariance/beta2-kernels", CheckKind::invariance, F::beta2, [] {
    const std::array<int, 3> n = {3, 2, 2};
    return check_kernel_invariance(ExtendedShape::from_degrees(2, n), 5.0, 100000);
  }));
  reg.push_back(named("moment/wishart-mean", CheckKind::moment, F::gen_wishart,
                      [] { return check_wishart_mean(2, 5, 100000); }));
  return reg;
}

}  // namespace

const std::vector<RegisteredCheck>& check_registry() {
  static const std::vector<RegisteredCheck> registry = build_registry();
  return registry;
}

const RegisteredCheck* find_check(const std::string& name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool registry_complete(std::vector<std::string>* missing) {
  bool complete = true;
  for (Family f : all_families()) {
    bool norm = false, sampler = false;
    for (const auto& c : check_registry()) {
      if (c.family != f) continue;
      norm = norm || c.kind == CheckKind::normalization;
      sampler = sampler || c.kind == CheckKind::sampler;
    }
    if (!norm || !sampler) {
      complete = false;
      if (missing) {
        missing->push_back(std::string(family_name(f)) + (norm ? "" : " (normalization)") +
                           (sampler ? "" : " (sampler)"));
      }
    }
  }
  return complete;
}

}  // namespace mmv
