#include "mmv/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmv/special_fn.hpp"

namespace mmv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Data summaries the likelihoods need; everything else depends on (a0, a).
struct Beta2Summary {
  int m = 1;
  int k = 0;
  double sum_ld_f = 0.0;        // sum_j ln|F_j|
  double ld_one_plus_sum = 0.0;  // ln|I + sum_j F_j|
  double sum_ld_one_plus = 0.0;  // sum_j ln|I + F_j|
};

Beta2Summary summarize(std::span<const SpdMatrix> data) {
  if (data.empty()) throw ShapeError("beta2 likelihood: empty data");
  Beta2Summary s;
  s.m = static_cast<int>(data[0].rows());
  s.k = static_cast<int>(data.size());
  Matrix total = Matrix::Zero(s.m, s.m);
  for (const auto& f : data) {
    if (f.rows() != s.m || f.cols() != s.m) {
      throw ShapeError("beta2 likelihood: all matrices must be m x m with a common m");
    }
    s.sum_ld_f += logdet(f);
    s.sum_ld_one_plus += logdet(Matrix(identity(s.m) + f));
    total += f;
  }
  s.ld_one_plus_sum = logdet(Matrix(identity(s.m) + total));
  return s;
}

double loglik(const Beta2Summary& s, Beta2Model model, double a0, double a) {
  const double bound = 0.5 * (s.m - 1);
  if (!(a0 > bound) || !(a > bound) || !std::isfinite(a0) || !std::isfinite(a)) return kNegInf;
  const double half = 0.5 * (s.m + 1);
  const double k = s.k;
  if (model == Beta2Model::dependent) {
    const double ka = k * a;
    return ln_mv_gamma(s.m, a0 + ka) - ln_mv_gamma(s.m, a0) - k * ln_mv_gamma(s.m, a) +
           (a - half) * s.sum_ld_f - (a0 + ka) * s.ld_one_plus_sum;
  }
  return k * (ln_mv_gamma(s.m, a0 + a) - ln_mv_gamma(s.m, a0) - ln_mv_gamma(s.m, a)) +
         (a - half) * s.sum_ld_f - (a0 + a) * s.sum_ld_one_plus;
}

using Point = std::array<double, 2>;

struct SimplexRun {
  Point best{};
  double best_value = kNegInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Nelder-Mead maximization of f over R^2.
template <typename F>
SimplexRun nelder_mead(F&& f, Point start, double step, const FitConfig& cfg) {
  std::array<Point, 3> x = {start, start, start};
  x[1][0] += step;
  x[2][1] += step;
  std::array<double, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = f(x[i]);

  SimplexRun run;
  auto order = [&] {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    const auto xs = x;
    const auto vs = v;
    for (int i = 0; i < 3; ++i) {
      x[i] = xs[idx[i]];
      v[i] = vs[idx[i]];
    }
  };
  auto lerp = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  order();
  for (run.iterations = 0; run.iterations < cfg.max_iters; ++run.iterations) {
    const double spread = std::abs(v[0] - v[2]);
    double size = 0.0;
    for (int i = 1; i < 3; ++i) {
      size = std::max({size, std::abs(x[i][0] - x[0][0]), std::abs(x[i][1] - x[0][1])});
    }
    if (std::isfinite(v[0]) && std::isfinite(v[2]) &&
        spread <= cfg.f_tol * (1.0 + std::abs(v[0])) && size <= cfg.x_tol) {
      run.converged = true;
      break;
    }
    const Point centroid = lerp(x[0], x[1], 0.5);
    const Point reflected = lerp(x[2], centroid, 2.0);
    const double vr = f(reflected);
    if (vr > v[0]) {
      const Point expanded = lerp(x[2], centroid, 3.0);
      const double ve = f(expanded);
      if (ve > vr) {
        x[2] = expanded;
        v[2] = ve;
      } else {
        x[2] = reflected;
        v[2] = vr;
      }
    } else if (vr > v[1]) {
      x[2] = reflected;
      v[2] = vr;
    } else {
      const bool outside = vr > v[2];
      const Point contracted = outside ? lerp(x[2], centroid, 1.5) : lerp(x[2], centroid, 0.5);
      const double vc = f(contracted);
      if (vc > std::max(vr, v[2]) || (outside && vc >= vr)) {
        x[2] = contracted;
        v[2] = vc;
      } else {
        for (int i = 1; i < 3; ++i) {
          x[i] = lerp(x[0], x[i], 0.5);
          v[i] = f(x[i]);
        }
      }
    }
    order();
    run.trace.push_back(v[0]);
  }
  run.best = x[0];
  run.best_value = v[0];
  return run;
}

}  // namespace

const char* to_string(Beta2Model model) {
  return model == Beta2Model::dependent ? "dependent" : "independent";
}

double loglik_beta2(Beta2Model model, double a0, double a, std::span<const SpdMatrix> data) {
  return loglik(summarize(data), model, a0, a);
}

SeedResult seed_univariate(std::span<const SpdMatrix> data) {
  if (data.empty()) throw ShapeError("seed_univariate: empty data");
  const int m = static_cast<int>(data[0].rows());
  const double bound = 0.5 * (m - 1);
  const double floor = bound + 1e-4;

  std::vector<double> pooled;
  for (const auto& f : data) {
    const auto sp = spd_spectrum(f, "seed_univariate");
    pooled.insert(pooled.end(), sp.values.data(), sp.values.data() + sp.values.size());
  }
  SeedResult out;
  const double n = static_cast<double>(pooled.size());
  double mean = 0.0;
  for (double x : pooled) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : pooled) var += (x - mean) * (x - mean);
  var = pooled.size() > 1 ? var / (n - 1.0) : 0.0;

  if (!(var > 1e-12 * mean * mean) || !std::isfinite(var)) {
    out.fallback = true;
    const double fallback = 1.0 > bound ? 1.0 : bound + 1.0;
    out.a0 = out.a = fallback;
    return out;
  }
  // beta-prime(alpha, beta): mean alpha/(beta-1), variance
  // alpha(alpha+beta-1)/((beta-2)(beta-1)^2); solve for (beta, alpha).
  const double beta = 2.0 + mean * (mean + 1.0) / var;
  const double alpha = mean * (beta - 1.0);
  out.a0 = std::max(beta, floor);
  out.a = std::max(alpha, floor);
  return out;
}

FitResult fit_beta2(std::span<const SpdMatrix> data, const FitConfig& config) {
  if (!(config.f_tol > 0.0) || !(config.x_tol > 0.0)) {
    throw DomainError("fit_beta2: tolerances must be positive");
  }
  if (config.max_iters < 1 || config.restarts < 1) {
    throw DomainError("fit_beta2: max_iters and restarts must be positive");
  }
  const Beta2Summary summary = summarize(data);
  const double bound = 0.5 * (summary.m - 1);

  FitResult result;
  if (config.seed) {
    result.seed_used = *config.seed;
    if (!(config.seed->first > bound) || !(config.seed->second > bound)) {
      std::ostringstream os;
      os << "fit_beta2: explicit seed must exceed (m-1)/2 = " << bound;
      throw DomainError(os.str());
    }
  } else {
    const auto seed = seed_univariate(data);
    result.seed_used = {seed.a0, seed.a};
    result.seed_fallback = seed.fallback;
  }

  // y = ln(p - (m-1)/2) keeps both parameters inside the open quadrant.
  auto objective = [&](const Point& y) {
    const double value =
        loglik(summary, config.model, bound + std::exp(y[0]), bound + std::exp(y[1]));
    return std::isnan(value) ? kNegInf : value;
  };
  const Point seed_y = {std::log(result.seed_used.first - bound),
                        std::log(result.seed_used.second - bound)};

  constexpr std::array<double, 5> kScalings = {1.0, 0.5, 2.0, 0.1, 10.0};
  std::ostringstream diag;
  bool have_best = false;
  SimplexRun best;
  int total_iterations = 0;
  for (int r = 0; r < config.restarts; ++r) {
    // Beyond the five fixed scalings, cycle through them with a wider step.
    const double scale = kScalings[r % kScalings.size()];
    const double step = 0.5 * (1 + r / static_cast<int>(kScalings.size()));
    Point start = {seed_y[0] + std::log(scale), seed_y[1] + std::log(scale)};
    SimplexRun run = nelder_mead(objective, start, step, config);
    int iterations = run.iterations;
    // Re-seed the simplex at the optimum until it stops improving.
    for (int polish = 0; polish < 3 && std::isfinite(run.best_value); ++polish) {
      SimplexRun again = nelder_mead(objective, run.best, 0.05, config);
      iterations += again.iterations;
      const bool improved = again.best_value > run.best_value;
      if (improved) {
        run.trace.insert(run.trace.end(), again.trace.begin(), again.trace.end());
        run.best = again.best;
        run.best_value = again.best_value;
      }
      run.converged = again.converged;
      if (!improved) break;
    }
    run.iterations = iterations;
    total_iterations += iterations;
    diag << "start " << r << " (scale " << scale << "): loglik " << run.best_value
         << (run.converged ? ", converged" : ", not converged") << "; ";
    if (std::isfinite(run.best_value) && (!have_best || run.best_value > best.best_value)) {
      best = std::move(run);
      have_best = true;
    }
  }

  if (!have_best) {
    result.a0_hat = result.seed_used.first;
    result.a_hat = result.seed_used.second;
    result.loglik = loglik_beta2(config.model, result.a0_hat, result.a_hat, data);
    result.iterations = total_iterations;
    result.converged = false;
    result.diagnostics = "every start diverged; " + diag.str();
    return result;
  }
  // Trace as running maximum so it is nondecreasing even across polishing.
  for (std::size_t i = 1; i < best.trace.size(); ++i) {
    best.trace[i] = std::max(best.trace[i], best.trace[i - 1]);
  }
  result.a0_hat = bound + std::exp(best.best[0]);
  result.a_hat = bound + std::exp(best.best[1]);
  result.loglik = loglik_beta2(config.model, result.a0_hat, result.a_hat, data);
  result.iterations = total_iterations;
  result.converged = best.converged && std::isfinite(result.loglik);
  result.trace = std::move(best.trace);
  result.diagnostics = diag.str();
  return result;
}

}  // namespace mmv
