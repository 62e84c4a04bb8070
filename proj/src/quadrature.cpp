#include "mmv/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "mmv/errors.hpp"

namespace mmv::quad {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const Integrand& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double s = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

Result integrate(const Integrand& f, double lo, double hi, const Options& opts) {
  Result out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, lo, hi);
  out.evaluations = 15;
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int intervals = 1;
  while (true) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (intervals >= opts.max_intervals) break;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval can no longer be split in floating point.
      heap.push(worst);
      break;
    }
    Segment left = gk15(f, worst.lo, mid);
    Segment right = gk15(f, mid, worst.hi);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to avoid drift from incremental updates.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  if (!std::isfinite(sum)) out.converged = false;
  return out;
}

Result integrate_to_infinity(const Integrand& f, double lo, double scale, const Options& opts) {
  if (!(scale > 0.0)) throw DomainError("integrate_to_infinity: scale must be positive");
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = lo + scale * t / one_minus;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * scale / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

Result integrate_real_line(const Integrand& f, double scale, const Options& opts) {
  if (!(scale > 0.0)) throw DomainError("integrate_real_line: scale must be positive");
  auto mapped = [&](double t) {
    const double q = 1.0 - t * t;
    const double x = scale * t / q;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * scale * (1.0 + t * t) / (q * q);
  };
  return integrate(mapped, -1.0, 1.0, opts);
}

namespace {

Result integrate_box_level(const BoxIntegrand& f, std::span<const double> lo,
                           std::span<const double> hi, std::vector<double>& point,
                           std::size_t level, const Options& opts) {
  const std::size_t dims = lo.size();
  Result out;
  if (level + 1 == dims) {
    auto inner = [&](double x) {
      point[level] = x;
      return f(point);
    };
    return integrate(inner, lo[level], hi[level], opts);
  }
  Options inner_opts = opts;
  inner_opts.abs_tol = opts.abs_tol * 0.1;
  long evaluations = 0;
  bool all_converged = true;
  auto outer = [&](double x) {
    point[level] = x;
    Result r = integrate_box_level(f, lo, hi, point, level + 1, inner_opts);
    evaluations += r.evaluations;
    all_converged = all_converged && r.converged;
    return r.value;
  };
  out = integrate(outer, lo[level], hi[level], opts);
  out.evaluations = evaluations;
  out.converged = out.converged && all_converged;
  return out;
}

}  // namespace

Result integrate_box(const BoxIntegrand& f, std::span<const double> lo,
                     std::span<const double> hi, const Options& opts) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw ShapeError("integrate_box: bounds must be non-empty and of equal length");
  }
  std::vector<double> point(lo.size(), 0.0);
  return integrate_box_level(f, lo, hi, point, 0, opts);
}

}  // namespace mmv::quad
