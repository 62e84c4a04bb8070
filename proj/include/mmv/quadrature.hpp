#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite and infinite ranges,
// plus a nested tensor-product driver for low-dimensional boxes.

#include <functional>
#include <span>
#include <vector>

namespace mmv::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 2000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

Result integrate(const Integrand& f, double lo, double hi, const Options& opts = {});

// (lo, inf) through x = lo + scale * t / (1 - t).
Result integrate_to_infinity(const Integrand& f, double lo, double scale = 1.0,
                             const Options& opts = {});

// (-inf, inf) through x = scale * t / (1 - t^2).
Result integrate_real_line(const Integrand& f, double scale = 1.0, const Options& opts = {});

using BoxIntegrand = std::function<double(std::span<const double>)>;

// Iterated adaptive quadrature over [lo_0, hi_0] x ... x [lo_d, hi_d].
// The innermost dimension is the last coordinate.
Result integrate_box(const BoxIntegrand& f, std::span<const double> lo,
                     std::span<const double> hi, const Options& opts = {});

}  // namespace mmv::quad
