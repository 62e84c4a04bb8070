#pragma once

// Elliptical kernels h(u), u = tr of a quadratic form, normalized so that
// x -> h(|x|^2) is a probability density on R^D. The total dimension D is
// bound when the kernel is built; the same functional form normalizes
// differently for every D.
//
//   gaussian          h(u) ~ exp(-u / 2)
//   pearson7(nu)      h(u) ~ (1 + u / nu)^{-(D + nu) / 2}
//   kotz(T, r, s)     h(u) ~ u^{T - 1} exp(-r u^s)

#include <string>
#include <string_view>

#include "mmv/rng.hpp"

namespace mmv {

enum class KernelFamily { gaussian, pearson7, kotz };

struct KernelParams {
  KernelFamily family = KernelFamily::gaussian;
  double nu = 0.0;  // pearson7 degrees of freedom
  double T = 1.0;   // kotz power
  double r = 0.5;   // kotz rate
  double s = 1.0;   // kotz exponent

  static KernelParams gaussian() { return {}; }
  static KernelParams pearson7(double nu) {
    KernelParams p;
    p.family = KernelFamily::pearson7;
    p.nu = nu;
    return p;
  }
  static KernelParams kotz(double T, double r, double s) {
    KernelParams p;
    p.family = KernelFamily::kotz;
    p.T = T;
    p.r = r;
    p.s = s;
    return p;
  }
};

struct KernelSpec {
  KernelParams params;
  double dim = 1.0;      // D; real-valued for extended shape parameters
  double ln_norm = 0.0;  // ln of the constant multiplying the raw profile
};

// Parses `gaussian`, `pearson7:nu=5`, `kotz:T=2,r=0.5,s=1`.
// Throws std::invalid_argument on unknown names or malformed parameters.
KernelParams parse_kernel(std::string_view text);
std::string to_string(const KernelParams& params);

// Throws DomainError when the parameters make the radial integral diverge.
KernelSpec make_kernel(const KernelParams& params, double dim);

// ln h(u) including the normalizing constant. u must be >= 0.
double log_h(const KernelSpec& spec, double u);

// Radius draw with density proportional to rho^{D-1} h(rho^2).
double sample_radius(const KernelSpec& spec, RngStream& rng);

// ln of the integral of rho^{D-1} exp(g(rho^2)) over (0, inf) for the kotz
// profile, computed by adaptive quadrature.
double kotz_log_radial_integral(const KernelParams& params, double dim);

}  // namespace mmv
