#include "mmv/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mmv/errors.hpp"
#include "mmv/quadrature.hpp"
#include "mmv/special_fn.hpp"

namespace mmv {

namespace {

double parse_number(std::string_view text, std::string_view key) {
  std::string buf(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != buf.size() || buf.empty()) {
    throw std::invalid_argument("kernel parameter '" + std::string(key) +
                                "' is not a number: '" + buf + "'");
  }
  return value;
}

void check_admissible(const KernelParams& p, double dim) {
  if (!(dim > 0.0) || !std::isfinite(dim)) {
    throw DomainError("kernel dimension must be positive");
  }
  switch (p.family) {
    case KernelFamily::gaussian:
      return;
    case KernelFamily::pearson7:
      if (!(p.nu > 0.0)) throw DomainError("pearson7 kernel requires nu > 0");
      return;
    case KernelFamily::kotz:
      if (!(p.r > 0.0)) throw DomainError("kotz kernel requires r > 0");
      if (!(p.s > 0.0)) throw DomainError("kotz kernel requires s > 0");
      if (!(p.T > 1.0 - 0.5 * dim)) {
        std::ostringstream os;
        os << "kotz kernel requires T > 1 - D/2 = " << 1.0 - 0.5 * dim
           << " (radial integral diverges)";
        throw DomainError(os.str());
      }
      return;
  }
}

}  // namespace

KernelParams parse_kernel(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  KernelParams p;
  if (name == "gaussian") {
    p.family = KernelFamily::gaussian;
  } else if (name == "pearson7") {
    p.family = KernelFamily::pearson7;
  } else if (name == "kotz") {
    p.family = KernelFamily::kotz;
  } else {
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
  }
  bool have_nu = false;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw std::invalid_argument("kernel parameter '" + std::string(item) + "' lacks '='");
      }
      const std::string_view key = item.substr(0, eq);
      const double value = parse_number(item.substr(eq + 1), key);
      if (p.family == KernelFamily::pearson7 && key == "nu") {
        p.nu = value;
        have_nu = true;
      } else if (p.family == KernelFamily::kotz && key == "T") {
        p.T = value;
      } else if (p.family == KernelFamily::kotz && key == "r") {
        p.r = value;
      } else if (p.family == KernelFamily::kotz && key == "s") {
        p.s = value;
      } else {
        throw std::invalid_argument("unknown parameter '" + std::string(key) + "' for kernel '" +
                                    std::string(name) + "'");
      }
    }
  }
  if (p.family == KernelFamily::pearson7 && !have_nu) {
    throw std::invalid_argument("pearson7 kernel needs nu, e.g. pearson7:nu=5");
  }
  return p;
}

std::string to_string(const KernelParams& p) {
  std::ostringstream os;
  os.precision(17);
  switch (p.family) {
    case KernelFamily::gaussian:
      os << "gaussian";
      break;
    case KernelFamily::pearson7:
      os << "pearson7:nu=" << p.nu;
      break;
    case KernelFamily::kotz:
      os << "kotz:T=" << p.T << ",r=" << p.r << ",s=" << p.s;
      break;
  }
  return os.str();
}

double kotz_log_radial_integral(const KernelParams& p, double dim) {
  check_admissible(p, dim);
  // integrand rho^power * exp(-r rho^{2s}), power > -1
  const double power = dim + 2.0 * p.T - 3.0;
  double peak;
  if (power > 0.0) {
    peak = std::pow(power / (2.0 * p.s * p.r), 1.0 / (2.0 * p.s));
  } else {
    peak = std::pow(1.0 / p.r, 1.0 / (2.0 * p.s));
  }
  const double log_ref = power * std::log(peak) - p.r * std::pow(peak, 2.0 * p.s);
  auto integrand = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    const double g = power * std::log(rho) - p.r * std::pow(rho, 2.0 * p.s);
    return std::exp(g - log_ref);
  };
  quad::Options opts;
  opts.abs_tol = 1e-10;
  opts.rel_tol = 1e-12;
  opts.max_intervals = 5000;
  const quad::Result res = quad::integrate_to_infinity(integrand, 0.0, peak, opts);
  if (!(res.value > 0.0) || !std::isfinite(res.value)) {
    throw DomainError("kotz kernel: radial quadrature failed");
  }
  return log_ref + std::log(res.value);
}

KernelSpec make_kernel(const KernelParams& params, double dim) {
  check_admissible(params, dim);
  KernelSpec spec;
  spec.params = params;
  spec.dim = dim;
  switch (params.family) {
    case KernelFamily::gaussian:
      spec.ln_norm = -0.5 * dim * kLn2Pi;
      break;
    case KernelFamily::pearson7: {
      const double nu = params.nu;
      spec.ln_norm =
          ln_gamma(0.5 * (dim + nu)) - 0.5 * dim * std::log(kPi * nu) - ln_gamma(0.5 * nu);
      break;
    }
    case KernelFamily::kotz:
      spec.ln_norm = -ln_sphere_area(dim) - kotz_log_radial_integral(params, dim);
      break;
  }
  return spec;
}

double log_h(const KernelSpec& spec, double u) {
  if (!(u >= 0.0)) throw DomainError("log_h: argument must be nonnegative");
  const KernelParams& p = spec.params;
  switch (p.family) {
    case KernelFamily::gaussian:
      return spec.ln_norm - 0.5 * u;
    case KernelFamily::pearson7:
      return spec.ln_norm - 0.5 * (spec.dim + p.nu) * std::log1p(u / p.nu);
    case KernelFamily::kotz: {
      const double tail = -p.r * std::pow(u, p.s);
      if (p.T == 1.0) return spec.ln_norm + tail;
      if (u == 0.0) {
        return p.T > 1.0 ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
      }
      return spec.ln_norm + (p.T - 1.0) * std::log(u) + tail;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double sample_radius(const KernelSpec& spec, RngStream& rng) {
  const KernelParams& p = spec.params;
  switch (p.family) {
    case KernelFamily::gaussian:
      return std::sqrt(rng.chi_square(spec.dim));
    case KernelFamily::pearson7: {
      const double gaussian_radius = std::sqrt(rng.chi_square(spec.dim));
      const double mixing = rng.gamma(0.5 * p.nu) * 2.0 / p.nu;
      return gaussian_radius / std::sqrt(mixing);
    }
    case KernelFamily::kotz: {
      // r * rho^{2s} ~ Gamma((D/2 + T - 1) / s)
      const double y = rng.gamma((0.5 * spec.dim + p.T - 1.0) / p.s);
      return std::pow(y / p.r, 1.0 / (2.0 * p.s));
    }
  }
  return 0.0;
}

}  // namespace mmv
