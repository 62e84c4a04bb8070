#pragma once

namespace mmv {

// ln Gamma(x) for x > 0. Lanczos series on [0.5, inf), recurrence below.
double ln_gamma(double x);

// ln Gamma_m(a) = m(m-1)/4 ln(pi) + sum_{i=1..m} ln Gamma(a - (i-1)/2).
// Requires a > (m-1)/2.
double ln_mv_gamma(int m, double a);

// Log volume of the Stiefel manifold of n x m matrices with orthonormal
// columns: m ln 2 + (nm/2) ln(pi) - ln Gamma_m(n/2). Requires n >= m >= 1.
double ln_stiefel_volume(int n, int m);

// Log surface area of the unit sphere in R^d: ln(2 pi^{d/2} / Gamma(d/2)).
double ln_sphere_area(int d);
// Same formula for a real "dimension" d > 0 (extended-parameter kernels).
double ln_sphere_area(double d);

inline constexpr double kLnPi = 1.1447298858494002;
inline constexpr double kLn2Pi = 1.8378770664093453;
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace mmv
