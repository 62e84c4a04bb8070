#pragma once

// Maximum-likelihood fitting of the common-parameter matrix beta type II
// models: a sample F_1..F_k is either one draw of the dependent
// multimatricvariate beta II law with parameters (a0, a, ..., a), or k
// independent single-block beta II(a, a0) matrices.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmv/matrix_core.hpp"

namespace mmv {

enum class Beta2Model { dependent, independent };

const char* to_string(Beta2Model model);

// -infinity when a0 or a is at or below (m-1)/2. Throws for empty data,
// mixed dimensions or non-SPD matrices.
double loglik_beta2(Beta2Model model, double a0, double a, std::span<const SpdMatrix> data);

struct SeedResult {
  double a0 = 1.0;
  double a = 1.0;
  bool fallback = false;
};

// Method-of-moments beta-prime(a, a0) fit to the pooled eigenvalues of the
// data, clamped into the valid region.
SeedResult seed_univariate(std::span<const SpdMatrix> data);

struct FitConfig {
  Beta2Model model = Beta2Model::dependent;
  int max_iters = 2000;
  double f_tol = 1e-12;
  double x_tol = 1e-10;
  // Explicit (a0, a) seed; the univariate seed when empty.
  std::optional<std::pair<double, double>> seed;
  int restarts = 5;
};

struct FitResult {
  double a0_hat = 0.0;
  double a_hat = 0.0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::pair<double, double> seed_used{0.0, 0.0};
  bool seed_fallback = false;
  // Best-so-far log-likelihood after each simplex iteration of the winning start.
  std::vector<double> trace;
  std::string diagnostics;
};

FitResult fit_beta2(std::span<const SpdMatrix> data, const FitConfig& config);

}  // namespace mmv
