#pragma once

// Claim-checking harness: normalization by quadrature or importance
// sampling, finite-difference Jacobians, pushforward and determinant
// identities, and sampler-versus-density goodness of fit. Checks report
// failures through CheckReport rather than throwing.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmv/densities.hpp"
#include "mmv/kernels.hpp"

namespace mmv {

struct CheckReport {
  std::string name;
  double statistic = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

enum class NormMethod { quadrature, importance };

struct NormOptions {
  NormMethod method = NormMethod::quadrature;
  std::size_t n_samples = 40000;  // importance sampling only
  std::uint64_t seed = 1;
};

// Total mass of the model's density. Quadrature needs m = 1 and at most
// three scalar coordinates; importance sampling draws from the same family
// under a widened gaussian kernel (kotz T=1, r=1/4, s=1) and needs integer
// degrees of freedom and a kernel-dependent family.
CheckReport check_normalization(const FamilyModel& model, const NormOptions& options = {});

// Transforms with a log-Jacobian: t_to_r, r_to_t (n x m blocks),
// beta1_to_beta2 and invert_spd (m x m, n ignored).
std::vector<std::string> jacobian_transforms();
CheckReport check_jacobian_fd(const std::string& transform, int n, int m, int trials,
                              double eps = 1e-6, std::uint64_t seed = 7);

CheckReport check_bimatrix_identity(int trials, std::uint64_t seed = 11);

enum class PushforwardPair { t_to_pearson2, beta2_to_beta1 };
CheckReport check_pushforward(PushforwardPair pair, int trials, std::uint64_t seed = 13);

// Chi-square test of constructive draws against the exponentiated density,
// on equal-width bins of the mapped coordinates (40 bins for one
// coordinate, 10 x 10 for two, 6 x 6 x 6 for three). `generator` replaces
// the kernel used to draw the spherical matrix. `reference_cdf` replaces
// the density with an independent CDF for single-coordinate families.
struct SamplerCheckOptions {
  std::size_t n_draws = 100000;
  std::uint64_t seed = 17;
  std::optional<KernelParams> generator;
  std::function<double(double)> reference_cdf;
};
CheckReport check_sampler_density(const FamilyModel& model, const SamplerCheckOptions& options = {});

// Two-sample KS on tr(F_1 + ... + F_k) between beta2 draws generated under
// the gaussian and the pearson7(nu) kernels.
CheckReport check_kernel_invariance(const ExtendedShape& shape, double nu, std::size_t n_draws,
                                    std::uint64_t seed = 19);

// Mean of V0 under the gaussian generalised Wishart with k = 0 against n0 I.
CheckReport check_wishart_mean(int m, int n0, std::size_t n_draws, std::uint64_t seed = 23);

// ---------------------------------------------------------------------------
// Named registry

enum class CheckKind { normalization, sampler, jacobian, identity, pushforward, invariance, moment };

struct RegisteredCheck {
  std::string name;
  CheckKind kind;
  std::optional<Family> family;
  std::function<CheckReport()> run;
};

const std::vector<RegisteredCheck>& check_registry();
const RegisteredCheck* find_check(const std::string& name);

// True when every density family has a normalization check and a
// sampler-density check. Missing families are listed in `missing`.
bool registry_complete(std::vector<std::string>* missing = nullptr);

}  // namespace mmv
