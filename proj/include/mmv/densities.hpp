#pragma once

// Log-densities of the multimatricvariate families.
//
// Every density is evaluated in log space. Kernel-dependent densities use a
// kernel normalized over the total dimension D = 2 m a*, where
// a* = a0 + a1 + ... + ak (n*/2 for integer degrees of freedom), so each
// joint is a genuine probability density. The marginal families (t, beta2,
// pearson2, beta1, beta2-inv) do not depend on the kernel and take none.
//
// Inputs that are well-formed but outside an open support set (a matrix that
// is not positive definite, a block outside the unit ball) give -infinity.
// Wrong shapes or counts throw ShapeError; invalid parameters throw
// DomainError.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmv/kernels.hpp"
#include "mmv/matrix_core.hpp"
#include "mmv/transforms.hpp"

namespace mmv {

// Dimension/parameter record. Parameter i is n_i / 2 for integer degrees
// of freedom, or an arbitrary real a_i > (m-1)/2.
struct ExtendedShape {
  int m = 1;
  double a0 = 0.5;
  std::vector<double> a;  // a_1..a_k

  int k() const { return static_cast<int>(a.size()); }
  double a_star() const;
  // a0, a1, ..., ak
  std::vector<double> all_params() const;
  // n_0..n_k when every parameter is a half-integer.
  std::optional<std::vector<int>> integer_view() const;
  // Throws DomainError unless m >= 1 and every parameter exceeds (m-1)/2.
  void validate() const;

  static ExtendedShape from_degrees(int m, std::span<const int> n);
  static ExtendedShape from_params(int m, double a0, std::vector<double> a);
};

struct ScaleSet {
  std::vector<SpdMatrix> sigma;
};

// Matrix variate elliptical density of the N x m matrix Z with location mu,
// row scale sigma (N x N) and column scale theta (m x m).
double logpdf_elliptical(const MatrixBlock& z, const MatrixBlock& mu, const SpdMatrix& sigma,
                         const SpdMatrix& theta, const KernelSpec& kernel);

// Generalised Wishart joint of V_0..V_k with parameters (a0, a1..ak).
// `scales` may be null (identity scales) or hold k+1 m x m matrices.
double logpdf_gen_wishart(std::span<const SpdMatrix> v, const ExtendedShape& shape,
                          const ScaleSet* scales, const KernelSpec& kernel);

// Joint density of an anchor (V0 or W0) and its companions.
double logpdf_wishart_companion(CompanionFamily family, const SpdMatrix& anchor,
                                std::span<const Matrix> companions, const ExtendedShape& shape,
                                const KernelSpec& kernel);

// Kernel-free marginal density of the companions.
double logpdf_marginal(CompanionFamily family, std::span<const Matrix> companions,
                       const ExtendedShape& shape);

enum class TriForm { wtp2, wb2b1 };

// Three-block joints: (W, T, R) for wtp2 and (W, F, U) for wb2b1. Needs k = 2.
double logpdf_trimatric(TriForm form, const SpdMatrix& w, const Matrix& c1, const Matrix& c2,
                        const ExtendedShape& shape, const KernelSpec& kernel);

enum class InvertedKind { gw_inv_wishart, beta2_inv };

// gw_inv_wishart: generalised Wishart V_0..V_{s-1} followed by inverted
// W_s..W_k (parameters a0..ak in that order, s = head.size()).
// beta2_inv: beta type II F_1..F_s followed by inverted E_{s+1}..E_k.
// `kernel` is required for gw_inv_wishart and ignored for beta2_inv.
double logpdf_inverted(InvertedKind kind, std::span<const SpdMatrix> head,
                       std::span<const SpdMatrix> tail, const ExtendedShape& shape,
                       const ScaleSet* scales, const KernelSpec* kernel);

// ln|prod_i (I - B_i) + sum_i prod_{j != i} (I - B_j) B_i|, evaluated in the
// order-free form ln|I + sum_i (I - B_i)^{-1} B_i| + sum_i ln|I - B_i|.
// nullopt when some I - B_i is not positive definite.
std::optional<double> combination_logdet(std::span<const SpdMatrix> b);

// The combination matrix exactly as the product/sum expression reads, with
// products taken in increasing index order. Not symmetric in general.
Matrix combination_matrix(std::span<const SpdMatrix> b);

// ---------------------------------------------------------------------------
// Family registry

enum class Family {
  gen_wishart,
  wishart_t,
  t,
  wishart_beta2,
  beta2,
  wishart_pearson2,
  pearson2,
  wishart_beta1,
  beta1,
  tri_wtp2,
  tri_wb2b1,
  gw_inv_wishart,
  beta2_inv,
};

std::span<const Family> all_families();
std::string_view family_name(Family family);
std::optional<Family> family_from_name(std::string_view name);
bool family_needs_kernel(Family family);

enum class ComponentKind {
  spd,         // m x m, positive definite
  spd_unit,    // m x m, 0 < U < I
  block,       // rows x m, unconstrained
  block_ball,  // rows x m, I - R'R positive definite
};

struct Component {
  ComponentKind kind;
  int rows;
  int cols;
};

// Matrices making up one observation of `family`, in order.
// `split` is the number of non-inverted leading matrices for the inverted
// families and is ignored otherwise.
std::vector<Component> family_layout(Family family, const ExtendedShape& shape, int split = 0);

// Total dimension D the kernel of a kernel-dependent family normalizes over.
double family_kernel_dim(Family family, const ExtendedShape& shape);

// A family bound to its shape, kernel and split point.
struct FamilyModel {
  Family family = Family::beta2;
  ExtendedShape shape;
  std::optional<KernelSpec> kernel;
  int split = 0;
  std::optional<ScaleSet> scales;

  static FamilyModel make(Family family, ExtendedShape shape,
                          std::optional<KernelParams> kernel = std::nullopt, int split = 0);
};

double logpdf(const FamilyModel& model, std::span<const Matrix> draw);

}  // namespace mmv
