#pragma once

// Changes of variables with exact log-Jacobians.
//
// Jacobian conventions: block maps report ln|d(out)/d(in)| over the n*m
// free entries. Symmetric maps are measured over the m(m+1)/2 upper-triangle
// coordinates; invert_spd reports the factor in (dV) = |W|^{-(m+1)} (dW),
// i.e. what converts a density of V into a density of W = V^{-1}.

#include <span>
#include <vector>

#include "mmv/matrix_core.hpp"

namespace mmv {

struct BlockMap {
  MatrixBlock block;
  double log_jac = 0.0;
};

struct SpdMap {
  SpdMatrix matrix;
  double log_jac = 0.0;
};

// R = T (I + T'T)^{-1/2}; log_jac = -((n+m+1)/2) ln|I + T'T|.
BlockMap t_to_r(const MatrixBlock& t);

// T = R (I - R'R)^{-1/2}; log_jac = -((n+m+1)/2) ln|I - R'R|.
// Throws DomainError when I - R'R is not positive definite.
BlockMap r_to_t(const MatrixBlock& r);

// F = (I - U)^{-1} - I. Requires U and I - U SPD.
SpdMatrix beta1_to_beta2(const SpdMatrix& u);
// U = I - (I + F)^{-1}. Requires F SPD.
SpdMatrix beta2_to_beta1(const SpdMatrix& f);
// ln|dF/dU| = -(m+1) ln|I - U| for the map above.
double beta1_to_beta2_log_jac(const SpdMatrix& u);

// W = V^{-1}; log_jac = -(m+1) ln|W|.
SpdMap invert_spd(const SpdMatrix& v);

enum class CompanionFamily { t, beta2, pearson2, beta1 };

struct BlockDecomposition {
  SpdMatrix anchor;                // X0'X0
  std::vector<Matrix> companions;  // T_i, F_i, R_i or U_i
};

// Anchor-normalized companions of spherical blocks X0..Xk:
//   t        T_i = X_i V0^{-1/2}
//   beta2    F_i = T_i'T_i
//   pearson2 R_i = T_i (I + T_i'T_i)^{-1/2}
//   beta1    U_i = R_i'R_i = I - (I + F_i)^{-1}
// Throws DomainError when X0'X0 is not SPD.
BlockDecomposition decompose_blocks(std::span<const MatrixBlock> blocks, CompanionFamily family);

struct TrimatricDecomposition {
  SpdMatrix w;     // W0 + X2'X2
  MatrixBlock t;   // X1 W0^{-1/2}
  MatrixBlock r;   // X2 W^{-1/2}
};

TrimatricDecomposition trimatric_decompose(const MatrixBlock& x0, const MatrixBlock& x1,
                                           const MatrixBlock& x2);

}  // namespace mmv
