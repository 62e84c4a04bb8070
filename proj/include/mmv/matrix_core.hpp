#pragma once

// Dense symmetric and rectangular matrix utilities shared by every module.
//
// All routines are free functions over Eigen expressions and are templated on
// the scalar type. Symmetric positive definiteness is decided in one place
// (spd_spectrum) against a floor relative to the largest eigenvalue, so every
// module sees the same notion of "SPD".

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "mmv/errors.hpp"

namespace mmv {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

// Symmetric positive definite m x m matrix (V0, W0, F_i, U_i, scale matrices).
using SpdMatrix = Matrix;
// Rectangular n_i x m block (X_i, T_i, R_i).
using MatrixBlock = Matrix;

// Relative positive-definiteness threshold: an eigenvalue at or below
// floor * (largest eigenvalue) disqualifies a matrix. Also the relative
// symmetry tolerance.
template <typename Scalar>
constexpr Scalar spd_rel_floor() {
  return std::max<Scalar>(Scalar(1e-12), 16 * std::numeric_limits<Scalar>::epsilon());
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() != s.cols()) return false;
  const Scalar scale = s.cwiseAbs().maxCoeff();
  const Scalar asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  return asym <= spd_rel_floor<Scalar>() * scale;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& s) {
  return (s + s.transpose()) / typename Derived::Scalar(2);
}

template <typename Scalar>
struct Spectrum {
  VectorX<Scalar> values;   // ascending
  MatrixX<Scalar> vectors;  // orthonormal columns
};

template <typename Derived>
Spectrum<typename Derived::Scalar> sym_spectrum(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(symmetrize(s));
  if (es.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

template <typename Scalar>
bool spectrum_is_spd(const VectorX<Scalar>& values) {
  if (values.size() == 0) return false;
  const Scalar top = values.maxCoeff();
  if (!(top > Scalar(0))) return false;
  return values.minCoeff() > spd_rel_floor<Scalar>() * top;
}

template <typename Scalar>
std::string describe_eigenvalue(const char* what, Scalar value) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": smallest eigenvalue " << value << " is below the positive-definite floor";
  return os.str();
}

}  // namespace detail

// Spectrum of an SPD matrix, or nullopt when the matrix is not square,
// not symmetric, or has an eigenvalue at or below the relative floor.
template <typename Derived>
std::optional<Spectrum<typename Derived::Scalar>> try_spd_spectrum(
    const Eigen::MatrixBase<Derived>& s) {
  if (s.rows() == 0 || !is_symmetric(s)) return std::nullopt;
  if (!s.allFinite()) return std::nullopt;
  auto sp = sym_spectrum(s);
  if (!detail::spectrum_is_spd(sp.values)) return std::nullopt;
  return sp;
}

// Spectrum of an SPD matrix; throws DomainError for asymmetric input and
// NearSingularError (carrying the offending eigenvalue) below the floor.
template <typename Derived>
Spectrum<typename Derived::Scalar> spd_spectrum(const Eigen::MatrixBase<Derived>& s,
                                                 const char* what = "matrix") {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix");
  }
  if (!s.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
  if (!is_symmetric(s)) throw DomainError(std::string(what) + ": not symmetric");
  auto sp = sym_spectrum(s);
  if (!detail::spectrum_is_spd(sp.values)) {
    throw NearSingularError(detail::describe_eigenvalue(what, sp.values.minCoeff()),
                            static_cast<double>(sp.values.minCoeff()));
  }
  return sp;
}

template <typename Derived>
bool is_spd(const Eigen::MatrixBase<Derived>& s) {
  return try_spd_spectrum(s).has_value();
}

// Q f(Lambda) Q' for a scalar function applied to the eigenvalues.
template <typename Scalar, typename F>
MatrixX<Scalar> spectral_apply(const Spectrum<Scalar>& sp, F&& f) {
  VectorX<Scalar> mapped = sp.values.unaryExpr(std::forward<F>(f));
  MatrixX<Scalar> out = sp.vectors * mapped.asDiagonal() * sp.vectors.transpose();
  return symmetrize(out);
}

// Unique SPD square root P with P P = S.
template <typename Derived>
MatrixX<typename Derived::Scalar> sym_sqrt(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  return spectral_apply(spd_spectrum(s, "sym_sqrt"), [](Scalar x) { return std::sqrt(x); });
}

// S^{-1/2}, the inverse of the symmetric root.
template <typename Derived>
MatrixX<typename Derived::Scalar> inv_sqrt(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  return spectral_apply(spd_spectrum(s, "inv_sqrt"),
                        [](Scalar x) { return Scalar(1) / std::sqrt(x); });
}

template <typename Derived>
MatrixX<typename Derived::Scalar> spd_inverse(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  return spectral_apply(spd_spectrum(s, "spd_inverse"), [](Scalar x) { return Scalar(1) / x; });
}

// ln|S| as the sum of log-eigenvalues.
template <typename Derived>
typename Derived::Scalar logdet(const Eigen::MatrixBase<Derived>& s) {
  return spd_spectrum(s, "logdet").values.array().log().sum();
}

template <typename Derived>
std::optional<typename Derived::Scalar> try_logdet(const Eigen::MatrixBase<Derived>& s) {
  auto sp = try_spd_spectrum(s);
  if (!sp) return std::nullopt;
  return sp->values.array().log().sum();
}

// ln|det A| for a general square matrix via partial-pivot LU.
template <typename Derived>
typename Derived::Scalar logabsdet(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw ShapeError("logabsdet: expected a square matrix");
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(a.eval());
  return lu.matrixLU().diagonal().cwiseAbs().array().log().sum();
}

// X'X, symmetrized. Positive semidefinite; SPD only when X has full column rank.
template <typename Derived>
MatrixX<typename Derived::Scalar> gram(const Eigen::MatrixBase<Derived>& x) {
  return symmetrize(x.transpose() * x);
}

template <typename Scalar = double>
MatrixX<Scalar> identity(Eigen::Index m) {
  return MatrixX<Scalar>::Identity(m, m);
}

}  // namespace mmv
