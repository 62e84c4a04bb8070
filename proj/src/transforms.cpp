#include "mmv/transforms.hpp"

#include <string>

namespace mmv {

namespace {

void require_square(const Matrix& s, const char* what) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix");
  }
}

}  // namespace

BlockMap t_to_r(const MatrixBlock& t) {
  const auto n = t.rows();
  const auto m = t.cols();
  const Matrix gram_plus = identity(m) + gram(t);
  const auto sp = spd_spectrum(gram_plus, "t_to_r: I + T'T");
  const Matrix root_inv = spectral_apply(sp, [](double x) { return 1.0 / std::sqrt(x); });
  const double ld = sp.values.array().log().sum();
  return {t * root_inv, -0.5 * static_cast<double>(n + m + 1) * ld};
}

BlockMap r_to_t(const MatrixBlock& r) {
  const auto n = r.rows();
  const auto m = r.cols();
  const Matrix complement = identity(m) - gram(r);
  auto sp = try_spd_spectrum(complement);
  if (!sp) throw DomainError("r_to_t: block outside unit ball (I - R'R not positive definite)");
  const Matrix root_inv = spectral_apply(*sp, [](double x) { return 1.0 / std::sqrt(x); });
  const double ld = sp->values.array().log().sum();
  return {r * root_inv, -0.5 * static_cast<double>(n + m + 1) * ld};
}

SpdMatrix beta1_to_beta2(const SpdMatrix& u) {
  require_square(u, "beta1_to_beta2");
  const auto sp = spd_spectrum(u, "beta1_to_beta2: U");
  if (!try_spd_spectrum(identity(u.rows()) - u)) {
    throw NearSingularError("beta1_to_beta2: I - U is not positive definite",
                            1.0 - sp.values.maxCoeff());
  }
  return spectral_apply(sp, [](double x) { return x / (1.0 - x); });
}

SpdMatrix beta2_to_beta1(const SpdMatrix& f) {
  require_square(f, "beta2_to_beta1");
  const auto sp = spd_spectrum(f, "beta2_to_beta1: F");
  return spectral_apply(sp, [](double x) { return x / (1.0 + x); });
}

double beta1_to_beta2_log_jac(const SpdMatrix& u) {
  require_square(u, "beta1_to_beta2_log_jac");
  const double m = static_cast<double>(u.rows());
  return -(m + 1.0) * logdet(identity(u.rows()) - u);
}

SpdMap invert_spd(const SpdMatrix& v) {
  require_square(v, "invert_spd");
  const auto sp = spd_spectrum(v, "invert_spd");
  const double m = static_cast<double>(v.rows());
  const Matrix w = spectral_apply(sp, [](double x) { return 1.0 / x; });
  // ln|W| = -ln|V|
  const double ld_w = -sp.values.array().log().sum();
  return {w, -(m + 1.0) * ld_w};
}

BlockDecomposition decompose_blocks(std::span<const MatrixBlock> blocks, CompanionFamily family) {
  if (blocks.size() < 2) throw ShapeError("decompose_blocks: need an anchor and at least one companion");
  const auto m = blocks[0].cols();
  for (const auto& b : blocks) {
    if (b.cols() != m) throw ShapeError("decompose_blocks: blocks must share the column count m");
  }
  if (blocks[0].rows() < m) throw ShapeError("decompose_blocks: anchor block needs n0 >= m");

  BlockDecomposition out;
  out.anchor = gram(blocks[0]);
  const Matrix anchor_inv_root = inv_sqrt(out.anchor);
  out.companions.reserve(blocks.size() - 1);
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const Matrix t = blocks[i] * anchor_inv_root;
    switch (family) {
      case CompanionFamily::t:
        out.companions.push_back(t);
        break;
      case CompanionFamily::beta2:
        out.companions.push_back(gram(t));
        break;
      case CompanionFamily::pearson2:
        out.companions.push_back(t_to_r(t).block);
        break;
      case CompanionFamily::beta1:
        out.companions.push_back(gram(t_to_r(t).block));
        break;
    }
  }
  return out;
}

TrimatricDecomposition trimatric_decompose(const MatrixBlock& x0, const MatrixBlock& x1,
                                           const MatrixBlock& x2) {
  const auto m = x0.cols();
  if (x1.cols() != m || x2.cols() != m) {
    throw ShapeError("trimatric_decompose: blocks must share the column count m");
  }
  if (x0.rows() < m) throw ShapeError("trimatric_decompose: anchor block needs n0 >= m");
  const Matrix w0 = gram(x0);
  TrimatricDecomposition out;
  out.t = x1 * inv_sqrt(w0);
  out.w = symmetrize(w0 + gram(x2));
  out.r = x2 * inv_sqrt(out.w);
  return out;
}

}  // namespace mmv
