#include "mmv/densities.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmv/special_fn.hpp"

namespace mmv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double half_m1(int m) { return 0.5 * (m + 1); }

void require_spd_shape(const Matrix& s, int m, const char* what) {
  if (s.rows() != m || s.cols() != m) {
    std::ostringstream os;
    os << what << ": expected " << m << "x" << m << ", got " << s.rows() << "x" << s.cols();
    throw ShapeError(os.str());
  }
}

int block_rows(double param, const char* what) {
  const double n = 2.0 * param;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 || rounded < 1.0) {
    std::ostringstream os;
    os << what << ": block parameter " << param << " is not a half-integer row count";
    throw ShapeError(os.str());
  }
  return static_cast<int>(rounded);
}

void require_block_shape(const Matrix& b, double param, int m, const char* what) {
  const int rows = block_rows(param, what);
  if (b.rows() != rows || b.cols() != m) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << m << " block, got " << b.rows() << "x"
       << b.cols();
    throw ShapeError(os.str());
  }
}

void require_kernel_dim(const KernelSpec& kernel, double dim, const char* what) {
  if (std::abs(kernel.dim - dim) > 1e-9 * std::max(1.0, dim)) {
    std::ostringstream os;
    os << what << ": kernel built for dimension " << kernel.dim << " but the shape needs " << dim;
    throw ShapeError(os.str());
  }
}

void require_companion_count(std::size_t count, const ExtendedShape& shape, const char* what) {
  if (shape.k() < 1) throw ShapeError(std::string(what) + ": needs k >= 1 companions");
  if (static_cast<int>(count) != shape.k()) {
    std::ostringstream os;
    os << what << ": shape has k = " << shape.k() << " but " << count << " companions given";
    throw ShapeError(os.str());
  }
}

// trace(A B) for symmetric A, B.
double trace_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

// (I - B)^{-1} B for SPD B with I - B SPD, or nullopt.
std::optional<Matrix> odds_matrix(const SpdMatrix& b) {
  auto sp = try_spd_spectrum(identity(b.rows()) - b);
  if (!sp) return std::nullopt;
  Matrix inv = spectral_apply(*sp, [](double x) { return 1.0 / x; });
  return symmetrize(inv * b);
}

double ln_mv_gamma_sum(int m, std::span<const double> params) {
  double acc = 0.0;
  for (double p : params) acc += ln_mv_gamma(m, p);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExtendedShape

double ExtendedShape::a_star() const {
  double s = a0;
  for (double ai : a) s += ai;
  return s;
}

std::vector<double> ExtendedShape::all_params() const {
  std::vector<double> out;
  out.reserve(a.size() + 1);
  out.push_back(a0);
  out.insert(out.end(), a.begin(), a.end());
  return out;
}

std::optional<std::vector<int>> ExtendedShape::integer_view() const {
  std::vector<int> n;
  for (double p : all_params()) {
    const double twice = 2.0 * p;
    const double rounded = std::round(twice);
    if (std::abs(twice - rounded) > 1e-12 || rounded < 1.0) return std::nullopt;
    n.push_back(static_cast<int>(rounded));
  }
  return n;
}

void ExtendedShape::validate() const {
  if (m < 1) throw DomainError("shape: m must be a positive integer");
  const double bound = 0.5 * (m - 1);
  for (double p : all_params()) {
    if (!(p > bound) || !std::isfinite(p)) {
      std::ostringstream os;
      os.precision(17);
      os << "shape: parameter " << p << " must exceed (m-1)/2 = " << bound;
      throw DomainError(os.str());
    }
  }
}

ExtendedShape ExtendedShape::from_degrees(int m, std::span<const int> n) {
  if (n.empty()) throw ShapeError("shape: need at least n0");
  ExtendedShape s;
  s.m = m;
  s.a0 = 0.5 * n[0];
  for (std::size_t i = 1; i < n.size(); ++i) s.a.push_back(0.5 * n[i]);
  s.validate();
  return s;
}

ExtendedShape ExtendedShape::from_params(int m, double a0, std::vector<double> a) {
  ExtendedShape s;
  s.m = m;
  s.a0 = a0;
  s.a = std::move(a);
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Elliptical

double logpdf_elliptical(const MatrixBlock& z, const MatrixBlock& mu, const SpdMatrix& sigma,
                         const SpdMatrix& theta, const KernelSpec& kernel) {
  const auto n = z.rows();
  const auto m = z.cols();
  if (mu.rows() != n || mu.cols() != m) throw ShapeError("logpdf_elliptical: mu shape mismatch");
  if (sigma.rows() != n || sigma.cols() != n) {
    throw ShapeError("logpdf_elliptical: sigma must be N x N");
  }
  if (theta.rows() != m || theta.cols() != m) {
    throw ShapeError("logpdf_elliptical: theta must be m x m");
  }
  require_kernel_dim(kernel, static_cast<double>(n * m), "logpdf_elliptical");
  const auto sp_sigma = spd_spectrum(sigma, "logpdf_elliptical: sigma");
  const auto sp_theta = spd_spectrum(theta, "logpdf_elliptical: theta");
  const Matrix sigma_inv = spectral_apply(sp_sigma, [](double x) { return 1.0 / x; });
  const Matrix theta_inv = spectral_apply(sp_theta, [](double x) { return 1.0 / x; });
  const Matrix centered = z - mu;
  const double quad_form = (sigma_inv * centered * theta_inv).cwiseProduct(centered).sum();
  const double ld_sigma = sp_sigma.values.array().log().sum();
  const double ld_theta = sp_theta.values.array().log().sum();
  return -0.5 * static_cast<double>(m) * ld_sigma - 0.5 * static_cast<double>(n) * ld_theta +
         log_h(kernel, std::max(0.0, quad_form));
}

// ---------------------------------------------------------------------------
// Generalised Wishart and its inverted variant

namespace {

struct ScaleTerms {
  double log_det = 0.0;
  Matrix inverse;
};

ScaleTerms scale_terms(const ScaleSet* scales, std::size_t i, int m) {
  if (scales == nullptr) return {0.0, identity(m)};
  const SpdMatrix& s = scales->sigma[i];
  require_spd_shape(s, m, "scale matrix");
  const auto sp = spd_spectrum(s, "scale matrix");
  return {sp.values.array().log().sum(), spectral_apply(sp, [](double x) { return 1.0 / x; })};
}

// Shared body of the generalised Wishart and generalised Wishart-inverted
// Wishart densities. Matrices at index >= split enter inverted.
double gen_wishart_impl(std::span<const SpdMatrix> mats, std::size_t split,
                        const ExtendedShape& shape, const ScaleSet* scales,
                        const KernelSpec& kernel, const char* what) {
  shape.validate();
  const int m = shape.m;
  const auto params = shape.all_params();
  if (mats.size() != params.size()) {
    std::ostringstream os;
    os << what << ": shape has " << params.size() << " parameters but " << mats.size()
       << " matrices given";
    throw ShapeError(os.str());
  }
  if (scales != nullptr && scales->sigma.size() != params.size()) {
    throw ShapeError(std::string(what) + ": scale count does not match the number of matrices");
  }
  require_kernel_dim(kernel, 2.0 * m * shape.a_star(), what);

  double acc = m * shape.a_star() * kLnPi;
  double kernel_arg = 0.0;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    require_spd_shape(mats[i], m, what);
    const auto st = scale_terms(scales, i, m);
    const double p = params[i];
    auto sp = try_spd_spectrum(mats[i]);
    if (!sp) return kNegInf;
    const double ld = sp->values.array().log().sum();
    acc -= ln_mv_gamma(m, p) + p * st.log_det;
    if (i < split) {
      acc += (p - half_m1(m)) * ld;
      kernel_arg += trace_product(st.inverse, mats[i]);
    } else {
      acc += -(p + half_m1(m)) * ld;
      const Matrix inv = spectral_apply(*sp, [](double x) { return 1.0 / x; });
      kernel_arg += trace_product(st.inverse, inv);
    }
  }
  return acc + log_h(kernel, std::max(0.0, kernel_arg));
}

}  // namespace

double logpdf_gen_wishart(std::span<const SpdMatrix> v, const ExtendedShape& shape,
                          const ScaleSet* scales, const KernelSpec& kernel) {
  return gen_wishart_impl(v, v.size(), shape, scales, kernel, "logpdf_gen_wishart");
}

// ---------------------------------------------------------------------------
// Combination determinant

std::optional<double> combination_logdet(std::span<const SpdMatrix> b) {
  if (b.empty()) throw ShapeError("combination_logdet: need at least one matrix");
  const auto m = b[0].rows();
  Matrix total = identity(m);
  double ld_complements = 0.0;
  for (const auto& bi : b) {
    if (bi.rows() != m || bi.cols() != m) throw ShapeError("combination_logdet: shape mismatch");
    const Matrix complement = identity(m) - bi;
    auto sp = try_spd_spectrum(complement);
    if (!sp) return std::nullopt;
    ld_complements += sp->values.array().log().sum();
    const Matrix inv = spectral_apply(*sp, [](double x) { return 1.0 / x; });
    total += symmetrize(inv * bi);
  }
  auto ld_total = try_logdet(total);
  if (!ld_total) return std::nullopt;
  return *ld_total + ld_complements;
}

Matrix combination_matrix(std::span<const SpdMatrix> b) {
  if (b.empty()) throw ShapeError("combination_matrix: need at least one matrix");
  const auto m = b[0].rows();
  const auto k = b.size();
  Matrix product = identity(m);
  for (std::size_t i = 0; i < k; ++i) product = product * (identity(m) - b[i]);
  Matrix sum = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < k; ++i) {
    Matrix term = identity(m);
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) term = term * (identity(m) - b[j]);
    }
    sum += term * b[i];
  }
  return product + sum;
}

// ---------------------------------------------------------------------------
// Wishart-companion joints and their marginals

namespace {

const char* companion_name(CompanionFamily family) {
  switch (family) {
    case CompanionFamily::t:
      return "t";
    case CompanionFamily::beta2:
      return "beta2";
    case CompanionFamily::pearson2:
      return "pearson2";
    case CompanionFamily::beta1:
      return "beta1";
  }
  return "?";
}

bool is_block_family(CompanionFamily family) {
  return family == CompanionFamily::t || family == CompanionFamily::pearson2;
}

// Everything the joint and the marginal need from the companions:
// M = I + sum of the per-family odds terms, and the family's own power terms.
struct CompanionTerms {
  Matrix mix;              // M
  double power_terms = 0;  // joint-density powers of |F|, |U|, |I - R'R|, |I - U|
  std::vector<double> ld_complement;  // ln|I - B_i| for pearson2 / beta1
  std::vector<double> ld_self;        // ln|F_i| or ln|U_i|
};

std::optional<CompanionTerms> companion_terms(CompanionFamily family,
                                              std::span<const Matrix> comps,
                                              const ExtendedShape& shape, const char* what) {
  const int m = shape.m;
  require_companion_count(comps.size(), shape, what);
  CompanionTerms out;
  out.mix = identity(m);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Matrix& c = comps[i];
    const double ai = shape.a[i];
    switch (family) {
      case CompanionFamily::t: {
        require_block_shape(c, ai, m, what);
        out.mix += gram(c);
        break;
      }
      case CompanionFamily::beta2: {
        require_spd_shape(c, m, what);
        auto ld = try_logdet(c);
        if (!ld) return std::nullopt;
        out.ld_self.push_back(*ld);
        out.mix += c;
        out.power_terms += (ai - half_m1(m)) * *ld;
        break;
      }
      case CompanionFamily::pearson2: {
        require_block_shape(c, ai, m, what);
        const Matrix b = gram(c);
        auto ld_comp = try_logdet(Matrix(identity(m) - b));
        if (!ld_comp) return std::nullopt;
        auto odds = odds_matrix(b);
        if (!odds) return std::nullopt;
        out.ld_complement.push_back(*ld_comp);
        out.mix += *odds;
        out.power_terms += -(ai + half_m1(m)) * *ld_comp;
        break;
      }
      case CompanionFamily::beta1: {
        require_spd_shape(c, m, what);
        auto ld = try_logdet(c);
        auto ld_comp = try_logdet(Matrix(identity(m) - c));
        if (!ld || !ld_comp) return std::nullopt;
        auto odds = odds_matrix(c);
        if (!odds) return std::nullopt;
        out.ld_self.push_back(*ld);
        out.ld_complement.push_back(*ld_comp);
        out.mix += *odds;
        // |U|^{a_i-(m+1)/2} |I-U|^{-a_i-(m+1)/2}
        out.power_terms += (ai - half_m1(m)) * *ld - (ai + half_m1(m)) * *ld_comp;
        break;
      }
    }
  }
  return out;
}

}  // namespace

double logpdf_wishart_companion(CompanionFamily family, const SpdMatrix& anchor,
                                std::span<const Matrix> companions, const ExtendedShape& shape,
                                const KernelSpec& kernel) {
  const char* what = "logpdf_wishart_companion";
  shape.validate();
  const int m = shape.m;
  require_spd_shape(anchor, m, what);
  require_kernel_dim(kernel, 2.0 * m * shape.a_star(), what);
  auto terms = companion_terms(family, companions, shape, what);
  if (!terms) return kNegInf;
  auto ld_anchor = try_logdet(anchor);
  if (!ld_anchor) return kNegInf;

  double constant;
  if (is_block_family(family)) {
    constant = m * shape.a0 * kLnPi - ln_mv_gamma(m, shape.a0);
  } else {
    const auto params = shape.all_params();
    constant = m * shape.a_star() * kLnPi - ln_mv_gamma_sum(m, params);
  }
  const double arg = trace_product(anchor, terms->mix);
  return constant + (shape.a_star() - half_m1(m)) * *ld_anchor + terms->power_terms +
         log_h(kernel, std::max(0.0, arg));
}

double logpdf_marginal(CompanionFamily family, std::span<const Matrix> companions,
                       const ExtendedShape& shape) {
  const char* what = "logpdf_marginal";
  shape.validate();
  const int m = shape.m;
  const double a_star = shape.a_star();
  auto terms = companion_terms(family, companions, shape, what);
  if (!terms) return kNegInf;

  switch (family) {
    case CompanionFamily::t: {
      auto ld_mix = try_logdet(terms->mix);
      if (!ld_mix) return kNegInf;
      return ln_mv_gamma(m, a_star) - m * (a_star - shape.a0) * kLnPi - ln_mv_gamma(m, shape.a0) -
             a_star * *ld_mix;
    }
    case CompanionFamily::beta2: {
      auto ld_mix = try_logdet(terms->mix);
      if (!ld_mix) return kNegInf;
      return ln_mv_gamma(m, a_star) - ln_mv_gamma_sum(m, shape.all_params()) +
             terms->power_terms - a_star * *ld_mix;
    }
    case CompanionFamily::pearson2:
    case CompanionFamily::beta1: {
      std::vector<SpdMatrix> b;
      b.reserve(companions.size());
      for (const auto& c : companions) {
        b.push_back(family == CompanionFamily::pearson2 ? gram(c) : c);
      }
      auto comb = combination_logdet(b);
      if (!comb) return kNegInf;
      double acc;
      if (family == CompanionFamily::pearson2) {
        acc = ln_mv_gamma(m, a_star) - m * (a_star - shape.a0) * kLnPi - ln_mv_gamma(m, shape.a0);
      } else {
        acc = ln_mv_gamma(m, a_star) - ln_mv_gamma_sum(m, shape.all_params());
      }
      acc -= a_star * *comb;
      for (std::size_t i = 0; i < b.size(); ++i) {
        const double ai = shape.a[i];
        // |I - B_i|^{(n* - n_i - m - 1)/2}
        acc += (a_star - ai - half_m1(m)) * terms->ld_complement[i];
        if (family == CompanionFamily::beta1) acc += (ai - half_m1(m)) * terms->ld_self[i];
      }
      return acc;
    }
  }
  throw ShapeError(std::string(what) + ": unknown family " + companion_name(family));
}

// ---------------------------------------------------------------------------
// Trimatric

double logpdf_trimatric(TriForm form, const SpdMatrix& w, const Matrix& c1, const Matrix& c2,
                        const ExtendedShape& shape, const KernelSpec& kernel) {
  const char* what = "logpdf_trimatric";
  shape.validate();
  if (shape.k() != 2) throw ShapeError(std::string(what) + ": needs k = 2");
  const int m = shape.m;
  const double a0 = shape.a0, a1 = shape.a[0], a2 = shape.a[1];
  require_spd_shape(w, m, what);
  require_kernel_dim(kernel, 2.0 * m * shape.a_star(), what);

  auto sp_w = try_spd_spectrum(w);
  if (!sp_w) return kNegInf;
  const double ld_w = sp_w->values.array().log().sum();
  const Matrix w_root = spectral_apply(*sp_w, [](double x) { return std::sqrt(x); });

  Matrix inner;       // T'T or F
  Matrix complement;  // I - R'R or I - U
  double acc;
  if (form == TriForm::wtp2) {
    require_block_shape(c1, a1, m, what);
    require_block_shape(c2, a2, m, what);
    inner = gram(c1);
    complement = identity(m) - gram(c2);
    acc = m * a0 * kLnPi - ln_mv_gamma(m, a0);
  } else {
    require_spd_shape(c1, m, what);
    require_spd_shape(c2, m, what);
    auto ld_f = try_logdet(c1);
    auto ld_u = try_logdet(c2);
    if (!ld_f || !ld_u) return kNegInf;
    inner = c1;
    complement = identity(m) - c2;
    const std::array<double, 3> params = {a0, a1, a2};
    acc = m * shape.a_star() * kLnPi - ln_mv_gamma_sum(m, params) + (a1 - half_m1(m)) * *ld_f +
          (a2 - half_m1(m)) * *ld_u;
  }
  auto ld_comp = try_logdet(complement);
  if (!ld_comp) return kNegInf;
  acc += (shape.a_star() - half_m1(m)) * ld_w + (a0 + a1 - half_m1(m)) * *ld_comp;
  // tr W0 + tr X1'X1 + tr X2'X2 = tr W + tr (I - R'R) W^{1/2} T'T W^{1/2}
  const double arg = w.trace() + trace_product(complement, w_root * inner * w_root);
  return acc + log_h(kernel, std::max(0.0, arg));
}

// ---------------------------------------------------------------------------
// Inverted

double logpdf_inverted(InvertedKind kind, std::span<const SpdMatrix> head,
                       std::span<const SpdMatrix> tail, const ExtendedShape& shape,
                       const ScaleSet* scales, const KernelSpec* kernel) {
  const char* what = "logpdf_inverted";
  std::vector<SpdMatrix> all(head.begin(), head.end());
  all.insert(all.end(), tail.begin(), tail.end());
  if (kind == InvertedKind::gw_inv_wishart) {
    if (kernel == nullptr) throw ShapeError(std::string(what) + ": gw_inv_wishart needs a kernel");
    return gen_wishart_impl(all, head.size(), shape, scales, *kernel, what);
  }

  shape.validate();
  const int m = shape.m;
  if (static_cast<int>(all.size()) != shape.k()) {
    std::ostringstream os;
    os << what << ": shape has k = " << shape.k() << " but " << all.size() << " matrices given";
    throw ShapeError(os.str());
  }
  const double a_star = shape.a_star();
  double acc = ln_mv_gamma(m, a_star) - ln_mv_gamma_sum(m, shape.all_params());
  Matrix mix = identity(m);
  for (std::size_t i = 0; i < all.size(); ++i) {
    require_spd_shape(all[i], m, what);
    auto sp = try_spd_spectrum(all[i]);
    if (!sp) return kNegInf;
    const double ld = sp->values.array().log().sum();
    const double ai = shape.a[i];
    if (i < head.size()) {
      acc += (ai - half_m1(m)) * ld;
      mix += all[i];
    } else {
      acc += -(ai + half_m1(m)) * ld;
      mix += spectral_apply(*sp, [](double x) { return 1.0 / x; });
    }
  }
  auto ld_mix = try_logdet(mix);
  if (!ld_mix) return kNegInf;
  return acc - a_star * *ld_mix;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

constexpr std::array<Family, 13> kFamilies = {
    Family::gen_wishart,   Family::wishart_t,        Family::t,
    Family::wishart_beta2, Family::beta2,            Family::wishart_pearson2,
    Family::pearson2,      Family::wishart_beta1,    Family::beta1,
    Family::tri_wtp2,      Family::tri_wb2b1,        Family::gw_inv_wishart,
    Family::beta2_inv};

constexpr std::array<std::string_view, 13> kFamilyNames = {
    "gen-wishart",   "wishart-t",        "t",
    "wishart-beta2", "beta2",            "wishart-pearson2",
    "pearson2",      "wishart-beta1",    "beta1",
    "tri-wtp2",      "tri-wb2b1",        "gw-inv-wishart",
    "beta2-inv"};

CompanionFamily companion_of(Family f) {
  switch (f) {
    case Family::wishart_t:
    case Family::t:
      return CompanionFamily::t;
    case Family::wishart_beta2:
    case Family::beta2:
      return CompanionFamily::beta2;
    case Family::wishart_pearson2:
    case Family::pearson2:
      return CompanionFamily::pearson2;
    case Family::wishart_beta1:
    case Family::beta1:
      return CompanionFamily::beta1;
    default:
      throw ShapeError("not a companion family");
  }
}

}  // namespace

std::span<const Family> all_families() { return kFamilies; }

std::string_view family_name(Family family) {
  return kFamilyNames[static_cast<std::size_t>(family)];
}

std::optional<Family> family_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFamilies.size(); ++i) {
    if (kFamilyNames[i] == name) return kFamilies[i];
  }
  return std::nullopt;
}

bool family_needs_kernel(Family family) {
  switch (family) {
    case Family::t:
    case Family::beta2:
    case Family::pearson2:
    case Family::beta1:
    case Family::beta2_inv:
      return false;
    default:
      return true;
  }
}

std::vector<Component> family_layout(Family family, const ExtendedShape& shape, int split) {
  const int m = shape.m;
  const int k = shape.k();
  const char* what = "family_layout";
  std::vector<Component> out;
  auto spd = [&](ComponentKind kind = ComponentKind::spd) { out.push_back({kind, m, m}); };
  auto block = [&](ComponentKind kind, double param) {
    out.push_back({kind, block_rows(param, what), m});
  };
  auto need_companions = [&] {
    if (k < 1) throw ShapeError(std::string(family_name(family)) + ": needs k >= 1");
  };
  switch (family) {
    case Family::gen_wishart:
    case Family::gw_inv_wishart:
      if (family == Family::gw_inv_wishart && (split < 0 || split > k + 1)) {
        throw ShapeError("gw-inv-wishart: split must lie in [0, k+1]");
      }
      for (int i = 0; i <= k; ++i) spd();
      break;
    case Family::wishart_t:
    case Family::t:
      need_companions();
      if (family == Family::wishart_t) spd();
      for (double ai : shape.a) block(ComponentKind::block, ai);
      break;
    case Family::wishart_beta2:
    case Family::beta2:
      need_companions();
      if (family == Family::wishart_beta2) spd();
      for (int i = 0; i < k; ++i) spd();
      break;
    case Family::wishart_pearson2:
    case Family::pearson2:
      need_companions();
      if (family == Family::wishart_pearson2) spd();
      for (double ai : shape.a) block(ComponentKind::block_ball, ai);
      break;
    case Family::wishart_beta1:
    case Family::beta1:
      need_companions();
      if (family == Family::wishart_beta1) spd();
      for (int i = 0; i < k; ++i) spd(ComponentKind::spd_unit);
      break;
    case Family::tri_wtp2:
      if (k != 2) throw ShapeError("tri-wtp2: needs k = 2");
      spd();
      block(ComponentKind::block, shape.a[0]);
      block(ComponentKind::block_ball, shape.a[1]);
      break;
    case Family::tri_wb2b1:
      if (k != 2) throw ShapeError("tri-wb2b1: needs k = 2");
      spd();
      spd();
      spd(ComponentKind::spd_unit);
      break;
    case Family::beta2_inv:
      need_companions();
      if (split < 0 || split > k) throw ShapeError("beta2-inv: split must lie in [0, k]");
      for (int i = 0; i < k; ++i) spd();
      break;
  }
  return out;
}

double family_kernel_dim(Family /*family*/, const ExtendedShape& shape) {
  return 2.0 * shape.m * shape.a_star();
}

FamilyModel FamilyModel::make(Family family, ExtendedShape shape,
                              std::optional<KernelParams> kernel, int split) {
  shape.validate();
  FamilyModel model;
  model.family = family;
  model.split = split;
  (void)family_layout(family, shape, split);
  if (family_needs_kernel(family)) {
    model.kernel = make_kernel(kernel.value_or(KernelParams::gaussian()),
                               family_kernel_dim(family, shape));
  }
  model.shape = std::move(shape);
  return model;
}

double logpdf(const FamilyModel& model, std::span<const Matrix> draw) {
  const auto& shape = model.shape;
  const auto layout = family_layout(model.family, shape, model.split);
  if (draw.size() != layout.size()) {
    std::ostringstream os;
    os << family_name(model.family) << ": expected " << layout.size() << " matrices, got "
       << draw.size();
    throw ShapeError(os.str());
  }
  const ScaleSet* scales = model.scales ? &*model.scales : nullptr;
  const KernelSpec* kernel = model.kernel ? &*model.kernel : nullptr;
  switch (model.family) {
    case Family::gen_wishart:
      return logpdf_gen_wishart(draw, shape, scales, *kernel);
    case Family::wishart_t:
    case Family::wishart_beta2:
    case Family::wishart_pearson2:
    case Family::wishart_beta1:
      return logpdf_wishart_companion(companion_of(model.family), draw[0], draw.subspan(1), shape,
                                      *kernel);
    case Family::t:
    case Family::beta2:
    case Family::pearson2:
    case Family::beta1:
      return logpdf_marginal(companion_of(model.family), draw, shape);
    case Family::tri_wtp2:
      return logpdf_trimatric(TriForm::wtp2, draw[0], draw[1], draw[2], shape, *kernel);
    case Family::tri_wb2b1:
      return logpdf_trimatric(TriForm::wb2b1, draw[0], draw[1], draw[2], shape, *kernel);
    case Family::gw_inv_wishart:
      return logpdf_inverted(InvertedKind::gw_inv_wishart, draw.first(model.split),
                             draw.subspan(model.split), shape, scales, kernel);
    case Family::beta2_inv:
      return logpdf_inverted(InvertedKind::beta2_inv, draw.first(model.split),
                             draw.subspan(model.split), shape, nullptr, nullptr);
  }
  throw ShapeError("logpdf: unknown family");
}

}  // namespace mmv
