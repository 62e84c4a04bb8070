#include "mmv/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <string>
#include <thread>

#include "mmv/transforms.hpp"

namespace mmv {

MatrixBlock sample_spherical(int n, int m, const KernelSpec& kernel, RngStream& rng) {
  if (n < 1 || m < 1) throw ShapeError("sample_spherical: dimensions must be positive");
  const double dim = static_cast<double>(n) * m;
  if (std::abs(kernel.dim - dim) > 1e-9 * dim) {
    std::ostringstream os;
    os << "sample_spherical: kernel built for dimension " << kernel.dim << ", draw has " << dim;
    throw ShapeError(os.str());
  }
  MatrixBlock x(n, m);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.normal();
  }
  switch (kernel.params.family) {
    case KernelFamily::gaussian:
      break;
    case KernelFamily::pearson7: {
      // gaussian / sqrt(G), G ~ Gamma(nu/2, scale 2/nu)
      const double nu = kernel.params.nu;
      x /= std::sqrt(rng.gamma(0.5 * nu) * 2.0 / nu);
      break;
    }
    case KernelFamily::kotz: {
      const double norm = x.norm();
      x *= sample_radius(kernel, rng) / norm;
      break;
    }
  }
  return x;
}

namespace {

std::vector<int> sampling_degrees(const ExtendedShape& shape) {
  auto n = shape.integer_view();
  if (!n) throw DomainError("constructive sampling needs integer degrees of freedom");
  for (int ni : *n) {
    if (ni < shape.m) {
      std::ostringstream os;
      os << "constructive sampling needs every n_i >= m = " << shape.m << " (got " << ni << ")";
      throw DomainError(os.str());
    }
  }
  return *n;
}

std::vector<MatrixBlock> split_rows(const MatrixBlock& x, const std::vector<int>& rows) {
  std::vector<MatrixBlock> out;
  out.reserve(rows.size());
  Eigen::Index start = 0;
  for (int r : rows) {
    out.push_back(x.middleRows(start, r));
    start += r;
  }
  return out;
}

}  // namespace

Draw sample_one(Family family, const ExtendedShape& shape, const KernelSpec& kernel, int split,
                RngStream& rng) {
  const auto n = sampling_degrees(shape);
  const int m = shape.m;
  int total = 0;
  for (int ni : n) total += ni;
  const auto blocks = split_rows(sample_spherical(total, m, kernel, rng), n);

  Draw draw;
  auto companions = [&](CompanionFamily cf, bool with_anchor) {
    auto dec = decompose_blocks(blocks, cf);
    if (with_anchor) draw.push_back(std::move(dec.anchor));
    for (auto& c : dec.companions) draw.push_back(std::move(c));
  };
  switch (family) {
    case Family::gen_wishart:
    case Family::gw_inv_wishart:
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        Matrix v = gram(blocks[i]);
        if (family == Family::gw_inv_wishart && static_cast<int>(i) >= split) {
          v = invert_spd(v).matrix;
        }
        draw.push_back(std::move(v));
      }
      break;
    case Family::wishart_t:
      companions(CompanionFamily::t, true);
      break;
    case Family::t:
      companions(CompanionFamily::t, false);
      break;
    case Family::wishart_beta2:
      companions(CompanionFamily::beta2, true);
      break;
    case Family::beta2:
      companions(CompanionFamily::beta2, false);
      break;
    case Family::wishart_pearson2:
      companions(CompanionFamily::pearson2, true);
      break;
    case Family::pearson2:
      companions(CompanionFamily::pearson2, false);
      break;
    case Family::wishart_beta1:
      companions(CompanionFamily::beta1, true);
      break;
    case Family::beta1:
      companions(CompanionFamily::beta1, false);
      break;
    case Family::tri_wtp2:
    case Family::tri_wb2b1: {
      if (shape.k() != 2) throw ShapeError("trimatric sampling needs k = 2");
      auto dec = trimatric_decompose(blocks[0], blocks[1], blocks[2]);
      draw.push_back(std::move(dec.w));
      if (family == Family::tri_wtp2) {
        draw.push_back(std::move(dec.t));
        draw.push_back(std::move(dec.r));
      } else {
        draw.push_back(gram(dec.t));
        draw.push_back(gram(dec.r));
      }
      break;
    }
    case Family::beta2_inv: {
      companions(CompanionFamily::beta2, false);
      for (std::size_t i = static_cast<std::size_t>(split); i < draw.size(); ++i) {
        draw[i] = invert_spd(draw[i]).matrix;
      }
      break;
    }
  }
  return draw;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("MMV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Draw> sample_family(Family family, const ExtendedShape& shape,
                                const KernelSpec& kernel, int split, std::size_t n_draws,
                                std::uint64_t seed) {
  shape.validate();
  (void)sampling_degrees(shape);
  (void)family_layout(family, shape, split);
  std::vector<Draw> out(n_draws);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_threads(), std::max<std::size_t>(1, n_draws / 256)));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(seed, i);
      out[i] = sample_one(family, shape, kernel, split, rng);
    }
  };
  if (workers <= 1) {
    run(0, n_draws);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n_draws + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n_draws, w * chunk);
    const std::size_t end = std::min(n_draws, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        run(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<Draw> sample_family(const FamilyModel& model, std::size_t n_draws,
                                std::uint64_t seed) {
  const KernelSpec kernel = model.kernel ? *model.kernel
                                         : make_kernel(KernelParams::gaussian(),
                                                       family_kernel_dim(model.family, model.shape));
  return sample_family(model.family, model.shape, kernel, model.split, n_draws, seed);
}

}  // namespace mmv
