#pragma once

// Counter-based random streams. A stream is identified by (seed, stream_id);
// the same pair yields the same sequence on every platform because both the
// bit generator (Philox4x32-10) and the variate transforms are implemented
// here rather than taken from <random>, whose distributions are
// implementation-defined.

#include <array>
#include <cstdint>
#include <optional>

namespace mmv {

// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Gamma with the given shape and unit scale (Marsaglia-Tsang).
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // number of unused 64-bit halves in buffer_
  std::optional<double> spare_normal_;
};

}  // namespace mmv
