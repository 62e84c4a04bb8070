#pragma once

// Constructive samplers. Every family is drawn by sampling a spherical
// N x m matrix X = (X_0', ..., X_k')' and reducing it through the Gram and
// anchor-normalization maps, so sampling needs integer row counts n_i >= m.
//
// Draw i of a batch always uses RngStream(seed, i), which makes a batch
// independent of how many threads produced it.

#include <cstdint>
#include <vector>

#include "mmv/densities.hpp"
#include "mmv/kernels.hpp"
#include "mmv/rng.hpp"

namespace mmv {

using Draw = std::vector<Matrix>;

// One N x m spherical draw. kernel.dim must equal N * m.
MatrixBlock sample_spherical(int n, int m, const KernelSpec& kernel, RngStream& rng);

// One observation of `family`, matrices ordered as in family_layout.
// `kernel` generates the underlying spherical matrix and must have
// dim = family_kernel_dim(family, shape); the kernel-free families accept
// any admissible kernel because their law does not depend on it.
Draw sample_one(Family family, const ExtendedShape& shape, const KernelSpec& kernel, int split,
                RngStream& rng);

std::vector<Draw> sample_family(Family family, const ExtendedShape& shape,
                                const KernelSpec& kernel, int split, std::size_t n_draws,
                                std::uint64_t seed);

// Uses the model's kernel, or a gaussian kernel for kernel-free families.
std::vector<Draw> sample_family(const FamilyModel& model, std::size_t n_draws, std::uint64_t seed);

// Worker count for parallel loops: MMV_THREADS if set and positive,
// otherwise the hardware concurrency.
unsigned worker_threads();

}  // namespace mmv
