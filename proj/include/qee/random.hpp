#pragma once

#include <cstdint>
#include <random>

#include "qee/linalg.hpp"

namespace qee {

// Deterministic random stream. std::mt19937_64 output is pinned by the
// standard, but the distributions are not, so uniforms and Gaussians are
// derived here by hand (53-bit mantissa draw + Box-Muller) to make every
// seeded artifact bitwise reproducible across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  // Standard normal.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Random Hermitian matrix with spectral radius scaled to exactly `scale`
// (GUE-like draw: complex Gaussian entries, symmetrized).
ComplexMatrix random_hermitian(RandomStream& rng, Index d, double scale);

// Random full-rank density matrix (Wishart draw G G^dag, normalized).
DensityOperator random_density(RandomStream& rng, Index d);

// Haar-ish random unitary via QR of a complex Gaussian matrix.
ComplexMatrix random_unitary(RandomStream& rng, Index d);

}  // namespace qee
