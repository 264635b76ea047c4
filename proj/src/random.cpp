#include "qee/random.hpp"

#include <cmath>

namespace qee {

double RandomStream::uniform() {
  // Top 53 bits of the engine output, mapped to [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

ComplexMatrix random_hermitian(RandomStream& rng, Index d, double scale) {
  if (d < 1) {
    throw ValidationError("random_hermitian: dimension must be >= 1");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("random_hermitian: scale must be positive and finite");
  }
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      g(i, j) = Complex(re, im);
    }
  }
  ComplexMatrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  if (radius < 1e-300) {
    throw NumericalError("random_hermitian: degenerate draw with zero spectral radius");
  }
  h *= scale / radius;
  return h;
}

DensityOperator random_density(RandomStream& rng, Index d) {
  if (d < 1) {
    throw ValidationError("random_density: dimension must be >= 1");
  }
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      g(i, j) = Complex(re, im);
    }
  }
  ComplexMatrix w = g * g.adjoint();
  const double tr = w.trace().real();
  if (!(tr > 0.0)) {
    throw NumericalError("random_density: degenerate Wishart draw");
  }
  w /= tr;
  // Hermitize exactly so the validating constructor sees a clean state.
  w = Complex(0.5, 0.0) * (w + ComplexMatrix(w.adjoint()));
  return DensityOperator(std::move(w));
}

ComplexMatrix random_unitary(RandomStream& rng, Index d) {
  if (d < 1) {
    throw ValidationError("random_unitary: dimension must be >= 1");
  }
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  // Fix the phase ambiguity so the result is a deterministic function of g.
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    const double mag = std::abs(rkk);
    if (mag > 0.0) {
      q.col(k) *= rkk / mag;
    }
  }
  return q;
}

}  // namespace qee
