#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qee/constants.hpp"
#include "qee/errors.hpp"

namespace qee {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Largest elementwise |A - A^dag|; zero for exactly Hermitian input.
double hermiticity_defect(const ComplexMatrix& a);

bool all_finite(const ComplexMatrix& a);
void require_finite(const ComplexMatrix& a, const char* what);
void require_square(const ComplexMatrix& a, const char* what);
void require_hermitian(const ComplexMatrix& a, double tol, const char* what);

// Kronecker product, row-major over the first factor's indices.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Frobenius norm of AB - BA. Rejects mismatched or non-square inputs.
double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);

// Index bookkeeping for the qubit (x) environment product space.
// Qubit factor on the left: joint index = q * d_env + e.
struct BipartiteIndex {
  Index d_env = 1;
  static constexpr Index d_qubit = 2;

  Index total() const { return d_qubit * d_env; }
  Index joint(Index q, Index e) const { return q * d_env + e; }
};

// Density operator with validated invariants: Hermitian to tol.hermiticity,
// unit trace to tol.trace_one, eigenvalues >= -tol.positivity_slack.
class DensityOperator {
 public:
  explicit DensityOperator(ComplexMatrix m, const Tolerances& tol = kDefaultTol);

  // Skips the O(d^3) spectral positivity check; hermiticity and trace are
  // still enforced. Only for states obtained from a validated state by an
  // operation that cannot leave the positive cone (unitary conjugation,
  // convex combination).
  static DensityOperator trusted(ComplexMatrix m, const Tolerances& tol = kDefaultTol);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  struct SkipSpectralCheck {};
  DensityOperator(SkipSpectralCheck, ComplexMatrix m, const Tolerances& tol);

  ComplexMatrix m_;
};

// Eigenpairs of a Hermitian operator, computed once so that propagators at
// many times reuse the same decomposition.
class HermitianEigensystem {
 public:
  explicit HermitianEigensystem(const ComplexMatrix& h,
                                double herm_tol = kDefaultTol.operator_hermiticity);

  // exp(-i H t / hbar); unitary by construction.
  ComplexMatrix unitary_at(double t, double hbar = 1.0) const;

  const RealVector& eigenvalues() const { return evals_; }
  const ComplexMatrix& eigenvectors() const { return evecs_; }
  Index dim() const { return evals_.size(); }

 private:
  RealVector evals_;
  ComplexMatrix evecs_;
};

// exp(-i H t / hbar) for Hermitian H via one eigendecomposition.
ComplexMatrix expm_hermitian_unitary(const ComplexMatrix& h, double t, double hbar = 1.0);

// Trace out the environment (resp. qubit) factor of a joint state.
DensityOperator partial_trace_env(const DensityOperator& sigma, const BipartiteIndex& idx);
DensityOperator partial_trace_qubit(const DensityOperator& sigma, const BipartiteIndex& idx);

// Partial transpose over the qubit factor: swaps the two off-diagonal
// d_env x d_env blocks without transposing within them.
ComplexMatrix partial_transpose_qubit(const ComplexMatrix& m, const BipartiteIndex& idx);

// Negativity (||sigma^{T_Q}||_1 - 1) / 2. Exact zero on separable states up
// to rounding, strictly positive iff the partial transpose has a negative
// eigenvalue. Values within tol.negativity_zero of zero are clamped to 0.
double negativity(const DensityOperator& sigma, const BipartiteIndex& idx,
                  const Tolerances& tol = kDefaultTol);

}  // namespace qee
