#include "qee/linalg.hpp"

#include <cmath>
#include <sstream>

namespace qee {

namespace {

std::string dims(const ComplexMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw ValidationError(std::string(what) + ": expected square matrix, got " + dims(a));
  }
}

void require_hermitian(const ComplexMatrix& a, double tol, const char* what) {
  require_square(a, what);
  require_finite(a, what);
  const double defect = hermiticity_defect(a);
  if (defect > tol) {
    std::ostringstream os;
    os << what << ": not Hermitian, max |A - A^dag| = " << defect << " exceeds " << tol;
    throw ValidationError(os.str());
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "commutator_norm: first operand");
  require_square(b, "commutator_norm: second operand");
  if (a.rows() != b.rows()) {
    throw ValidationError("commutator_norm: dimension mismatch " + dims(a) + " vs " + dims(b));
  }
  return (a * b - b * a).norm();
}

DensityOperator::DensityOperator(ComplexMatrix m, const Tolerances& tol)
    : DensityOperator(SkipSpectralCheck{}, std::move(m), tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.positivity_slack) {
    std::ostringstream os;
    os << "DensityOperator: negative eigenvalue " << min_eig << " below slack "
       << -tol.positivity_slack;
    throw ValidationError(os.str());
  }
}

DensityOperator::DensityOperator(SkipSpectralCheck, ComplexMatrix m, const Tolerances& tol)
    : m_(std::move(m)) {
  require_square(m_, "DensityOperator");
  require_finite(m_, "DensityOperator");
  const double defect = hermiticity_defect(m_);
  if (defect > tol.hermiticity) {
    std::ostringstream os;
    os << "DensityOperator: hermiticity defect " << defect << " exceeds " << tol.hermiticity;
    throw ValidationError(os.str());
  }
  const Complex tr = m_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace_one) {
    std::ostringstream os;
    os << "DensityOperator: trace " << tr << " differs from 1 beyond " << tol.trace_one;
    throw ValidationError(os.str());
  }
}

DensityOperator DensityOperator::trusted(ComplexMatrix m, const Tolerances& tol) {
  return DensityOperator(SkipSpectralCheck{}, std::move(m), tol);
}

HermitianEigensystem::HermitianEigensystem(const ComplexMatrix& h, double herm_tol) {
  require_hermitian(h, herm_tol, "HermitianEigensystem");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("HermitianEigensystem: eigendecomposition failed to converge");
  }
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

ComplexMatrix HermitianEigensystem::unitary_at(double t, double hbar) const {
  if (!std::isfinite(t)) {
    throw ValidationError("unitary_at: non-finite time");
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw ValidationError("unitary_at: hbar must be positive and finite");
  }
  const Index d = evals_.size();
  Eigen::VectorXcd phases(d);
  for (Index k = 0; k < d; ++k) {
    phases(k) = std::exp(Complex(0.0, -evals_(k) * t / hbar));
  }
  return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

ComplexMatrix expm_hermitian_unitary(const ComplexMatrix& h, double t, double hbar) {
  return HermitianEigensystem(h).unitary_at(t, hbar);
}

namespace {

void require_joint(const DensityOperator& sigma, const BipartiteIndex& idx, const char* what) {
  if (idx.d_env < 1) {
    throw ValidationError(std::string(what) + ": d_env must be >= 1");
  }
  if (sigma.dim() != idx.total()) {
    std::ostringstream os;
    os << what << ": state dimension " << sigma.dim() << " != 2*d_env = " << idx.total();
    throw ValidationError(os.str());
  }
}

}  // namespace

DensityOperator partial_trace_env(const DensityOperator& sigma, const BipartiteIndex& idx) {
  require_joint(sigma, idx, "partial_trace_env");
  const ComplexMatrix& m = sigma.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (Index q = 0; q < 2; ++q) {
    for (Index qp = 0; qp < 2; ++qp) {
      Complex s(0.0, 0.0);
      for (Index e = 0; e < idx.d_env; ++e) {
        s += m(idx.joint(q, e), idx.joint(qp, e));
      }
      out(q, qp) = s;
    }
  }
  // Trace and hermiticity are inherited exactly; positivity follows from the
  // positivity of the joint state, so the spectral re-check is redundant.
  return DensityOperator::trusted(std::move(out));
}

DensityOperator partial_trace_qubit(const DensityOperator& sigma, const BipartiteIndex& idx) {
  require_joint(sigma, idx, "partial_trace_qubit");
  const ComplexMatrix& m = sigma.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(idx.d_env, idx.d_env);
  for (Index q = 0; q < 2; ++q) {
    out += m.block(q * idx.d_env, q * idx.d_env, idx.d_env, idx.d_env);
  }
  return DensityOperator::trusted(std::move(out));
}

ComplexMatrix partial_transpose_qubit(const ComplexMatrix& m, const BipartiteIndex& idx) {
  require_square(m, "partial_transpose_qubit");
  if (m.rows() != idx.total()) {
    std::ostringstream os;
    os << "partial_transpose_qubit: dimension " << m.rows() << " != 2*d_env = " << idx.total();
    throw ValidationError(os.str());
  }
  const Index d = idx.d_env;
  ComplexMatrix out(m.rows(), m.cols());
  out.block(0, 0, d, d) = m.block(0, 0, d, d);
  out.block(d, d, d, d) = m.block(d, d, d, d);
  out.block(0, d, d, d) = m.block(d, 0, d, d);
  out.block(d, 0, d, d) = m.block(0, d, d, d);
  return out;
}

double negativity(const DensityOperator& sigma, const BipartiteIndex& idx,
                  const Tolerances& tol) {
  require_joint(sigma, idx, "negativity");
  const ComplexMatrix pt = partial_transpose_qubit(sigma.matrix(), idx);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(pt, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("negativity: eigendecomposition failed to converge");
  }
  const double trace_norm = es.eigenvalues().cwiseAbs().sum();
  double n = 0.5 * (trace_norm - 1.0);
  if (n < -tol.negativity_zero) {
    std::ostringstream os;
    os << "negativity: value " << n << " below -" << tol.negativity_zero
       << "; trace-one validation should make this impossible";
    throw NumericalError(os.str());
  }
  if (std::abs(n) <= tol.negativity_zero) {
    n = 0.0;
  }
  return n;
}

}  // namespace qee
