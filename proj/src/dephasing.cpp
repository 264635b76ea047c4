#include "qee/dephasing.hpp"

#include <cmath>
#include <sstream>

namespace qee {

namespace {

ComplexMatrix validated_coupling(ComplexMatrix m, Index d_env, double tol, const char* what) {
  require_hermitian(m, tol, what);
  if (m.rows() != d_env) {
    std::ostringstream os;
    os << what << ": dimension " << m.rows() << " != d_env = " << d_env;
    throw ValidationError(os.str());
  }
  return m;
}

void require_finite_energy(double e, const char* what) {
  if (!std::isfinite(e)) {
    throw ValidationError(std::string(what) + ": non-finite energy");
  }
}

}  // namespace

PureDephasingModel::PureDephasingModel(double eps0_meV, double eps1_meV, ComplexMatrix h_env,
                                       ComplexMatrix v0, ComplexMatrix v1, const Tolerances& tol)
    : eps0_(eps0_meV),
      eps1_(eps1_meV),
      h_env_((require_hermitian(h_env, tol.operator_hermiticity, "PureDephasingModel: H_env"),
              std::move(h_env))),
      v0_(validated_coupling(std::move(v0), h_env_.rows(), tol.operator_hermiticity,
                             "PureDephasingModel: V0")),
      v1_(validated_coupling(std::move(v1), h_env_.rows(), tol.operator_hermiticity,
                             "PureDephasingModel: V1")),
      gen0_(h_env_ + v0_, tol.operator_hermiticity),
      gen1_(h_env_ + v1_, tol.operator_hermiticity) {
  require_finite_energy(eps0_, "PureDephasingModel: eps0");
  require_finite_energy(eps1_, "PureDephasingModel: eps1");
}

ConditionalPropagator conditional_propagators(const PureDephasingModel& model, double t) {
  if (!std::isfinite(t)) {
    throw ValidationError("conditional_propagators: non-finite time");
  }
  const double hbar = constants::hbar_meV_ps;
  ConditionalPropagator prop;
  prop.time = t;
  prop.w0 = std::exp(Complex(0.0, -model.eps0() * t / hbar)) *
            model.generator0().unitary_at(t, hbar);
  prop.w1 = std::exp(Complex(0.0, -model.eps1() * t / hbar)) *
            model.generator1().unitary_at(t, hbar);
  return prop;
}

ConditionalEnvStates conditional_env_states(const PureDephasingModel& model,
                                            const DensityOperator& r0, double tau) {
  if (r0.dim() != model.d_env()) {
    std::ostringstream os;
    os << "conditional_env_states: initial state dimension " << r0.dim()
       << " != d_env = " << model.d_env();
    throw ValidationError(os.str());
  }
  const ConditionalPropagator prop = conditional_propagators(model, tau);
  ComplexMatrix r01 = prop.w0 * r0.matrix() * prop.w1.adjoint();
  ComplexMatrix r00 = prop.w0 * r0.matrix() * prop.w0.adjoint();
  ComplexMatrix r11 = prop.w1 * r0.matrix() * prop.w1.adjoint();
  // Make the rounding-level asymmetry of the conjugation exactly zero; the
  // spectrum is preserved by the unitaries, so skip the spectral re-check.
  r00 = Complex(0.5, 0.0) * (r00 + ComplexMatrix(r00.adjoint()));
  r11 = Complex(0.5, 0.0) * (r11 + ComplexMatrix(r11.adjoint()));
  return ConditionalEnvStates{
      DensityOperator::trusted(std::move(r00)),
      DensityOperator::trusted(std::move(r11)),
      r01,
      r01.adjoint(),
      tau,
  };
}

SeparabilityVerdict separability_check(const PureDephasingModel& model,
                                       const DensityOperator& r0, double tau, double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw ValidationError("separability_check: tolerance must be positive and finite");
  }
  const ConditionalEnvStates states = conditional_env_states(model, r0, tau);
  const double distance = (states.r00.matrix() - states.r11.matrix()).norm();
  const double threshold = tol * std::sqrt(static_cast<double>(model.d_env()));
  return SeparabilityVerdict{distance <= threshold, distance};
}

CommutationVerdict commuting_blind_spot_check(const PureDephasingModel& model, double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw ValidationError("commuting_blind_spot_check: tolerance must be positive and finite");
  }
  const ComplexMatrix g0 = model.h_env() + model.v0();
  const ComplexMatrix g1 = model.h_env() + model.v1();
  const double norm = commutator_norm(g0, g1);
  return CommutationVerdict{norm <= tol, norm};
}

std::optional<double> identity_coupling_shift(const PureDephasingModel& model,
                                              const Tolerances& tol) {
  const Index d = model.d_env();
  const double c = model.v0().trace().real() / static_cast<double>(d);
  const ComplexMatrix residue =
      model.v0() - c * ComplexMatrix::Identity(d, d);
  // Scale-aware: an operator with ||V0|| ~ 1 meV qualifies only if it is an
  // identity multiple to near machine precision.
  const double scale = std::max(1.0, std::abs(c));
  if (residue.cwiseAbs().maxCoeff() <= tol.operator_hermiticity * scale) {
    return c;
  }
  return std::nullopt;
}

PureDephasingModel normalize_asymmetric(const PureDephasingModel& model, const Tolerances& tol) {
  const std::optional<double> shift = identity_coupling_shift(model, tol);
  if (!shift) {
    throw ValidationError(
        "normalize_asymmetric: V0 is not a multiple of the identity; the zero-coupling "
        "reference branch does not apply to this model");
  }
  const Index d = model.d_env();
  // V0 = c*I is a branch-0 energy offset: absorb c into eps0 so the rewritten
  // model generates bit-for-bit the same physics with V0 = 0.
  return PureDephasingModel(model.eps0() + *shift, model.eps1(), model.h_env(),
                            ComplexMatrix::Zero(d, d), model.v1(), tol);
}

}  // namespace qee
