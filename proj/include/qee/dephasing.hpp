#pragma once

#include <optional>

#include "qee/linalg.hpp"

namespace qee {

// Pure-dephasing qubit-environment model. The qubit populations are conserved;
// each qubit pointer state |i> drives the environment with its own generator
// H_env + V_i, so the joint dynamics is fully described by the two conditional
// propagators w_i(t) = exp(-i eps_i t / hbar) exp(-i (H_env + V_i) t / hbar).
//
// Energies are in meV, times in ps; this layer is where hbar enters the
// dynamics. Both conditional generators are diagonalized eagerly at
// construction and the model is immutable afterwards, so it is safe to share
// across threads.
class PureDephasingModel {
 public:
  PureDephasingModel(double eps0_meV, double eps1_meV, ComplexMatrix h_env,
                     ComplexMatrix v0, ComplexMatrix v1,
                     const Tolerances& tol = kDefaultTol);

  Index d_env() const { return h_env_.rows(); }
  double eps0() const { return eps0_; }
  double eps1() const { return eps1_; }
  const ComplexMatrix& h_env() const { return h_env_; }
  const ComplexMatrix& v0() const { return v0_; }
  const ComplexMatrix& v1() const { return v1_; }
  const HermitianEigensystem& generator0() const { return gen0_; }  // H_env + V0
  const HermitianEigensystem& generator1() const { return gen1_; }  // H_env + V1

 private:
  double eps0_, eps1_;
  ComplexMatrix h_env_, v0_, v1_;
  HermitianEigensystem gen0_, gen1_;
};

// The two conditional environment propagators at one time, including the
// qubit free-phase factors exp(-i eps_i t / hbar).
struct ConditionalPropagator {
  ComplexMatrix w0, w1;
  double time = 0.0;
};

ConditionalPropagator conditional_propagators(const PureDephasingModel& model, double t);

// Environment blocks of the joint state grown from |+> (x) R0 by time tau:
// R_ij(tau) = w_i(tau) R0 w_j(tau)^dag. R10 is exactly R01^dag for Hermitian
// R0 and is materialized that way.
struct ConditionalEnvStates {
  DensityOperator r00;
  DensityOperator r11;
  ComplexMatrix r01;
  ComplexMatrix r10;
  double tau = 0.0;
};

ConditionalEnvStates conditional_env_states(const PureDephasingModel& model,
                                            const DensityOperator& r0, double tau);

// Exact separability criterion for the pure-dephasing joint state: the state
// at tau is separable iff the two pointer-conditioned environment states
// coincide, so the verdict compares distance = ||R00(tau) - R11(tau)||_F
// against tol * sqrt(d_env) (Frobenius norms of random perturbations grow
// like sqrt of the element count).
struct SeparabilityVerdict {
  bool separable = false;
  double distance = 0.0;
};

SeparabilityVerdict separability_check(const PureDephasingModel& model,
                                       const DensityOperator& r0, double tau,
                                       double tol = kDefaultTol.separability);

// Detects the witness's structural blind spot: when the two conditional
// generators commute, the averaged and comparative coherences coincide for
// every initial environment state, so entanglement generated in that regime
// is invisible to the protocol (though the exact criterion still sees it).
struct CommutationVerdict {
  bool commuting = false;
  double norm = 0.0;
};

CommutationVerdict commuting_blind_spot_check(const PureDephasingModel& model,
                                              double tol = kDefaultTol.commutator_zero);

// If V0 is a multiple c*I of the identity, returns c; otherwise nullopt.
std::optional<double> identity_coupling_shift(const PureDephasingModel& model,
                                              const Tolerances& tol = kDefaultTol);

// Rewrites a model whose V0 = c*I into the physically identical V0 = 0 form
// (the shift moves into a phase common to both branches, where it cancels
// from every reported quantity). Rejects models with any other V0.
PureDephasingModel normalize_asymmetric(const PureDephasingModel& model,
                                        const Tolerances& tol = kDefaultTol);

}  // namespace qee
