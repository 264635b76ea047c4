#pragma once

namespace qee {

// Internal unit system: energy meV, time ps, length nm, temperature K.
// Angular frequencies are rad/ps, so hbar*omega is in meV.
namespace constants {

inline constexpr double hbar_meV_ps = 0.6582119569;  // reduced Planck constant
inline constexpr double k_B_meV_per_K = 0.08617333;  // Boltzmann constant

// SI values, used once when reducing material parameters to internal units.
inline constexpr double hbar_SI = 1.054571817e-34;  // J s
inline constexpr double eV_SI = 1.602176634e-19;    // J

}  // namespace constants

// Every tolerance the library uses, in one record so nothing is buried as a
// magic number. The first block is structural validation; the second block
// holds the verdict thresholds a run may override (--tolerance NAME=VALUE);
// the third is internal consistency between redundant computation routes.
struct Tolerances {
  // Structural validation.
  double hermiticity = 1e-12;           // max |A - A^dag| elementwise, states
  double operator_hermiticity = 1e-10;  // same, Hamiltonian-like operators
  double trace_one = 1e-12;             // |tr(rho) - 1|
  double positivity_slack = 1e-10;      // state eigenvalues may dip to -this
  double unitarity = 1e-10;             // max |U U^dag - I| elementwise

  // Verdict thresholds (overridable per run).
  double witness_nonzero = 1e-8;   // |delta rho| above this flags entanglement
  double negativity_zero = 1e-10;  // negativity at or below this: separable
  double separability = 1e-10;     // ||R00-R11||_F scale (x sqrt(d_env))
  double commutator_zero = 1e-10;  // commuting-interaction blind-spot test
  double quadrature_rel = 1e-8;    // relative target for spectral integrals

  // Internal consistency.
  double cross_check = 1e-10;  // direct-vs-closed agreement in the protocol
  double branch_floor = 1e-14; // measurement branches below this are dropped
};

inline constexpr Tolerances kDefaultTol{};

}  // namespace qee
