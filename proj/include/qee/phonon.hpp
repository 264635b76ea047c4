#pragma once

#include <functional>

#include "qee/linalg.hpp"
#include "qee/quadrature.hpp"

namespace qee {

// Charge qubit coupled to a bulk acoustic-phonon bath via the deformation
// potential, with an anisotropic Gaussian carrier wave function (in-plane
// size l_perp, growth-direction size l_z). The coupling acts in one qubit
// branch only, so the simplified protocol applies. Defaults are a GaAs
// quantum dot.
struct PhononBathParams {
  double sigma_diff_eV = 9.0;          // deformation-potential difference sigma_e - sigma_h
  double mass_density_kg_m3 = 5360.0;  // crystal density
  double sound_speed_m_s = 5100.0;     // longitudinal sound speed
  double l_perp_nm = 5.0;
  double l_z_nm = 1.0;
  double temperature_K = 0.0;
};

// Per-unit-frequency coupling weight of the bath after the 1/(hbar omega)^2
// down-weighting of the bare couplings: J(omega) = A * omega * G(omega) with
// G the angular average of the squared form factor. omega in rad/ps, J in ps.
struct SpectralKernel {
  std::function<double(double)> j;
  double omega_cutoff = 0.0;       // rad/ps; 20 c / l_z covers the form factor
  double amplitude = 0.0;          // A in ps^2
  double total_weight = 0.0;       // integral of J over [0, cutoff]
  double sound_speed_nm_ps = 0.0;
  double l_perp_nm = 0.0;
  double l_z_nm = 0.0;
};

// Bose-Einstein occupation of a mode at omega (rad/ps); exactly 0 at T = 0.
double bose_occupation(double omega_rad_ps, double temperature_K);

SpectralKernel build_kernel(const PhononBathParams& params,
                            const Tolerances& tol = kDefaultTol);

// phi(t) = integral of J(omega) sin(omega t); the coherent phase picked up by
// the displaced bath. Odd in t, exactly 0 at t = 0.
double phase_integral(const SpectralKernel& kernel, double t,
                      const Tolerances& tol = kDefaultTol);

// kappa(t, T) = integral of J(omega) (1 - cos omega t) (2 n(omega, T) + 1);
// the decoherence exponent. Nonnegative, increasing in T.
double decoherence_integral(const SpectralKernel& kernel, double t, double temperature_K,
                            const Tolerances& tol = kDefaultTol);

// t -> infinity limit of kappa: integral of J (2n + 1). The oscillatory term
// averages out, so the coherence saturates at exp(-plateau) instead of dying.
double decoherence_plateau(const SpectralKernel& kernel, double temperature_K,
                           const Tolerances& tol = kDefaultTol);

// Unmeasured coherence rho01(t) = (1/2) e^{i phi(t)} e^{-kappa(t,T)}, global
// exciton-energy/polaron phase dropped.
Complex phonon_plain_coherence(const PhononBathParams& params, double t,
                               const Tolerances& tol = kDefaultTol);

// Closed-form witness for the phonon bath, same dropped global phase:
// delta rho(tau, t) = (1/4) e^{i phi(t)} e^{-kappa(t,T)} (e^{2 i phi(tau)} - 1).
// Exactly 0 at tau = 0.
Complex phonon_witness(const PhononBathParams& params, double tau, double t,
                       const Tolerances& tol = kDefaultTol);

// Caches the kernel so a sweep evaluates many (tau, t, T) points without
// rebuilding it; immutable after construction, safe to share across threads.
class PhononWitnessEvaluator {
 public:
  explicit PhononWitnessEvaluator(const PhononBathParams& params,
                                  const Tolerances& tol = kDefaultTol);

  const SpectralKernel& kernel() const { return kernel_; }
  const PhononBathParams& params() const { return params_; }

  double phase(double t) const;
  double decoherence(double t, double temperature_K) const;
  double plateau(double temperature_K) const;

  // Assembles the closed forms from precomputed integrals, so callers can
  // reuse phi(tau) across a temperature grid.
  static Complex witness_from(double phi_t, double kappa_t, double phi_tau);
  static Complex plain_coherence_from(double phi_t, double kappa_t);

  Complex witness(double tau, double t, double temperature_K) const;
  Complex plain_coherence(double t, double temperature_K) const;

 private:
  PhononBathParams params_;
  Tolerances tol_;
  SpectralKernel kernel_;
};

// Verifies the continuum formulas against the generic spin-bath machinery on
// a small discretized bath: n_modes harmonic modes sampled from J, truncated
// at fock_cutoff quanta each, run through the full measurement protocol, and
// compared against the exact displaced-oscillator solution of the same
// discrete model (which keeps its polaron phase). The gap is pure Fock-space
// truncation error and must shrink as the cutoff grows.
struct CrossCheckResult {
  Complex generic;  // full protocol on the truncated model
  Complex closed;   // exact discrete-mode closed form
  double gap = 0.0; // |generic - closed|
};

CrossCheckResult discretized_cross_check(const PhononBathParams& params, int n_modes,
                                         int fock_cutoff, double tau, double t,
                                         const Tolerances& tol = kDefaultTol);

}  // namespace qee
