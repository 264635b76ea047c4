#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qee/protocol.hpp"
#include "qee/random.hpp"

namespace qee {

// Recipe for a seeded random spin-bath model: the environment is n_spins
// qubits (d_env = 2^n_spins), couplings are GUE draws rescaled to spectral
// radius coupling_scale_meV, and the initial environment state is thermal
// with respect to H_env. thermal_beta is in 1/meV; 0 means infinite
// temperature and yields exactly R0 = I / d_env. Identical recipes produce
// bitwise-identical models.
struct ModelRecipe {
  std::uint64_t seed = 0;
  int n_spins = 2;
  double coupling_scale_meV = 1.0;
  bool asymmetric = false;  // forces V0 = 0 (coupling only in one branch)
  double thermal_beta = 0.0;
};

struct GeneratedModel {
  PureDephasingModel model;
  DensityOperator r0;
};

GeneratedModel generate_model(const ModelRecipe& recipe);

// Thermal environment state exp(-beta H) / Z from a precomputed eigensystem.
// beta = 0 returns exactly I/d; temperature 0 returns the normalized
// projector onto the ground space.
DensityOperator thermal_state(const HermitianEigensystem& h_env, double beta_per_meV);
DensityOperator thermal_state_at_temperature(const HermitianEigensystem& h_env,
                                             double temperature_K);

// Ground-truth certification of one (model, r0, tau) instance: the witness
// amplitude over the time grid against the negativity of the actual joint
// state. d_env is capped at 64 so the 2*d_env eigenproblem stays exact-ish
// and fast.
enum class Verdict {
  kSound,      // witness certifies entanglement, negativity confirms it
  kBlindspot,  // entangled but invisible: commuting conditional generators
  kSeparable,  // no entanglement, witness correctly silent
};

const char* to_string(Verdict v);

struct Certificate {
  double witness_max = 0.0;  // max_t |delta rho(tau, t)|
  double negativity = 0.0;   // of the joint state at tau
  Verdict verdict = Verdict::kSeparable;
};

// Throws SoundnessViolation if the witness fires on a state whose negativity
// is zero: that combination falsifies the implementation.
Certificate certify_witness(const PureDephasingModel& model, const DensityOperator& r0,
                            double tau, const std::vector<double>& times,
                            const Tolerances& tol = kDefaultTol);

// Constructs a model that is provably invisible to the witness yet entangles
// the qubit with its environment: commuting conditional generators (H_env =
// 0, V0 = 0) with an initial state that fails to commute with V1. R0 is
// redrawn until ||[V1, R0]||_F > 0.1 (at most 1000 attempts).
GeneratedModel build_blind_spot_model(int n_spins, std::uint64_t seed);

// Compares the exact criterion's two faces on one instance: negativity of
// the joint state vs distance between the conditional environment states.
struct CriterionEquivalence {
  bool agree = false;
  double negativity = 0.0;
  double distance = 0.0;
};

CriterionEquivalence separability_criterion_equivalence(const PureDephasingModel& model,
                                                        const DensityOperator& r0, double tau,
                                                        const Tolerances& tol = kDefaultTol);

}  // namespace qee
