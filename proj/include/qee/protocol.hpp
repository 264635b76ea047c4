#pragma once

#include <optional>
#include <vector>

#include "qee/dephasing.hpp"

namespace qee {

// Joint qubit (x) environment state with block access. `time` records when
// the state was produced so downstream steps can label their outputs.
struct JointState {
  DensityOperator state;
  BipartiteIndex idx;
  double time = 0.0;

  ComplexMatrix block(Index q, Index qp) const {
    return state.matrix().block(q * idx.d_env, qp * idx.d_env, idx.d_env, idx.d_env);
  }
};

// Qubit pointer/superposition states used by the protocol.
DensityOperator qubit_ground();  // |0><0|
DensityOperator qubit_plus();    // |+><+|
DensityOperator qubit_minus();   // |-><-|

// Evolves the product state qubit_state (x) r0 for time t under the
// pure-dephasing dynamics: block (q,q') becomes qubit(q,q') w_q r0 w_q'^dag.
JointState evolve_joint(const PureDephasingModel& model, const DensityOperator& qubit_state,
                        const DensityOperator& r0, double t);

// Outcome of the projective {|+>, |->} measurement on the qubit. A branch
// whose probability is below tol.branch_floor is dropped (its state is an
// ill-conditioned 0/0 and its weighted contribution is exactly 0).
struct MeasurementBranches {
  double p_plus = 0.0;
  double p_minus = 0.0;
  std::optional<DensityOperator> r_plus;
  std::optional<DensityOperator> r_minus;
  double tau = 0.0;
};

MeasurementBranches measure_plus_minus(const JointState& sigma_tau,
                                       const Tolerances& tol = kDefaultTol);

// Qubit coherence <0|.|1> of the joint state grown from qubit_state (x) env
// for time t; used by both protocol arms.
Complex evolved_coherence(const PureDephasingModel& model, const DensityOperator& qubit_state,
                          const DensityOperator& env, double t);

// Coherence of the unmeasured run: rho01(t) = (1/2) tr[w0(t) r0 w1(t)^dag].
Complex plain_coherence(const PureDephasingModel& model, const DensityOperator& r0, double t);

// Outcome-averaged coherence a time t after the intermediate measurement.
// Direct route: re-prepare each branch, evolve the joint state, read the
// coherence off the reduced qubit state, combine as p+ rho+ - p- rho-.
Complex averaged_coherence_direct(const PureDephasingModel& model,
                                  const MeasurementBranches& branches, double t);

// Closed route to the same quantity, bypassing the measurement bookkeeping:
// (1/4) tr[w0(t) (R00(tau) + R11(tau)) w1(t)^dag].
Complex averaged_coherence_closed(const PureDephasingModel& model, const DensityOperator& r0,
                                  double tau, double t);

// Reference run: keep the qubit in |0> for tau, apply a pi/2 pulse that
// replaces it by |+>, evolve for t, read the coherence. Equals
// (1/2) tr[w0(t) R00(tau) w1(t)^dag].
Complex comparative_coherence(const PureDephasingModel& model, const DensityOperator& r0,
                              double tau, double t);

// Full protocol output on a time grid at fixed tau.
struct WitnessTrace {
  double tau = 0.0;
  bool simplified = false;
  std::vector<double> times;
  std::vector<Complex> rho_av;   // outcome-averaged coherence at tau + t
  std::vector<Complex> rho_ref;  // reference coherence (comparative or plain)
  std::vector<Complex> delta;    // rho_av - rho_ref
  MeasurementBranches branches;
};

// Runs the protocol at one tau over the given times. Every point is computed
// along the operational route and checked against the closed form to
// tol.cross_check; any disagreement throws NumericalError. With `simplified`
// set, the model must have V0 = 0 (identity multiples are normalized away)
// and [H_env, r0] = 0; the reference is then the unmeasured coherence
// rho01(t), which removes the comparative run from the experiment.
WitnessTrace witness(const PureDephasingModel& model, const DensityOperator& r0, double tau,
                     const std::vector<double>& times, bool simplified = false,
                     const Tolerances& tol = kDefaultTol);

double max_abs_delta(const WitnessTrace& trace);

// Default evaluation grid: t = 0, then geometric spacing through the fast
// initial decoherence, then linear coverage out to t_max.
std::vector<double> default_time_grid(double t_max = 10.0, int n = 200);

}  // namespace qee
