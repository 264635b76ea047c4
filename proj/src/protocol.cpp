#include "qee/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qee {

namespace {

DensityOperator qubit_state_2x2(double c00, Complex c01, double c11) {
  ComplexMatrix m(2, 2);
  m << Complex(c00, 0.0), c01, std::conj(c01), Complex(c11, 0.0);
  return DensityOperator(std::move(m));
}

void require_env_match(const PureDephasingModel& model, const DensityOperator& env,
                       const char* what) {
  if (env.dim() != model.d_env()) {
    std::ostringstream os;
    os << what << ": environment dimension " << env.dim() << " != d_env = " << model.d_env();
    throw ValidationError(os.str());
  }
}

void require_time_grid(const std::vector<double>& times, const char* what) {
  if (times.empty()) {
    throw ValidationError(std::string(what) + ": empty time grid");
  }
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) {
      throw ValidationError(std::string(what) + ": times must be finite and nonnegative");
    }
  }
}

}  // namespace

DensityOperator qubit_ground() { return qubit_state_2x2(1.0, Complex(0.0, 0.0), 0.0); }
DensityOperator qubit_plus() { return qubit_state_2x2(0.5, Complex(0.5, 0.0), 0.5); }
DensityOperator qubit_minus() { return qubit_state_2x2(0.5, Complex(-0.5, 0.0), 0.5); }

JointState evolve_joint(const PureDephasingModel& model, const DensityOperator& qubit_state,
                        const DensityOperator& r0, double t) {
  if (qubit_state.dim() != 2) {
    throw ValidationError("evolve_joint: qubit state must be 2x2");
  }
  require_env_match(model, r0, "evolve_joint");
  const BipartiteIndex idx{model.d_env()};
  const ConditionalPropagator prop = conditional_propagators(model, t);
  const ComplexMatrix& q = qubit_state.matrix();

  const Index d = idx.d_env;
  ComplexMatrix joint(idx.total(), idx.total());
  ComplexMatrix diag0 = prop.w0 * r0.matrix() * prop.w0.adjoint();
  ComplexMatrix diag1 = prop.w1 * r0.matrix() * prop.w1.adjoint();
  // Exactly Hermitian blocks keep the joint state inside the validator's
  // hermiticity budget independent of d_env.
  joint.block(0, 0, d, d) = q(0, 0).real() * 0.5 * (diag0 + ComplexMatrix(diag0.adjoint()));
  joint.block(d, d, d, d) = q(1, 1).real() * 0.5 * (diag1 + ComplexMatrix(diag1.adjoint()));
  joint.block(0, d, d, d) = q(0, 1) * (prop.w0 * r0.matrix() * prop.w1.adjoint());
  joint.block(d, 0, d, d) = joint.block(0, d, d, d).adjoint();
  // Populations are conserved and each block is a unitary conjugation of the
  // validated r0, so positivity cannot be lost: trusted construction.
  return JointState{DensityOperator::trusted(std::move(joint)), idx, t};
}

MeasurementBranches measure_plus_minus(const JointState& sigma_tau, const Tolerances& tol) {
  if (sigma_tau.state.dim() != sigma_tau.idx.total()) {
    throw ValidationError("measure_plus_minus: joint state / index mismatch");
  }
  const ComplexMatrix b00 = sigma_tau.block(0, 0);
  const ComplexMatrix b01 = sigma_tau.block(0, 1);
  const ComplexMatrix b10 = sigma_tau.block(1, 0);
  const ComplexMatrix b11 = sigma_tau.block(1, 1);

  const double diag = b00.trace().real() + b11.trace().real();
  const double cross = (b01.trace() + b10.trace()).real();
  double p_plus = 0.5 * (diag + cross);
  double p_minus = 0.5 * (diag - cross);

  const double slack = 1e-12;
  if (p_plus < -slack || p_minus < -slack || p_plus > 1.0 + slack || p_minus > 1.0 + slack) {
    std::ostringstream os;
    os << "measure_plus_minus: branch probabilities (" << p_plus << ", " << p_minus
       << ") outside [0, 1]";
    throw NumericalError(os.str());
  }
  p_plus = std::clamp(p_plus, 0.0, 1.0);
  p_minus = std::clamp(p_minus, 0.0, 1.0);

  MeasurementBranches out;
  out.p_plus = p_plus;
  out.p_minus = p_minus;
  out.tau = sigma_tau.time;

  const auto branch_state = [&](double sign, double p) -> std::optional<DensityOperator> {
    if (p < tol.branch_floor) {
      return std::nullopt;
    }
    ComplexMatrix num = b00 + b11 + sign * (b01 + b10);
    num = Complex(0.5 / p, 0.0) * Complex(0.5, 0.0) * (num + ComplexMatrix(num.adjoint()));
    // Normalizing a near-extinct branch amplifies numerator rounding by 1/p,
    // which can push exact-zero eigenvalues past the positivity slack even
    // though the p-weighted contribution downstream stays accurate (the
    // division cancels). Spectral validation therefore only runs where it is
    // well conditioned.
    if (p >= 1e-3) {
      return DensityOperator(std::move(num), tol);
    }
    return DensityOperator::trusted(std::move(num), tol);
  };
  out.r_plus = branch_state(+1.0, p_plus);
  out.r_minus = branch_state(-1.0, p_minus);
  return out;
}

Complex evolved_coherence(const PureDephasingModel& model, const DensityOperator& qubit_state,
                          const DensityOperator& env, double t) {
  const JointState evolved = evolve_joint(model, qubit_state, env, t);
  const DensityOperator reduced = partial_trace_env(evolved.state, evolved.idx);
  return reduced.matrix()(0, 1);
}

Complex plain_coherence(const PureDephasingModel& model, const DensityOperator& r0, double t) {
  require_env_match(model, r0, "plain_coherence");
  const ConditionalPropagator prop = conditional_propagators(model, t);
  return 0.5 * (prop.w0 * r0.matrix() * prop.w1.adjoint()).trace();
}

Complex averaged_coherence_direct(const PureDephasingModel& model,
                                  const MeasurementBranches& branches, double t) {
  Complex acc(0.0, 0.0);
  if (branches.r_plus) {
    acc += branches.p_plus * evolved_coherence(model, qubit_plus(), *branches.r_plus, t);
  }
  if (branches.r_minus) {
    // The |-> branch coherence carries its own sign through the (0,1) block;
    // the outcome average weighs the branches with opposite signs on top.
    acc -= branches.p_minus * evolved_coherence(model, qubit_minus(), *branches.r_minus, t);
  }
  return acc;
}

Complex averaged_coherence_closed(const PureDephasingModel& model, const DensityOperator& r0,
                                  double tau, double t) {
  const ConditionalEnvStates states = conditional_env_states(model, r0, tau);
  const ConditionalPropagator prop = conditional_propagators(model, t);
  return 0.25 *
         (prop.w0 * (states.r00.matrix() + states.r11.matrix()) * prop.w1.adjoint()).trace();
}

Complex comparative_coherence(const PureDephasingModel& model, const DensityOperator& r0,
                              double tau, double t) {
  // Qubit parked in |0> for tau: the joint state stays a product, so the
  // pulse that swaps in |+> acts on the extracted environment state.
  const JointState parked = evolve_joint(model, qubit_ground(), r0, tau);
  const DensityOperator env_after_wait = partial_trace_qubit(parked.state, parked.idx);
  return evolved_coherence(model, qubit_plus(), env_after_wait, t);
}

WitnessTrace witness(const PureDephasingModel& model, const DensityOperator& r0, double tau,
                     const std::vector<double>& times, bool simplified, const Tolerances& tol) {
  require_env_match(model, r0, "witness");
  require_time_grid(times, "witness");
  if (!std::isfinite(tau) || tau < 0.0) {
    throw ValidationError("witness: tau must be finite and nonnegative");
  }

  const PureDephasingModel* active = &model;
  std::optional<PureDephasingModel> normalized;
  if (simplified) {
    if (!identity_coupling_shift(model, tol)) {
      throw ValidationError(
          "witness: simplified scheme requires V0 = 0 (or an identity multiple); this "
          "model couples the environment in both qubit branches");
    }
    normalized.emplace(normalize_asymmetric(model, tol));
    active = &normalized.value();
    const double stationarity = commutator_norm(active->h_env(), r0.matrix());
    if (stationarity > tol.commutator_zero) {
      std::ostringstream os;
      os << "witness: simplified scheme requires a stationary environment state, but "
         << "||[H_env, r0]||_F = " << stationarity << " exceeds " << tol.commutator_zero;
      throw ValidationError(os.str());
    }
  }

  WitnessTrace trace;
  trace.tau = tau;
  trace.simplified = simplified;
  trace.times = times;

  const JointState sigma_tau = evolve_joint(*active, qubit_plus(), r0, tau);
  trace.branches = measure_plus_minus(sigma_tau, tol);

  const ConditionalEnvStates states = conditional_env_states(*active, r0, tau);
  const ComplexMatrix diff = states.r11.matrix() - states.r00.matrix();

  trace.rho_av.reserve(times.size());
  trace.rho_ref.reserve(times.size());
  trace.delta.reserve(times.size());

  for (double t : times) {
    const Complex av = averaged_coherence_direct(*active, trace.branches, t);

    const ConditionalPropagator prop = conditional_propagators(*active, t);
    const Complex av_closed =
        0.25 * (prop.w0 * (states.r00.matrix() + states.r11.matrix()) * prop.w1.adjoint()).trace();
    if (std::abs(av - av_closed) > tol.cross_check) {
      std::ostringstream os;
      os << "witness: measurement-averaged coherence disagrees with its closed form at t = "
         << t << " (|direct - closed| = " << std::abs(av - av_closed) << ")";
      throw NumericalError(os.str());
    }
    if (std::abs(av) > 0.5 + 1e-12) {
      std::ostringstream os;
      os << "witness: averaged coherence magnitude " << std::abs(av) << " exceeds 1/2 at t = " << t;
      throw NumericalError(os.str());
    }

    const Complex ref = simplified ? plain_coherence(*active, r0, t)
                                   : comparative_coherence(*active, r0, tau, t);
    const Complex delta = av - ref;

    if (!simplified) {
      // Independent closed route to the witness itself.
      const Complex delta_closed = 0.25 * (prop.w0 * diff * prop.w1.adjoint()).trace();
      if (std::abs(delta - delta_closed) > tol.cross_check) {
        std::ostringstream os;
        os << "witness: delta disagrees with its closed form at t = " << t
           << " (|direct - closed| = " << std::abs(delta - delta_closed) << ")";
        throw NumericalError(os.str());
      }
    }

    trace.rho_av.push_back(av);
    trace.rho_ref.push_back(ref);
    trace.delta.push_back(delta);
  }
  return trace;
}

double max_abs_delta(const WitnessTrace& trace) {
  double m = 0.0;
  for (const Complex& d : trace.delta) {
    m = std::max(m, std::abs(d));
  }
  return m;
}

std::vector<double> default_time_grid(double t_max, int n) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw ValidationError("default_time_grid: t_max must be positive and finite");
  }
  if (n < 4) {
    throw ValidationError("default_time_grid: need at least 4 points");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  grid.push_back(0.0);
  const int n_geo = n / 2 - 1;
  const double geo_lo = t_max * 1e-3;
  const double geo_hi = t_max * 0.1;
  for (int k = 0; k < n_geo; ++k) {
    const double f = n_geo > 1 ? static_cast<double>(k) / static_cast<double>(n_geo - 1) : 0.0;
    grid.push_back(geo_lo * std::pow(geo_hi / geo_lo, f));
  }
  const int n_lin = n - 1 - n_geo;
  for (int k = 1; k <= n_lin; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n_lin);
    grid.push_back(geo_hi + f * (t_max - geo_hi));
  }
  return grid;
}

}  // namespace qee
