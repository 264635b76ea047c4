#include "qee/sweep.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace qee {

namespace {

void validate_grid(const std::vector<double>& v, const char* name, bool nonempty = true) {
  if (nonempty && v.empty()) {
    throw ValidationError(std::string(name) + ": grid must not be empty");
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k]) || v[k] < 0.0) {
      throw ValidationError(std::string(name) + ": grid values must be finite and nonnegative");
    }
    if (k > 0 && v[k] <= v[k - 1]) {
      throw ValidationError(std::string(name) + ": grid must be strictly increasing");
    }
  }
}

// Index-parallel dispatch: the serial lane is the reference; the OpenMP lane
// writes each result into its own preallocated slot and rethrows the
// lowest-index failure, so outputs and errors are identical between lanes.
template <typename Body>
void run_indexed(std::size_t n, int threads, const Body& body) {
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) {
      body(k);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long k = 0; k < static_cast<long>(n); ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

SweepRow spin_row(const PureDephasingModel& model, const DensityOperator& r0, double tau,
                  double t_eval, bool simplified, double temperature_label,
                  const Tolerances& tol) {
  const WitnessTrace trace = witness(model, r0, tau, {t_eval}, simplified, tol);
  SweepRow row;
  row.tau = tau;
  row.t = t_eval;
  row.temperature = temperature_label;
  row.rho_av = trace.rho_av[0];
  row.rho_ref = trace.rho_ref[0];
  row.delta = trace.delta[0];
  row.abs_delta = std::abs(trace.delta[0]);
  row.p_plus = trace.branches.p_plus;
  row.p_minus = trace.branches.p_minus;
  if (model.d_env() <= 64) {
    const JointState sigma_tau = evolve_joint(model, qubit_plus(), r0, tau);
    row.negativity = negativity(sigma_tau.state, sigma_tau.idx, tol);
  }
  return row;
}

std::vector<SweepRow> sweep_tau_spin_impl(const PureDephasingModel& model,
                                          const std::vector<double>& taus,
                                          const std::vector<double>& temperatures, double t_eval,
                                          bool simplified, int threads, const Tolerances& tol) {
  validate_grid(taus, "tau grid");
  validate_grid(temperatures, "temperature grid");
  if (!std::isfinite(t_eval) || t_eval < 0.0) {
    throw ValidationError("sweep_tau: t_eval must be finite and nonnegative");
  }
  const HermitianEigensystem h_eigs(model.h_env());
  std::vector<DensityOperator> states;
  states.reserve(temperatures.size());
  for (double temp : temperatures) {
    states.push_back(thermal_state_at_temperature(h_eigs, temp));
  }
  const std::size_t n_temp = temperatures.size();
  std::vector<SweepRow> rows(taus.size() * n_temp);
  run_indexed(rows.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / n_temp;
    const std::size_t j = k % n_temp;
    rows[k] = spin_row(model, states[j], taus[i], t_eval, simplified, temperatures[j], tol);
  });
  return rows;
}

SweepRow phonon_row_from(double tau, double t, double temperature, double phi_t, double kappa_t,
                         double phi_tau, double kappa_tau) {
  SweepRow row;
  row.tau = tau;
  row.t = t;
  row.temperature = temperature;
  row.delta = PhononWitnessEvaluator::witness_from(phi_t, kappa_t, phi_tau);
  row.rho_ref = PhononWitnessEvaluator::plain_coherence_from(phi_t, kappa_t);
  row.rho_av = row.rho_ref + row.delta;
  row.abs_delta = std::abs(row.delta);
  // Branch weights of the intermediate measurement, in the convention where
  // the global exciton-energy phase is dropped.
  const Complex rho01_tau = PhononWitnessEvaluator::plain_coherence_from(phi_tau, kappa_tau);
  row.p_plus = 0.5 + rho01_tau.real();
  row.p_minus = 0.5 - rho01_tau.real();
  return row;
}

std::vector<SweepRow> sweep_tau_phonon_impl(const PhononBathParams& params,
                                            const std::vector<double>& taus,
                                            const std::vector<double>& temperatures,
                                            double t_eval, int threads, const Tolerances& tol) {
  validate_grid(taus, "tau grid");
  validate_grid(temperatures, "temperature grid");
  if (!(t_eval > 0.0) || !std::isfinite(t_eval)) {
    throw ValidationError("sweep_tau: t_eval must be positive and finite");
  }
  const PhononWitnessEvaluator eval(params, tol);

  const double phi_t = eval.phase(t_eval);
  std::vector<double> kappa_t(temperatures.size());
  for (std::size_t j = 0; j < temperatures.size(); ++j) {
    kappa_t[j] = eval.decoherence(t_eval, temperatures[j]);
    const double plateau = eval.plateau(temperatures[j]);
    // The tau sweep reports the saturated witness; a t_eval still inside the
    // transient would silently change the physics being plotted. The
    // transient tail decays like amplitude/t^2 (~1e-5 at 50 ps for the
    // default bath), so 1e-4 separates "saturated" from "still moving".
    if (std::abs(kappa_t[j] - plateau) > 1e-4 * (1.0 + plateau)) {
      std::ostringstream os;
      os << "sweep_tau: decoherence exponent at t_eval = " << t_eval << " ps ("
         << kappa_t[j] << ") has not reached its plateau (" << plateau << ") at T = "
         << temperatures[j] << " K; increase t_eval";
      throw NumericalError(os.str());
    }
  }

  std::vector<double> phi_tau(taus.size());
  run_indexed(taus.size(), threads,
              [&](std::size_t i) { phi_tau[i] = eval.phase(taus[i]); });

  const std::size_t n_temp = temperatures.size();
  std::vector<SweepRow> rows(taus.size() * n_temp);
  run_indexed(rows.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / n_temp;
    const std::size_t j = k % n_temp;
    const double kappa_tau = eval.decoherence(taus[i], temperatures[j]);
    rows[k] = phonon_row_from(taus[i], t_eval, temperatures[j], phi_t, kappa_t[j], phi_tau[i],
                              kappa_tau);
  });
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_tau_spin_serial(const PureDephasingModel& model,
                                            const std::vector<double>& taus,
                                            const std::vector<double>& temperatures,
                                            double t_eval, bool simplified,
                                            const Tolerances& tol) {
  return sweep_tau_spin_impl(model, taus, temperatures, t_eval, simplified, 1, tol);
}

std::vector<SweepRow> sweep_tau_spin_parallel(const PureDephasingModel& model,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& temperatures,
                                              double t_eval, bool simplified, int threads,
                                              const Tolerances& tol) {
  if (threads < 1) {
    throw ValidationError("sweep_tau_spin_parallel: threads must be >= 1");
  }
  return sweep_tau_spin_impl(model, taus, temperatures, t_eval, simplified, threads, tol);
}

std::vector<SweepRow> trace_rows_spin(const PureDephasingModel& model, double tau,
                                      const std::vector<double>& times,
                                      const std::vector<double>& temperatures, bool simplified,
                                      const Tolerances& tol) {
  validate_grid(times, "time grid");
  validate_grid(temperatures, "temperature grid");
  const HermitianEigensystem h_eigs(model.h_env());
  std::vector<SweepRow> rows;
  rows.reserve(times.size() * temperatures.size());
  for (double temp : temperatures) {
    const DensityOperator r0 = thermal_state_at_temperature(h_eigs, temp);
    const WitnessTrace trace = witness(model, r0, tau, times, simplified, tol);
    std::optional<double> neg;
    if (model.d_env() <= 64) {
      const JointState sigma_tau = evolve_joint(model, qubit_plus(), r0, tau);
      neg = negativity(sigma_tau.state, sigma_tau.idx, tol);
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      SweepRow row;
      row.tau = tau;
      row.t = times[k];
      row.temperature = temp;
      row.rho_av = trace.rho_av[k];
      row.rho_ref = trace.rho_ref[k];
      row.delta = trace.delta[k];
      row.abs_delta = std::abs(trace.delta[k]);
      row.p_plus = trace.branches.p_plus;
      row.p_minus = trace.branches.p_minus;
      row.negativity = neg;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SweepRow> demo_rows_spin(const PureDephasingModel& model, const DensityOperator& r0,
                                     const std::vector<double>& taus,
                                     const std::vector<double>& times, double temperature_label,
                                     const Tolerances& tol) {
  validate_grid(taus, "tau grid");
  validate_grid(times, "time grid");
  std::vector<SweepRow> rows;
  rows.reserve(taus.size() * times.size());
  for (double tau : taus) {
    const WitnessTrace trace = witness(model, r0, tau, times, /*simplified=*/false, tol);
    std::optional<double> neg;
    if (model.d_env() <= 64) {
      const JointState sigma_tau = evolve_joint(model, qubit_plus(), r0, tau);
      neg = negativity(sigma_tau.state, sigma_tau.idx, tol);
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      SweepRow row;
      row.tau = tau;
      row.t = times[k];
      row.temperature = temperature_label;
      row.rho_av = trace.rho_av[k];
      row.rho_ref = trace.rho_ref[k];
      row.delta = trace.delta[k];
      row.abs_delta = std::abs(trace.delta[k]);
      row.p_plus = trace.branches.p_plus;
      row.p_minus = trace.branches.p_minus;
      row.negativity = neg;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SweepRow> sweep_tau_phonon_serial(const PhononBathParams& params,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& temperatures,
                                              double t_eval, const Tolerances& tol) {
  return sweep_tau_phonon_impl(params, taus, temperatures, t_eval, 1, tol);
}

std::vector<SweepRow> sweep_tau_phonon_parallel(const PhononBathParams& params,
                                                const std::vector<double>& taus,
                                                const std::vector<double>& temperatures,
                                                double t_eval, int threads,
                                                const Tolerances& tol) {
  if (threads < 1) {
    throw ValidationError("sweep_tau_phonon_parallel: threads must be >= 1");
  }
  return sweep_tau_phonon_impl(params, taus, temperatures, t_eval, threads, tol);
}

std::vector<SweepRow> trace_rows_phonon(const PhononBathParams& params, double tau,
                                        const std::vector<double>& times,
                                        const std::vector<double>& temperatures,
                                        const Tolerances& tol) {
  validate_grid(times, "time grid");
  validate_grid(temperatures, "temperature grid");
  if (!std::isfinite(tau) || tau < 0.0) {
    throw ValidationError("trace: tau must be finite and nonnegative");
  }
  const PhononWitnessEvaluator eval(params, tol);
  const double phi_tau = eval.phase(tau);
  std::vector<double> phi_t(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    phi_t[k] = eval.phase(times[k]);
  }
  std::vector<SweepRow> rows;
  rows.reserve(times.size() * temperatures.size());
  for (double temp : temperatures) {
    const double kappa_tau = eval.decoherence(tau, temp);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double kappa_t = eval.decoherence(times[k], temp);
      rows.push_back(
          phonon_row_from(tau, times[k], temp, phi_t[k], kappa_t, phi_tau, kappa_tau));
    }
  }
  return rows;
}

// --- Verification corpus ---------------------------------------------------

namespace {

enum class JobKind {
  kGeneric,
  kSeparable,
  kInfiniteTemperature,
  kBlindSpot,
  kEquivalence,
  kSimplified,
};

struct Job {
  JobKind kind = JobKind::kGeneric;
  ModelRecipe recipe;
  double tau = 0.0;
};

struct JobResult {
  JobKind kind = JobKind::kGeneric;
  bool ok = true;
  bool soundness_violation = false;
  Verdict verdict = Verdict::kSeparable;
  double witness_max = 0.0;
  double negativity = 0.0;
  double extra_a = 0.0;  // kind-specific (distance / gap)
  double extra_b = 0.0;  // kind-specific (drift)
  std::string message;
};

std::string describe(const Job& job) {
  std::ostringstream os;
  os << "seed=" << job.recipe.seed << " n_spins=" << job.recipe.n_spins
     << " tau=" << format_double(job.tau);
  return os.str();
}

JobResult run_job(const Job& job, const std::vector<double>& times, const Tolerances& tol) {
  JobResult res;
  res.kind = job.kind;
  try {
    switch (job.kind) {
      case JobKind::kGeneric:
      case JobKind::kInfiniteTemperature: {
        const GeneratedModel gm = generate_model(job.recipe);
        const Certificate cert = certify_witness(gm.model, gm.r0, job.tau, times, tol);
        res.verdict = cert.verdict;
        res.witness_max = cert.witness_max;
        res.negativity = cert.negativity;
        if (job.kind == JobKind::kInfiniteTemperature) {
          res.ok = cert.witness_max <= 1e-10 && cert.negativity <= 1e-10;
          if (!res.ok) {
            std::ostringstream os;
            os << "infinite-temperature instance not silent: witness " << cert.witness_max
               << ", negativity " << cert.negativity;
            res.message = os.str();
          }
        }
        break;
      }
      case JobKind::kSeparable: {
        const GeneratedModel gm = generate_model(job.recipe);
        // Identical coupling in both branches: provably separable at all tau.
        const PureDephasingModel equal(gm.model.eps0(), gm.model.eps1(), gm.model.h_env(),
                                       gm.model.v1(), gm.model.v1(), tol);
        const Certificate cert = certify_witness(equal, gm.r0, job.tau, times, tol);
        res.verdict = cert.verdict;
        res.witness_max = cert.witness_max;
        res.negativity = cert.negativity;
        res.ok = cert.verdict == Verdict::kSeparable;
        if (!res.ok) {
          res.message = "equal-coupling model not classified separable";
        }
        break;
      }
      case JobKind::kBlindSpot: {
        const GeneratedModel gm = build_blind_spot_model(job.recipe.n_spins, job.recipe.seed);
        const CommutationVerdict comm = commuting_blind_spot_check(gm.model, tol.commutator_zero);
        const Certificate cert = certify_witness(gm.model, gm.r0, job.tau, times, tol);
        res.verdict = cert.verdict;
        res.witness_max = cert.witness_max;
        res.negativity = cert.negativity;
        res.ok = comm.commuting && cert.negativity > 0.01 && cert.witness_max < 1e-10;
        if (!res.ok) {
          std::ostringstream os;
          os << "blind-spot construction not confirmed: commuting=" << comm.commuting
             << " negativity=" << cert.negativity << " witness=" << cert.witness_max;
          res.message = os.str();
        }
        break;
      }
      case JobKind::kEquivalence: {
        const GeneratedModel gm = generate_model(job.recipe);
        const CriterionEquivalence eq =
            separability_criterion_equivalence(gm.model, gm.r0, job.tau, tol);
        res.negativity = eq.negativity;
        res.extra_a = eq.distance;
        res.ok = eq.agree;
        if (!res.ok) {
          std::ostringstream os;
          os << "criterion faces disagree: negativity=" << eq.negativity
             << " distance=" << eq.distance;
          res.message = os.str();
        }
        break;
      }
      case JobKind::kSimplified: {
        const GeneratedModel gm = generate_model(job.recipe);
        const WitnessTrace full = witness(gm.model, gm.r0, job.tau, times, false, tol);
        const WitnessTrace simp = witness(gm.model, gm.r0, job.tau, times, true, tol);
        double gap = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
          gap = std::max(gap, std::abs(full.delta[k] - simp.delta[k]));
        }
        const ConditionalEnvStates states = conditional_env_states(gm.model, gm.r0, job.tau);
        const double drift = (states.r00.matrix() - gm.r0.matrix()).norm();
        res.witness_max = max_abs_delta(full);
        res.extra_a = gap;
        res.extra_b = drift;
        res.ok = gap <= 1e-10 && drift <= 1e-10;
        if (!res.ok) {
          std::ostringstream os;
          os << "simplified scheme drifted: delta gap=" << gap << " state drift=" << drift;
          res.message = os.str();
        }
        break;
      }
    }
  } catch (const SoundnessViolation& e) {
    res.ok = false;
    res.soundness_violation = true;
    res.message = e.what();
  }
  return res;
}

VerifyReport run_corpus(const VerifyOptions& opts, int threads, const Tolerances& tol) {
  if (opts.generic_models < 0 || opts.separable_models < 0 ||
      opts.infinite_temperature_models < 0 || opts.blind_spot_models < 0 ||
      opts.equivalence_models < 0 || opts.simplified_models < 0) {
    throw ValidationError("verify: corpus sizes must be nonnegative");
  }
  validate_grid(opts.taus, "verify tau grid");
  validate_grid(opts.equivalence_taus, "verify equivalence tau grid");
  if (opts.time_samples < 2 || !(opts.t_max > 0.0)) {
    throw ValidationError("verify: need at least 2 time samples and positive t_max");
  }

  const std::vector<double> times = default_time_grid(opts.t_max, opts.time_samples);
  const std::vector<double> betas = {0.25, 1.0, 4.0};

  std::vector<Job> jobs;
  const auto add_certified = [&](JobKind kind, const ModelRecipe& recipe,
                                 const std::vector<double>& taus) {
    for (double tau : taus) {
      jobs.push_back(Job{kind, recipe, tau});
    }
  };

  for (int i = 0; i < opts.generic_models; ++i) {
    ModelRecipe r;
    r.seed = opts.base_seed + static_cast<std::uint64_t>(i);
    r.n_spins = 2 + i % 3;
    r.asymmetric = (i % 2) == 1;
    r.thermal_beta = betas[static_cast<std::size_t>(i / 3) % betas.size()];
    add_certified(JobKind::kGeneric, r, opts.taus);
  }
  for (int i = 0; i < opts.separable_models; ++i) {
    ModelRecipe r;
    r.seed = opts.base_seed + 100000 + static_cast<std::uint64_t>(i);
    r.n_spins = 2 + i % 3;
    r.thermal_beta = (i % 2) == 0 ? 0.0 : 1.0;
    add_certified(JobKind::kSeparable, r, opts.taus);
  }
  for (int i = 0; i < opts.infinite_temperature_models; ++i) {
    ModelRecipe r;
    r.seed = opts.base_seed + 200000 + static_cast<std::uint64_t>(i);
    r.n_spins = 2 + i % 3;
    r.asymmetric = (i % 2) == 1;
    r.thermal_beta = 0.0;
    add_certified(JobKind::kInfiniteTemperature, r, opts.taus);
  }
  for (int i = 0; i < opts.blind_spot_models; ++i) {
    ModelRecipe r;
    r.seed = opts.base_seed + 300000 + static_cast<std::uint64_t>(i);
    r.n_spins = 2 + i % 2;
    jobs.push_back(Job{JobKind::kBlindSpot, r, 1.0});
  }
  for (int i = 0; i < opts.equivalence_models; ++i) {
    ModelRecipe r;
    r.seed = opts.base_seed + 400000 + static_cast<std::uint64_t>(i);
    r.n_spins = 2 + i % 5;  // d_env 4 .. 64
    r.asymmetric = (i % 2) == 1;
    r.thermal_beta = (i % 3 == 0) ? 0.0 : betas[static_cast<std::size_t>(i) % betas.size()];
    add_certified(JobKind::kEquivalence, r, opts.equivalence_taus);
  }
  for (int i = 0; i < opts.simplified_models; ++i) {
    ModelRecipe r;
    r.seed = opts.base_seed + 500000 + static_cast<std::uint64_t>(i);
    r.n_spins = 2 + i % 3;
    r.asymmetric = true;  // one-sided coupling, thermal (stationary) state
    r.thermal_beta = (i % 2) == 0 ? 0.5 : 2.0;
    add_certified(JobKind::kSimplified, r, opts.taus);
  }

  std::vector<JobResult> results(jobs.size());
  run_indexed(jobs.size(), threads,
              [&](std::size_t k) { results[k] = run_job(jobs[k], times, tol); });

  VerifyReport report;
  report.blindspot_min_negativity = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const Job& job = jobs[k];
    const JobResult& res = results[k];
    if (res.soundness_violation) {
      report.false_positives += 1;
      report.failures.push_back("soundness " + describe(job) + ": " + res.message);
      continue;
    }
    switch (res.kind) {
      case JobKind::kGeneric:
      case JobKind::kSeparable:
      case JobKind::kInfiniteTemperature: {
        report.instances += 1;
        switch (res.verdict) {
          case Verdict::kSound: report.sound += 1; break;
          case Verdict::kBlindspot: report.blindspot += 1; break;
          case Verdict::kSeparable:
            report.separable += 1;
            report.max_separable_witness =
                std::max(report.max_separable_witness, res.witness_max);
            break;
        }
        if (res.kind == JobKind::kInfiniteTemperature) {
          report.infinite_temperature_instances += 1;
          report.infinite_temperature_max_witness =
              std::max(report.infinite_temperature_max_witness, res.witness_max);
          report.infinite_temperature_max_negativity =
              std::max(report.infinite_temperature_max_negativity, res.negativity);
        }
        if (!res.ok) {
          report.failures.push_back(std::string(to_string(res.verdict)) + " " + describe(job) +
                                    ": " + res.message);
        }
        break;
      }
      case JobKind::kBlindSpot: {
        report.blindspot_constructed += 1;
        if (res.ok) {
          report.blindspot_confirmed += 1;
          report.blindspot_min_negativity =
              std::min(report.blindspot_min_negativity, res.negativity);
          report.blindspot_max_witness = std::max(report.blindspot_max_witness, res.witness_max);
        } else {
          report.failures.push_back("blind-spot " + describe(job) + ": " + res.message);
        }
        break;
      }
      case JobKind::kEquivalence: {
        report.equivalence_checked += 1;
        if (res.ok) {
          report.equivalence_agreements += 1;
        } else {
          report.failures.push_back("equivalence " + describe(job) + ": " + res.message);
        }
        break;
      }
      case JobKind::kSimplified: {
        report.simplified_checked += 1;
        report.simplified_max_delta_gap = std::max(report.simplified_max_delta_gap, res.extra_a);
        report.simplified_max_state_drift =
            std::max(report.simplified_max_state_drift, res.extra_b);
        if (!res.ok) {
          report.failures.push_back("simplified " + describe(job) + ": " + res.message);
        }
        break;
      }
    }
  }
  if (report.blindspot_constructed == 0) {
    report.blindspot_min_negativity = 0.0;
  }
  report.pass = report.false_positives == 0 && report.failures.empty() &&
                report.equivalence_agreements == report.equivalence_checked &&
                report.blindspot_confirmed == report.blindspot_constructed;
  return report;
}

}  // namespace

VerifyReport run_verification_corpus_serial(const VerifyOptions& opts, const Tolerances& tol) {
  return run_corpus(opts, 1, tol);
}

VerifyReport run_verification_corpus_parallel(const VerifyOptions& opts, int threads,
                                              const Tolerances& tol) {
  if (threads < 1) {
    throw ValidationError("run_verification_corpus_parallel: threads must be >= 1");
  }
  return run_corpus(opts, threads, tol);
}

std::string verify_report_to_json(const VerifyReport& report, const VerifyOptions& opts) {
  nlohmann::ordered_json j;
  j["options"] = {
      {"generic_models", opts.generic_models},
      {"separable_models", opts.separable_models},
      {"infinite_temperature_models", opts.infinite_temperature_models},
      {"blind_spot_models", opts.blind_spot_models},
      {"equivalence_models", opts.equivalence_models},
      {"simplified_models", opts.simplified_models},
      {"taus_ps", opts.taus},
      {"equivalence_taus_ps", opts.equivalence_taus},
      {"time_samples", opts.time_samples},
      {"t_max_ps", opts.t_max},
      {"base_seed", opts.base_seed},
  };
  j["soundness"] = {
      {"instances", report.instances},
      {"sound", report.sound},
      {"blindspot", report.blindspot},
      {"separable", report.separable},
      {"false_positives", report.false_positives},
      {"max_separable_witness", report.max_separable_witness},
  };
  j["equivalence"] = {
      {"checked", report.equivalence_checked},
      {"agreements", report.equivalence_agreements},
  };
  j["blind_spot"] = {
      {"constructed", report.blindspot_constructed},
      {"confirmed", report.blindspot_confirmed},
      {"min_negativity", report.blindspot_min_negativity},
      {"max_witness", report.blindspot_max_witness},
  };
  j["simplified"] = {
      {"checked", report.simplified_checked},
      {"max_delta_gap", report.simplified_max_delta_gap},
      {"max_state_drift", report.simplified_max_state_drift},
  };
  j["infinite_temperature"] = {
      {"instances", report.infinite_temperature_instances},
      {"max_witness", report.infinite_temperature_max_witness},
      {"max_negativity", report.infinite_temperature_max_negativity},
  };
  j["failures"] = report.failures;
  j["pass"] = report.pass;
  return j.dump(2) + "\n";
}

// --- CSV -------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_rows_csv(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& header_params,
                    const std::vector<SweepRow>& rows) {
  if (path.empty()) {
    throw ValidationError("write_rows_csv: empty output path");
  }
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw ValidationError("write_rows_csv: cannot open " + tmp.string() + " for writing");
      }
      for (const auto& [key, value] : header_params) {
        out << "# " << key << " = " << value << "\n";
      }
      out << "tau_ps,t_ps,temperature_K,re_rho_av,im_rho_av,re_rho_ref,im_rho_ref,"
             "re_delta,im_delta,abs_delta,p_plus,p_minus,negativity\n";
      for (const SweepRow& r : rows) {
        out << format_double(r.tau) << ',' << format_double(r.t) << ','
            << format_double(r.temperature) << ',' << format_double(r.rho_av.real()) << ','
            << format_double(r.rho_av.imag()) << ',' << format_double(r.rho_ref.real()) << ','
            << format_double(r.rho_ref.imag()) << ',' << format_double(r.delta.real()) << ','
            << format_double(r.delta.imag()) << ',' << format_double(r.abs_delta) << ','
            << format_double(r.p_plus) << ',' << format_double(r.p_minus) << ','
            << (r.negativity ? format_double(*r.negativity) : std::string()) << '\n';
      }
      out.flush();
      if (!out) {
        throw NumericalError("write_rows_csv: write to " + tmp.string() + " failed");
      }
    }
    std::filesystem::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace qee
