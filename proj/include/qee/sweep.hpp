#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qee/oracle.hpp"
#include "qee/phonon.hpp"

namespace qee {

// One output row of a tau sweep or a time trace; maps 1:1 onto the CSV
// contract. negativity is absent when the environment is too large (or
// continuous) for the exact ground truth.
struct SweepRow {
  double tau = 0.0;
  double t = 0.0;
  double temperature = 0.0;
  Complex rho_av;
  Complex rho_ref;
  Complex delta;
  double abs_delta = 0.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  std::optional<double> negativity;
};

// --- Spin-bath grids -------------------------------------------------------
//
// Each grid point (tau, temperature) thermalizes the environment at that
// temperature, runs the protocol, and reports the witness at t_eval. Rows
// come back in grid order (tau-major) regardless of the execution lane; the
// parallel lane writes into preallocated slots, so its output is bitwise
// identical to the serial reference.

std::vector<SweepRow> sweep_tau_spin_serial(const PureDephasingModel& model,
                                            const std::vector<double>& taus,
                                            const std::vector<double>& temperatures,
                                            double t_eval, bool simplified,
                                            const Tolerances& tol = kDefaultTol);

std::vector<SweepRow> sweep_tau_spin_parallel(const PureDephasingModel& model,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& temperatures,
                                              double t_eval, bool simplified, int threads,
                                              const Tolerances& tol = kDefaultTol);

// Time trace at fixed tau for each temperature.
std::vector<SweepRow> trace_rows_spin(const PureDephasingModel& model, double tau,
                                      const std::vector<double>& times,
                                      const std::vector<double>& temperatures, bool simplified,
                                      const Tolerances& tol = kDefaultTol);

// Spin rows for an explicit initial state (recipe-thermalized runs); the
// temperature column is filled with temperature_label.
std::vector<SweepRow> demo_rows_spin(const PureDephasingModel& model, const DensityOperator& r0,
                                     const std::vector<double>& taus,
                                     const std::vector<double>& times, double temperature_label,
                                     const Tolerances& tol = kDefaultTol);

// --- Phonon-bath grids -----------------------------------------------------
//
// Closed-form evaluation; t_eval is the plateau time, and each temperature's
// decoherence exponent is verified to sit on its t -> infinity plateau.

std::vector<SweepRow> sweep_tau_phonon_serial(const PhononBathParams& params,
                                              const std::vector<double>& taus,
                                              const std::vector<double>& temperatures,
                                              double t_eval,
                                              const Tolerances& tol = kDefaultTol);

std::vector<SweepRow> sweep_tau_phonon_parallel(const PhononBathParams& params,
                                                const std::vector<double>& taus,
                                                const std::vector<double>& temperatures,
                                                double t_eval, int threads,
                                                const Tolerances& tol = kDefaultTol);

std::vector<SweepRow> trace_rows_phonon(const PhononBathParams& params, double tau,
                                        const std::vector<double>& times,
                                        const std::vector<double>& temperatures,
                                        const Tolerances& tol = kDefaultTol);

// --- Verification corpus ---------------------------------------------------

struct VerifyOptions {
  int generic_models = 700;           // mixed couplings, thermal states, d in {4,8,16}
  int separable_models = 160;         // V0 = V1 by construction
  int infinite_temperature_models = 160;
  int blind_spot_models = 12;
  int equivalence_models = 500;       // d_env up to 64
  int simplified_models = 60;         // one-sided coupling, stationary state
  std::vector<double> taus = {0.25, 1.0, 4.0};
  std::vector<double> equivalence_taus = {0.5, 1.0, 2.0};
  int time_samples = 50;
  double t_max = 10.0;
  std::uint64_t base_seed = 0;
};

struct VerifyReport {
  // Soundness over every certified (model, tau) instance.
  long instances = 0;
  long sound = 0;
  long blindspot = 0;
  long separable = 0;
  long false_positives = 0;
  double max_separable_witness = 0.0;  // largest |delta| seen on any separable instance

  // Exact-criterion equivalence: negativity vs conditional-state distance.
  long equivalence_checked = 0;
  long equivalence_agreements = 0;

  // Constructed blind spots: entangled, commuting, invisible.
  long blindspot_constructed = 0;
  long blindspot_confirmed = 0;
  double blindspot_min_negativity = 0.0;
  double blindspot_max_witness = 0.0;

  // Simplified-scheme agreement on one-sided models with stationary states.
  long simplified_checked = 0;
  double simplified_max_delta_gap = 0.0;
  double simplified_max_state_drift = 0.0;

  // Infinite-temperature stress: witness and negativity both exactly silent.
  long infinite_temperature_instances = 0;
  double infinite_temperature_max_witness = 0.0;
  double infinite_temperature_max_negativity = 0.0;

  bool pass = false;
  std::vector<std::string> failures;
};

VerifyReport run_verification_corpus_serial(const VerifyOptions& opts,
                                            const Tolerances& tol = kDefaultTol);
VerifyReport run_verification_corpus_parallel(const VerifyOptions& opts, int threads,
                                              const Tolerances& tol = kDefaultTol);

// Deterministic JSON rendering of the report (stable key order and float
// formatting, so identical runs are byte-identical).
std::string verify_report_to_json(const VerifyReport& report, const VerifyOptions& opts);

// --- CSV -------------------------------------------------------------------

// Writes the row table with a '# key = value' preamble echoing every
// effective parameter. All floats are %.17g, so equal runs produce equal
// bytes. The file appears atomically (temporary + rename) and partial output
// is removed on failure.
void write_rows_csv(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& header_params,
                    const std::vector<SweepRow>& rows);

std::string format_double(double v);  // %.17g

}  // namespace qee
