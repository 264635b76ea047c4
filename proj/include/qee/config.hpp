#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qee/sweep.hpp"

namespace qee {

enum class RunMode { kSpin, kPhonon, kVerify };

// Explicit spin-bath model given as matrices in the config file.
struct InlineModelConfig {
  double eps0_meV = 0.0;
  double eps1_meV = 0.0;
  ComplexMatrix h_env;
  ComplexMatrix v0;
  ComplexMatrix v1;
};

// Parsed run configuration. Exactly one model source is set for spin/phonon
// modes: `matrices` or `recipe` for spin, `phonon` for the phonon bath.
struct RunConfig {
  RunMode mode = RunMode::kSpin;
  std::optional<InlineModelConfig> matrices;
  std::optional<ModelRecipe> recipe;
  std::optional<PhononBathParams> phonon;
  bool simplified = false;
  std::vector<double> tau_grid;      // ps
  std::vector<double> t_grid;        // ps; trace/demo time grid
  std::vector<double> temperatures;  // K
  double t_eval = -1.0;              // ps; < 0 means the mode default
  std::string output;                // empty means the subcommand default
  VerifyOptions verify;
  Tolerances tol;
};

// Loads and validates a JSON config. Errors carry the offending field path.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Applies one "name=value" override to the verdict thresholds. Valid names:
// witness_nonzero, negativity_zero, separability, commutator_zero,
// quadrature_rel.
void apply_tolerance_override(Tolerances& tol, const std::string& spec);

// Mode default for the witness evaluation time (plateau time for the phonon
// bath, a few bath periods for spin models).
double default_t_eval(RunMode mode);

// Builds the spin model (and its recipe-derived initial state, if any).
struct SpinSetup {
  PureDephasingModel model;
  std::optional<DensityOperator> recipe_state;
  double recipe_beta = 0.0;
};

SpinSetup build_spin_setup(const RunConfig& config);

}  // namespace qee
