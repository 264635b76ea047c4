// qee: direct detection of qubit-environment entanglement under pure
// dephasing. Subcommands sweep the witness over tau grids (spin or phonon
// models), trace it in time, run the seeded demo, or verify the
// implementation against the exact separability criterion on a random
// corpus.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure,
// 3 soundness/verification failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qee/config.hpp"

namespace {

using qee::format_double;

struct CliOptions {
  std::string config_path;
  std::string out;
  std::vector<std::string> tolerance_overrides;
  int threads = 1;
  std::int64_t seed = 0;
  bool seed_set = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("-c,--config", opt.config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opt.out, "output path (overrides the config)");
  cmd->add_option("--threads", opt.threads, "worker threads (>1 enables the OpenMP lane)")
      ->check(CLI::Range(1, 1024));
  cmd->add_option("--tolerance", opt.tolerance_overrides,
                  "verdict-threshold override name=value; repeatable")
      ->take_all();
  cmd->add_option("--seed", opt.seed, "override the recipe / corpus base seed")
      ->check(CLI::NonNegativeNumber);
}

qee::RunConfig load_effective_config(CLI::App* cmd, CliOptions& opt) {
  opt.seed_set = cmd->count("--seed") > 0;
  qee::RunConfig cfg = qee::load_config(opt.config_path);
  for (const std::string& spec : opt.tolerance_overrides) {
    qee::apply_tolerance_override(cfg.tol, spec);
  }
  if (opt.seed_set) {
    if (cfg.recipe) {
      cfg.recipe->seed = static_cast<std::uint64_t>(opt.seed);
    }
    cfg.verify.base_seed = static_cast<std::uint64_t>(opt.seed);
  }
  if (!opt.out.empty()) {
    cfg.output = opt.out;
  }
  if (cfg.t_eval < 0.0) {
    cfg.t_eval = qee::default_t_eval(cfg.mode);
  }
  return cfg;
}

std::string grid_to_string(const std::vector<double>& grid) {
  std::string s;
  for (double v : grid) {
    s += s.empty() ? format_double(v) : " " + format_double(v);
  }
  return s;
}

using HeaderParams = std::vector<std::pair<std::string, std::string>>;

void echo_tolerances(HeaderParams& h, const qee::Tolerances& tol) {
  h.emplace_back("tolerance.witness_nonzero", format_double(tol.witness_nonzero));
  h.emplace_back("tolerance.negativity_zero", format_double(tol.negativity_zero));
  h.emplace_back("tolerance.separability", format_double(tol.separability));
  h.emplace_back("tolerance.commutator_zero", format_double(tol.commutator_zero));
  h.emplace_back("tolerance.quadrature_rel", format_double(tol.quadrature_rel));
}

void echo_model(HeaderParams& h, const qee::RunConfig& cfg) {
  if (cfg.recipe) {
    h.emplace_back("model", "recipe");
    h.emplace_back("recipe.seed", std::to_string(cfg.recipe->seed));
    h.emplace_back("recipe.n_spins", std::to_string(cfg.recipe->n_spins));
    h.emplace_back("recipe.coupling_scale_meV", format_double(cfg.recipe->coupling_scale_meV));
    h.emplace_back("recipe.asymmetric", cfg.recipe->asymmetric ? "true" : "false");
    h.emplace_back("recipe.thermal_beta_per_meV", format_double(cfg.recipe->thermal_beta));
  } else if (cfg.matrices) {
    h.emplace_back("model", "matrices");
    h.emplace_back("matrices.d_env", std::to_string(cfg.matrices->h_env.rows()));
    h.emplace_back("matrices.eps0_meV", format_double(cfg.matrices->eps0_meV));
    h.emplace_back("matrices.eps1_meV", format_double(cfg.matrices->eps1_meV));
  } else if (cfg.phonon) {
    h.emplace_back("model", "phonon");
    h.emplace_back("phonon.sigma_diff_eV", format_double(cfg.phonon->sigma_diff_eV));
    h.emplace_back("phonon.mass_density_kg_m3", format_double(cfg.phonon->mass_density_kg_m3));
    h.emplace_back("phonon.sound_speed_m_s", format_double(cfg.phonon->sound_speed_m_s));
    h.emplace_back("phonon.l_perp_nm", format_double(cfg.phonon->l_perp_nm));
    h.emplace_back("phonon.l_z_nm", format_double(cfg.phonon->l_z_nm));
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw qee::ValidationError("cannot open " + tmp.string() + " for writing");
      }
      out << text;
      out.flush();
      if (!out) {
        throw qee::NumericalError("write to " + tmp.string() + " failed");
      }
    }
    std::filesystem::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

void require_temperatures(const qee::RunConfig& cfg) {
  if (cfg.temperatures.empty()) {
    throw qee::ValidationError("config: temperatures_K is required for this command");
  }
}

std::vector<double> effective_time_grid(const qee::RunConfig& cfg) {
  if (!cfg.t_grid.empty()) {
    return cfg.t_grid;
  }
  return qee::default_time_grid(qee::default_t_eval(cfg.mode), 200);
}

int run_sweep_tau(const qee::RunConfig& cfg, const CliOptions& opt) {
  if (cfg.mode == qee::RunMode::kVerify) {
    throw qee::ValidationError("sweep-tau needs a spin or phonon config, not verify");
  }
  if (cfg.tau_grid.empty()) {
    throw qee::ValidationError("config: tau_grid_ps is required for sweep-tau");
  }
  require_temperatures(cfg);

  HeaderParams header;
  header.emplace_back("command", "sweep-tau");
  header.emplace_back("mode", cfg.mode == qee::RunMode::kPhonon ? "phonon" : "spin");
  echo_model(header, cfg);
  header.emplace_back("simplified", cfg.simplified ? "true" : "false");
  header.emplace_back("tau_grid_ps", grid_to_string(cfg.tau_grid));
  header.emplace_back("temperatures_K", grid_to_string(cfg.temperatures));
  header.emplace_back("t_eval_ps", format_double(cfg.t_eval));
  echo_tolerances(header, cfg.tol);

  std::vector<qee::SweepRow> rows;
  if (cfg.mode == qee::RunMode::kPhonon) {
    rows = opt.threads > 1
               ? qee::sweep_tau_phonon_parallel(*cfg.phonon, cfg.tau_grid, cfg.temperatures,
                                                cfg.t_eval, opt.threads, cfg.tol)
               : qee::sweep_tau_phonon_serial(*cfg.phonon, cfg.tau_grid, cfg.temperatures,
                                              cfg.t_eval, cfg.tol);
  } else {
    const qee::SpinSetup setup = qee::build_spin_setup(cfg);
    rows = opt.threads > 1
               ? qee::sweep_tau_spin_parallel(setup.model, cfg.tau_grid, cfg.temperatures,
                                              cfg.t_eval, cfg.simplified, opt.threads, cfg.tol)
               : qee::sweep_tau_spin_serial(setup.model, cfg.tau_grid, cfg.temperatures,
                                            cfg.t_eval, cfg.simplified, cfg.tol);
  }
  const std::string out = cfg.output.empty() ? "sweep_tau.csv" : cfg.output;
  qee::write_rows_csv(out, header, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  return 0;
}

int run_trace(const qee::RunConfig& cfg, const CliOptions&) {
  if (cfg.mode == qee::RunMode::kVerify) {
    throw qee::ValidationError("trace needs a spin or phonon config, not verify");
  }
  if (cfg.tau_grid.size() != 1) {
    throw qee::ValidationError("config: trace needs exactly one value in tau_grid_ps");
  }
  require_temperatures(cfg);
  const double tau = cfg.tau_grid.front();
  const std::vector<double> times = effective_time_grid(cfg);

  HeaderParams header;
  header.emplace_back("command", "trace");
  header.emplace_back("mode", cfg.mode == qee::RunMode::kPhonon ? "phonon" : "spin");
  echo_model(header, cfg);
  header.emplace_back("simplified", cfg.simplified ? "true" : "false");
  header.emplace_back("tau_ps", format_double(tau));
  header.emplace_back("t_grid_ps", grid_to_string(times));
  header.emplace_back("temperatures_K", grid_to_string(cfg.temperatures));
  echo_tolerances(header, cfg.tol);

  std::vector<qee::SweepRow> rows;
  if (cfg.mode == qee::RunMode::kPhonon) {
    rows = qee::trace_rows_phonon(*cfg.phonon, tau, times, cfg.temperatures, cfg.tol);
  } else {
    const qee::SpinSetup setup = qee::build_spin_setup(cfg);
    rows = qee::trace_rows_spin(setup.model, tau, times, cfg.temperatures, cfg.simplified,
                                cfg.tol);
  }
  const std::string out = cfg.output.empty() ? "trace.csv" : cfg.output;
  qee::write_rows_csv(out, header, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  return 0;
}

int run_spin_demo(const qee::RunConfig& cfg, const CliOptions&) {
  if (cfg.mode != qee::RunMode::kSpin || !cfg.recipe) {
    throw qee::ValidationError("spin-demo needs a spin config with model.recipe");
  }
  if (cfg.tau_grid.empty()) {
    throw qee::ValidationError("config: tau_grid_ps is required for spin-demo");
  }
  const std::vector<double> times = effective_time_grid(cfg);
  const qee::SpinSetup setup = qee::build_spin_setup(cfg);
  const double temperature_label =
      setup.recipe_beta == 0.0
          ? std::numeric_limits<double>::infinity()
          : 1.0 / (qee::constants::k_B_meV_per_K * setup.recipe_beta);

  HeaderParams header;
  header.emplace_back("command", "spin-demo");
  header.emplace_back("mode", "spin");
  echo_model(header, cfg);
  header.emplace_back("tau_grid_ps", grid_to_string(cfg.tau_grid));
  header.emplace_back("t_grid_ps", grid_to_string(times));
  header.emplace_back("temperature_K", format_double(temperature_label));
  echo_tolerances(header, cfg.tol);

  const std::vector<qee::SweepRow> rows = qee::demo_rows_spin(
      setup.model, *setup.recipe_state, cfg.tau_grid, times, temperature_label, cfg.tol);
  const std::string out = cfg.output.empty() ? "spin_demo.csv" : cfg.output;
  qee::write_rows_csv(out, header, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  return 0;
}

int run_verify(const qee::RunConfig& cfg, const CliOptions& opt) {
  if (cfg.mode != qee::RunMode::kVerify) {
    throw qee::ValidationError("verify needs a config with mode \"verify\"");
  }
  const qee::VerifyReport report =
      opt.threads > 1 ? qee::run_verification_corpus_parallel(cfg.verify, opt.threads, cfg.tol)
                      : qee::run_verification_corpus_serial(cfg.verify, cfg.tol);
  const std::string out = cfg.output.empty() ? "verify_report.json" : cfg.output;
  write_text_atomic(out, qee::verify_report_to_json(report, cfg.verify));

  std::cout << "certified " << report.instances << " instances: " << report.sound << " sound, "
            << report.blindspot << " blind-spot, " << report.separable << " separable, "
            << report.false_positives << " false positives\n"
            << "criterion equivalence " << report.equivalence_agreements << "/"
            << report.equivalence_checked << ", constructed blind spots "
            << report.blindspot_confirmed << "/" << report.blindspot_constructed
            << ", simplified-scheme checks " << report.simplified_checked << "\n"
            << "wrote report to " << out << "\n"
            << (report.pass ? "PASS" : "FAIL") << "\n";
  if (!report.pass) {
    for (const std::string& f : report.failures) {
      std::cerr << "failure: " << f << "\n";
    }
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"direct witness of qubit-environment entanglement under pure dephasing"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep-tau", "witness amplitude vs waiting time tau on a (tau, temperature) grid");
  CLI::App* trace =
      app.add_subcommand("trace", "witness vs readout time t at fixed tau, per temperature");
  CLI::App* demo = app.add_subcommand(
      "spin-demo", "seeded random spin-bath demo over (tau, t) with exact negativity");
  CLI::App* verify = app.add_subcommand(
      "verify", "certify the witness against the exact criterion on a random corpus");
  for (CLI::App* cmd : {sweep, trace, demo, verify}) {
    add_common_options(cmd, opt);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's per-error exit codes onto the documented contract:
    // help/version stay 0, every parse failure is invalid input.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    const qee::RunConfig cfg = load_effective_config(active, opt);
    if (active == sweep) {
      return run_sweep_tau(cfg, opt);
    }
    if (active == trace) {
      return run_trace(cfg, opt);
    }
    if (active == demo) {
      return run_spin_demo(cfg, opt);
    }
    return run_verify(cfg, opt);
  } catch (const qee::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qee::SoundnessViolation& e) {
    std::cerr << "soundness violation: " << e.what() << "\n";
    return 3;
  } catch (const qee::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
