#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qee/config.hpp"
#include "support/test_oracles.hpp"

using namespace qee;
namespace ts = testsupport;

namespace {

PureDephasingModel small_model(std::uint64_t seed) {
  ModelRecipe recipe;
  recipe.seed = seed;
  recipe.n_spins = 2;
  return generate_model(recipe).model;
}

bool rows_equal(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].tau != b[i].tau || a[i].t != b[i].t || a[i].temperature != b[i].temperature ||
        a[i].rho_av != b[i].rho_av || a[i].rho_ref != b[i].rho_ref ||
        a[i].delta != b[i].delta || a[i].abs_delta != b[i].abs_delta ||
        a[i].p_plus != b[i].p_plus || a[i].p_minus != b[i].p_minus ||
        a[i].negativity.has_value() != b[i].negativity.has_value()) {
      return false;
    }
    if (a[i].negativity && *a[i].negativity != *b[i].negativity) return false;
  }
  return true;
}

std::string csv_bytes(const std::filesystem::path& dir, const std::string& name,
                      const std::vector<SweepRow>& rows) {
  const std::string path = (dir / name).string();
  write_rows_csv(path, {{"lane", "x"}}, rows);
  return ts::slurp_file(path);
}

// Splits a CSV body into data lines (skipping '# ...' preamble and the column
// header) and returns the requested column of each.
std::vector<std::string> csv_column(const std::string& text, std::size_t column) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;  // column-name row
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    // A trailing empty field is dropped by getline; restore it.
    if (!line.empty() && line.back() == ',') fields.push_back("");
    REQUIRE(fields.size() == 13);
    out.push_back(fields.at(column));
  }
  return out;
}

constexpr std::size_t kColAbsDelta = 9;
constexpr std::size_t kColNegativity = 12;

VerifyOptions tiny_verify_options() {
  VerifyOptions o;
  o.generic_models = 12;
  o.separable_models = 6;
  o.infinite_temperature_models = 6;
  o.blind_spot_models = 2;
  o.equivalence_models = 6;
  o.simplified_models = 4;
  o.time_samples = 12;
  o.t_max = 6.0;
  return o;
}

std::string tiny_verify_config_json() {
  return R"({
    "mode": "verify",
    "verify": {
      "generic_models": 10,
      "separable_models": 5,
      "infinite_temperature_models": 5,
      "blind_spot_models": 2,
      "equivalence_models": 5,
      "simplified_models": 3,
      "time_samples": 10,
      "t_max_ps": 5.0
    }
  })";
}

}  // namespace

TEST_CASE("spin tau sweep: serial and parallel lanes agree bitwise") {
  const PureDephasingModel model = small_model(301);
  const std::vector<double> taus = {0.0, 0.4, 1.1, 2.0};
  const std::vector<double> temps = {5.0, 40.0};
  const auto serial = sweep_tau_spin_serial(model, taus, temps, 3.0, false);
  const auto parallel = sweep_tau_spin_parallel(model, taus, temps, 3.0, false, 2);
  CHECK(rows_equal(serial, parallel));
  CHECK(serial.size() == taus.size() * temps.size());

  const auto dir = ts::scratch_dir("sweep_spin_lanes");
  CHECK(csv_bytes(dir, "serial.csv", serial) == csv_bytes(dir, "parallel.csv", parallel));

  SUBCASE("tau = 0 rows are silent to numerical precision") {
    // The spin route reconstructs w_i(0) from the eigenbasis, so identity
    // holds to roundoff rather than bitwise; the closed-form phonon route is
    // the one that owes an exact zero.
    for (std::size_t j = 0; j < temps.size(); ++j) {
      CHECK(serial[j].abs_delta <= 1e-13);
    }
  }
  SUBCASE("small environments get the exact negativity column") {
    for (const SweepRow& r : serial) {
      REQUIRE(r.negativity.has_value());
      CHECK(*r.negativity >= 0.0);
    }
  }
}

TEST_CASE("phonon tau sweep: serial and parallel lanes agree bitwise") {
  const PhononBathParams params;
  const std::vector<double> taus = {0.0, 0.5, 1.0, 2.0};
  const std::vector<double> temps = {0.0, 34.0};
  const auto serial = sweep_tau_phonon_serial(params, taus, temps, 50.0);
  const auto parallel = sweep_tau_phonon_parallel(params, taus, temps, 50.0, 2);
  CHECK(rows_equal(serial, parallel));

  const auto dir = ts::scratch_dir("sweep_phonon_lanes");
  CHECK(csv_bytes(dir, "serial.csv", serial) == csv_bytes(dir, "parallel.csv", parallel));

  SUBCASE("continuum rows have no negativity column") {
    for (const SweepRow& r : serial) CHECK_FALSE(r.negativity.has_value());
  }
  SUBCASE("tau = 0 is exactly silent, later taus are not") {
    CHECK(serial[0].abs_delta == 0.0);
    CHECK(serial[1].abs_delta == 0.0);
    CHECK(serial[2].abs_delta > 1e-4);
  }
}

TEST_CASE("sweep input validation") {
  const PureDephasingModel model = small_model(302);
  SUBCASE("empty grids") {
    CHECK_THROWS_AS(sweep_tau_spin_serial(model, {}, {1.0}, 1.0, false), ValidationError);
    CHECK_THROWS_AS(sweep_tau_spin_serial(model, {1.0}, {}, 1.0, false), ValidationError);
  }
  SUBCASE("negative grid values") {
    CHECK_THROWS_AS(sweep_tau_spin_serial(model, {-0.5, 1.0}, {1.0}, 1.0, false),
                    ValidationError);
  }
  SUBCASE("non-increasing grids") {
    CHECK_THROWS_AS(sweep_tau_spin_serial(model, {1.0, 0.5}, {1.0}, 1.0, false),
                    ValidationError);
    CHECK_THROWS_AS(sweep_tau_spin_serial(model, {1.0, 1.0}, {1.0}, 1.0, false),
                    ValidationError);
  }
  SUBCASE("bad t_eval and thread counts") {
    CHECK_THROWS_AS(sweep_tau_spin_serial(model, {1.0}, {1.0}, -1.0, false), ValidationError);
    CHECK_THROWS_AS(sweep_tau_spin_parallel(model, {1.0}, {1.0}, 1.0, false, 0),
                    ValidationError);
  }
  SUBCASE("phonon t_eval inside the transient is refused") {
    // At T = 0 the decoherence exponent still moves like 1/t^2, so 5 ps is
    // inside the transient; warm baths equilibrate much faster.
    CHECK_THROWS_AS(sweep_tau_phonon_serial(PhononBathParams{}, {0.5}, {0.0}, 5.0),
                    NumericalError);
    CHECK_THROWS_AS(sweep_tau_phonon_serial(PhononBathParams{}, {0.5}, {34.0}, 2.0),
                    NumericalError);
  }
}

TEST_CASE("verification corpus: serial and parallel lanes agree byte for byte") {
  const VerifyOptions opts = tiny_verify_options();
  const VerifyReport serial = run_verification_corpus_serial(opts);
  const VerifyReport parallel = run_verification_corpus_parallel(opts, 2);
  CHECK(serial.pass);
  CHECK(parallel.pass);
  CHECK(serial.false_positives == 0);
  CHECK(verify_report_to_json(serial, opts) == verify_report_to_json(parallel, opts));
  CHECK(serial.instances > 0);
  CHECK(serial.equivalence_checked == serial.equivalence_agreements);
}

TEST_CASE("CSV writing") {
  const auto dir = ts::scratch_dir("csv_writer");
  SweepRow with_neg;
  with_neg.tau = 0.1;
  with_neg.t = 2.0;
  with_neg.temperature = 34.0;
  with_neg.rho_av = Complex(0.25, -0.125);
  with_neg.rho_ref = Complex(0.5, 0.0);
  with_neg.delta = with_neg.rho_av - with_neg.rho_ref;
  with_neg.abs_delta = std::abs(with_neg.delta);
  with_neg.p_plus = 0.75;
  with_neg.p_minus = 0.25;
  with_neg.negativity = 0.1;
  SweepRow without_neg = with_neg;
  without_neg.negativity.reset();

  const std::string path = (dir / "rows.csv").string();
  write_rows_csv(path, {{"command", "test"}, {"mode", "spin"}}, {with_neg, without_neg});
  const std::string text = ts::slurp_file(path);

  SUBCASE("preamble and column header are present") {
    CHECK(text.find("# command = test\n") != std::string::npos);
    CHECK(text.find("# mode = spin\n") != std::string::npos);
    CHECK(text.find("tau_ps,t_ps,temperature_K,re_rho_av,im_rho_av,re_rho_ref,im_rho_ref,"
                    "re_delta,im_delta,abs_delta,p_plus,p_minus,negativity\n") !=
          std::string::npos);
  }
  SUBCASE("negativity column is empty when absent") {
    const auto neg = csv_column(text, kColNegativity);
    REQUIRE(neg.size() == 2);
    CHECK(neg[0] == format_double(0.1));
    CHECK(neg[1] == "");
  }
  SUBCASE("floats survive a text round trip exactly") {
    const auto col = csv_column(text, kColAbsDelta);
    REQUIRE(col.size() == 2);
    CHECK(std::stod(col[0]) == with_neg.abs_delta);
  }
  SUBCASE("empty output path is rejected") {
    CHECK_THROWS_AS(write_rows_csv("", {}, {}), ValidationError);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("recipe model") {
    const RunConfig cfg = parse_config_text(R"({
      "mode": "spin",
      "model": {"recipe": {"seed": 11, "n_spins": 3, "coupling_scale_meV": 0.5,
                            "asymmetric": true, "thermal_beta_per_meV": 1.25}},
      "tau_grid_ps": [0.0, 1.0],
      "temperatures_K": [10.0]
    })",
                                            "test");
    CHECK(cfg.mode == RunMode::kSpin);
    REQUIRE(cfg.recipe.has_value());
    CHECK(cfg.recipe->seed == 11);
    CHECK(cfg.recipe->n_spins == 3);
    CHECK(cfg.recipe->coupling_scale_meV == 0.5);
    CHECK(cfg.recipe->asymmetric);
    CHECK(cfg.recipe->thermal_beta == 1.25);
    CHECK(cfg.tau_grid == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("matrices model with complex entries") {
    const RunConfig cfg = parse_config_text(R"({
      "mode": "spin",
      "model": {"matrices": {
        "eps0_meV": -0.5, "eps1_meV": 0.5,
        "h_env": [[1.0, [0.0, -0.25]], [[0.0, 0.25], 2.0]],
        "v0": [[0, 0], [0, 0]],
        "v1": [[0.3, 0], [0, -0.3]]
      }}
    })",
                                            "test");
    REQUIRE(cfg.matrices.has_value());
    CHECK(cfg.matrices->eps0_meV == -0.5);
    CHECK(cfg.matrices->h_env(0, 1) == Complex(0.0, -0.25));
    const SpinSetup setup = build_spin_setup(cfg);
    CHECK(setup.model.d_env() == 2);
  }
  SUBCASE("linspace grids expand with exact endpoints") {
    const RunConfig cfg = parse_config_text(R"({
      "mode": "spin",
      "model": {"recipe": {}},
      "tau_grid_ps": {"start": 0.0, "stop": 2.0, "points": 5}
    })",
                                            "test");
    REQUIRE(cfg.tau_grid.size() == 5);
    CHECK(cfg.tau_grid.front() == 0.0);
    CHECK(cfg.tau_grid.back() == 2.0);
    CHECK(cfg.tau_grid[2] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("infinite temperature spelled out") {
    const RunConfig cfg = parse_config_text(R"({
      "mode": "spin",
      "model": {"recipe": {"thermal_beta_per_meV": "infinite"}}
    })",
                                            "test");
    REQUIRE(cfg.recipe.has_value());
    CHECK(cfg.recipe->thermal_beta == 0.0);
  }
  SUBCASE("unknown keys are named in the error") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"mode": "spin", "model": {"recipe": {}}, "tau_grid": [1]})",
                          "test"),
        doctest::Contains("tau_grid"), ValidationError);
  }
  SUBCASE("model source must match the mode") {
    CHECK_THROWS_AS(parse_config_text(R"({"mode": "spin"})", "test"), ValidationError);
    CHECK_THROWS_AS(parse_config_text(R"({"mode": "phonon"})", "test"), ValidationError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"mode": "phonon", "model": {"recipe": {}}})", "test"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"mode": "verify", "model": {"recipe": {}}})", "test"),
        ValidationError);
    CHECK_THROWS_AS(parse_config_text(R"({"mode": "both"})", "test"), ValidationError);
  }
  SUBCASE("matrices must be square") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
      "mode": "spin",
      "model": {"matrices": {
        "h_env": [[1.0, 0.0]],
        "v0": [[0.0]], "v1": [[0.0]]
      }}
    })",
                                           "test"),
                         doctest::Contains("square"), ValidationError);
  }
  SUBCASE("invalid JSON is reported as such") {
    CHECK_THROWS_WITH_AS(parse_config_text("{", "test"), doctest::Contains("JSON"),
                         ValidationError);
  }
  SUBCASE("two model sources are rejected") {
    CHECK_THROWS_AS(parse_config_text(R"({
      "mode": "spin",
      "model": {"recipe": {}, "phonon": {}}
    })",
                                      "test"),
                    ValidationError);
  }
}

TEST_CASE("tolerance overrides") {
  Tolerances tol;
  apply_tolerance_override(tol, "witness_nonzero=1e-6");
  CHECK(tol.witness_nonzero == 1e-6);
  apply_tolerance_override(tol, "quadrature_rel=1e-9");
  CHECK(tol.quadrature_rel == 1e-9);
  CHECK_THROWS_WITH_AS(apply_tolerance_override(tol, "bogus=1"),
                       doctest::Contains("witness_nonzero"), ValidationError);
  CHECK_THROWS_AS(apply_tolerance_override(tol, "separability=-2"), ValidationError);
  CHECK_THROWS_AS(apply_tolerance_override(tol, "separability=abc"), ValidationError);
  CHECK_THROWS_AS(apply_tolerance_override(tol, "witness_nonzero"), ValidationError);
}

TEST_CASE("mode defaults") {
  CHECK(default_t_eval(RunMode::kPhonon) == 50.0);
  CHECK(default_t_eval(RunMode::kSpin) == 10.0);
}

TEST_CASE("command-line binary end to end") {
  REQUIRE_MESSAGE(!ts::qee_binary.empty(),
                  "pass --qee=<path> so the CLI round trips can run");
  const auto dir = ts::scratch_dir("cli_end_to_end");
  const std::string q = "\"" + ts::qee_binary + "\"";

  SUBCASE("help exits zero; parse failures exit one") {
    CHECK(ts::run_command(q + " --help").exit_code == 0);
    CHECK(ts::run_command(q).exit_code == 1);
    CHECK(ts::run_command(q + " sweep-tau --bogus").exit_code == 1);
    CHECK(ts::run_command(q + " sweep-tau -c " + (dir / "missing.json").string()).exit_code ==
          1);
  }

  SUBCASE("seeded demo is reproducible byte for byte") {
    const std::string cfg = (dir / "demo.json").string();
    ts::dump_file(cfg, R"({
      "mode": "spin",
      "model": {"recipe": {"seed": 5, "n_spins": 2, "thermal_beta_per_meV": 0.7}},
      "tau_grid_ps": [0.0, 0.8],
      "t_grid_ps": [0.0, 1.0, 2.0]
    })");
    const std::string out1 = (dir / "demo1.csv").string();
    const std::string out2 = (dir / "demo2.csv").string();
    const auto r1 = ts::run_command(q + " spin-demo -c " + cfg + " -o " + out1);
    const auto r2 = ts::run_command(q + " spin-demo -c " + cfg + " -o " + out2);
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    REQUIRE(r2.exit_code == 0);
    const std::string b1 = ts::slurp_file(out1);
    CHECK(b1 == ts::slurp_file(out2));
    CHECK(b1.find("# command = spin-demo\n") != std::string::npos);
    CHECK(b1.find("negativity\n") != std::string::npos);
  }

  SUBCASE("phonon sweep: silent at tau = 0 and thread-count invariant") {
    const std::string cfg = (dir / "phonon.json").string();
    ts::dump_file(cfg, R"({
      "mode": "phonon",
      "model": {"phonon": {}},
      "tau_grid_ps": [0.0, 1.0],
      "temperatures_K": [0.0, 34.0]
    })");
    const std::string out1 = (dir / "ph1.csv").string();
    const std::string out2 = (dir / "ph2.csv").string();
    const auto r1 = ts::run_command(q + " sweep-tau -c " + cfg + " -o " + out1);
    const auto r2 = ts::run_command(q + " sweep-tau -c " + cfg + " -o " + out2 + " --threads 2");
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    REQUIRE_MESSAGE(r2.exit_code == 0, r2.output);
    const std::string b1 = ts::slurp_file(out1);
    CHECK(b1 == ts::slurp_file(out2));
    const auto abs_delta = csv_column(b1, kColAbsDelta);
    REQUIRE(abs_delta.size() == 4);  // two taus x two temperatures, tau-major
    CHECK(abs_delta[0] == "0");
    CHECK(abs_delta[1] == "0");
    CHECK(std::stod(abs_delta[2]) > 1e-4);
    const auto neg = csv_column(b1, kColNegativity);
    for (const std::string& n : neg) CHECK(n == "");
  }

  SUBCASE("spin sweep at tau = 0 only") {
    const std::string cfg = (dir / "spin0.json").string();
    ts::dump_file(cfg, R"({
      "mode": "spin",
      "model": {"matrices": {
        "eps0_meV": 0.0, "eps1_meV": 1.0,
        "h_env": [[0.4, [0.1, -0.2]], [[0.1, 0.2], -0.4]],
        "v0": [[0.0, 0.0], [0.0, 0.0]],
        "v1": [[0.6, 0.0], [0.0, -0.6]]
      }},
      "tau_grid_ps": [0.0],
      "temperatures_K": [20.0]
    })");
    const std::string out = (dir / "spin0.csv").string();
    const auto r = ts::run_command(q + " sweep-tau -c " + cfg + " -o " + out);
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    const auto abs_delta = csv_column(ts::slurp_file(out), kColAbsDelta);
    REQUIRE(abs_delta.size() == 1);
    CHECK(std::stod(abs_delta[0]) <= 1e-12);
  }

  SUBCASE("time trace works for one tau and refuses two") {
    const std::string cfg = (dir / "trace.json").string();
    ts::dump_file(cfg, R"({
      "mode": "phonon",
      "model": {"phonon": {}},
      "tau_grid_ps": [0.6],
      "t_grid_ps": {"start": 0.0, "stop": 10.0, "points": 6},
      "temperatures_K": [0.0]
    })");
    const std::string out = (dir / "trace.csv").string();
    const auto r = ts::run_command(q + " trace -c " + cfg + " -o " + out);
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(csv_column(ts::slurp_file(out), kColAbsDelta).size() == 6);

    const std::string cfg2 = (dir / "trace2.json").string();
    ts::dump_file(cfg2, R"({
      "mode": "phonon",
      "model": {"phonon": {}},
      "tau_grid_ps": [0.6, 1.2],
      "t_grid_ps": [0.0, 1.0],
      "temperatures_K": [0.0]
    })");
    CHECK(ts::run_command(q + " trace -c " + cfg2 + " -o " + out).exit_code == 1);
  }

  SUBCASE("verification run passes and writes its report") {
    const std::string cfg = (dir / "verify.json").string();
    ts::dump_file(cfg, tiny_verify_config_json());
    const std::string out = (dir / "report.json").string();
    const auto r = ts::run_command(q + " verify -c " + cfg + " -o " + out);
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(r.output.find("PASS") != std::string::npos);
    const std::string report = ts::slurp_file(out);
    CHECK(report.find("\"pass\": true") != std::string::npos);
  }

  SUBCASE("documented exit codes reach the shell") {
    const std::string bad = (dir / "bad_key.json").string();
    ts::dump_file(bad, R"({"mode": "spin", "model": {"recipe": {}}, "bogus": 1})");
    const auto r1 = ts::run_command(q + " sweep-tau -c " + bad);
    CHECK(r1.exit_code == 1);
    CHECK(r1.output.find("unknown key") != std::string::npos);

    const std::string transient = (dir / "transient.json").string();
    ts::dump_file(transient, R"({
      "mode": "phonon",
      "model": {"phonon": {}},
      "tau_grid_ps": [0.5],
      "temperatures_K": [0.0],
      "t_eval_ps": 5.0
    })");
    CHECK(ts::run_command(q + " sweep-tau -c " + transient).exit_code == 2);

    const std::string vcfg = (dir / "verify_tight.json").string();
    ts::dump_file(vcfg, tiny_verify_config_json());
    const auto r3 = ts::run_command(q + " verify -c " + vcfg + " -o " +
                                    (dir / "tight.json").string() +
                                    " --tolerance witness_nonzero=1e-30");
    CHECK(r3.exit_code == 3);
  }
}
