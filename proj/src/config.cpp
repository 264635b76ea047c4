#include "qee/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qee {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      std::string known;
      for (const std::string& k : allowed) {
        known += known.empty() ? k : ", " + k;
      }
      fail(path + "." + item.key(), "unknown key (known keys: " + known + ")");
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(path, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    fail(path, "must be finite");
  }
  return v;
}

long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    fail(path, "expected an integer");
  }
  return j.get<long>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) {
    fail(path, "expected true or false");
  }
  return j.get<bool>();
}

double get_double(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* j = find(obj, key);
  return j ? as_double(*j, path + "." + key) : fallback;
}

// A grid is either an explicit array of numbers or {start, stop, points}.
std::vector<double> as_grid(const json& j, const std::string& path) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      grid.push_back(as_double(j[k], path + "[" + std::to_string(k) + "]"));
    }
    return grid;
  }
  if (j.is_object()) {
    reject_unknown_keys(j, path, {"start", "stop", "points"});
    const json* start = find(j, "start");
    const json* stop = find(j, "stop");
    const json* points = find(j, "points");
    if (!start || !stop || !points) {
      fail(path, "linspace grid needs start, stop and points");
    }
    const double a = as_double(*start, path + ".start");
    const double b = as_double(*stop, path + ".stop");
    const long n = as_integer(*points, path + ".points");
    if (n < 2 || b <= a) {
      fail(path, "linspace grid needs points >= 2 and stop > start");
    }
    grid.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
      grid.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    grid.back() = b;
    return grid;
  }
  fail(path, "expected an array of numbers or {start, stop, points}");
}

// Matrix entries are either plain numbers (real) or [re, im] pairs.
ComplexMatrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    fail(path, "expected a nonempty array of rows");
  }
  const std::size_t n = j.size();
  ComplexMatrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const json& row = j[r];
    if (!row.is_array() || row.size() != n) {
      fail(row_path, "expected a row of length " + std::to_string(n) + " (square matrix)");
    }
    for (std::size_t c = 0; c < n; ++c) {
      const std::string cell_path = row_path + "[" + std::to_string(c) + "]";
      const json& cell = row[c];
      if (cell.is_number()) {
        m(static_cast<Index>(r), static_cast<Index>(c)) = Complex(cell.get<double>(), 0.0);
      } else if (cell.is_array() && cell.size() == 2 && cell[0].is_number() &&
                 cell[1].is_number()) {
        m(static_cast<Index>(r), static_cast<Index>(c)) =
            Complex(cell[0].get<double>(), cell[1].get<double>());
      } else {
        fail(cell_path, "expected a number or an [re, im] pair");
      }
    }
  }
  require_finite(m, path.c_str());
  return m;
}

InlineModelConfig parse_matrices(const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path, {"eps0_meV", "eps1_meV", "h_env", "v0", "v1"});
  const json* h = find(obj, "h_env");
  const json* v0 = find(obj, "v0");
  const json* v1 = find(obj, "v1");
  if (!h || !v0 || !v1) {
    fail(path, "needs h_env, v0 and v1");
  }
  InlineModelConfig cfg;
  cfg.eps0_meV = get_double(obj, "eps0_meV", path, 0.0);
  cfg.eps1_meV = get_double(obj, "eps1_meV", path, 0.0);
  cfg.h_env = as_matrix(*h, path + ".h_env");
  cfg.v0 = as_matrix(*v0, path + ".v0");
  cfg.v1 = as_matrix(*v1, path + ".v1");
  return cfg;
}

ModelRecipe parse_recipe(const json& obj, const std::string& path) {
  reject_unknown_keys(
      obj, path, {"seed", "n_spins", "coupling_scale_meV", "asymmetric", "thermal_beta_per_meV"});
  ModelRecipe r;
  if (const json* j = find(obj, "seed")) {
    const long seed = as_integer(*j, path + ".seed");
    if (seed < 0) {
      fail(path + ".seed", "must be nonnegative");
    }
    r.seed = static_cast<std::uint64_t>(seed);
  }
  if (const json* j = find(obj, "n_spins")) {
    const long n = as_integer(*j, path + ".n_spins");
    if (n < 1 || n > 8) {
      fail(path + ".n_spins", "must be in [1, 8]");
    }
    r.n_spins = static_cast<int>(n);
  }
  r.coupling_scale_meV = get_double(obj, "coupling_scale_meV", path, r.coupling_scale_meV);
  if (!(r.coupling_scale_meV > 0.0)) {
    fail(path + ".coupling_scale_meV", "must be positive");
  }
  if (const json* j = find(obj, "asymmetric")) {
    r.asymmetric = as_bool(*j, path + ".asymmetric");
  }
  if (const json* j = find(obj, "thermal_beta_per_meV")) {
    // The string "infinite" names the infinite-temperature limit, which the
    // generator realizes as exactly R0 = I/d (beta = 0).
    if (j->is_string() && j->get<std::string>() == "infinite") {
      r.thermal_beta = 0.0;
    } else {
      r.thermal_beta = as_double(*j, path + ".thermal_beta_per_meV");
      if (r.thermal_beta < 0.0) {
        fail(path + ".thermal_beta_per_meV", "must be >= 0 or the string \"infinite\"");
      }
    }
  }
  return r;
}

PhononBathParams parse_phonon(const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path,
                      {"sigma_diff_eV", "mass_density_kg_m3", "sound_speed_m_s", "l_perp_nm",
                       "l_z_nm"});
  PhononBathParams p;
  p.sigma_diff_eV = get_double(obj, "sigma_diff_eV", path, p.sigma_diff_eV);
  p.mass_density_kg_m3 = get_double(obj, "mass_density_kg_m3", path, p.mass_density_kg_m3);
  p.sound_speed_m_s = get_double(obj, "sound_speed_m_s", path, p.sound_speed_m_s);
  p.l_perp_nm = get_double(obj, "l_perp_nm", path, p.l_perp_nm);
  p.l_z_nm = get_double(obj, "l_z_nm", path, p.l_z_nm);
  if (!(p.mass_density_kg_m3 > 0.0) || !(p.sound_speed_m_s > 0.0) || !(p.l_perp_nm > 0.0) ||
      !(p.l_z_nm > 0.0)) {
    fail(path, "densities, speeds and lengths must be positive");
  }
  return p;
}

void parse_tolerances(const json& obj, const std::string& path, Tolerances& tol) {
  reject_unknown_keys(obj, path,
                      {"witness_nonzero", "negativity_zero", "separability", "commutator_zero",
                       "quadrature_rel"});
  const auto set = [&](const char* key, double& slot) {
    if (const json* j = find(obj, key)) {
      slot = as_double(*j, path + "." + key);
      if (!(slot > 0.0)) {
        fail(path + "." + key, "must be positive");
      }
    }
  };
  set("witness_nonzero", tol.witness_nonzero);
  set("negativity_zero", tol.negativity_zero);
  set("separability", tol.separability);
  set("commutator_zero", tol.commutator_zero);
  set("quadrature_rel", tol.quadrature_rel);
}

void parse_verify(const json& obj, const std::string& path, VerifyOptions& v) {
  reject_unknown_keys(obj, path,
                      {"generic_models", "separable_models", "infinite_temperature_models",
                       "blind_spot_models", "equivalence_models", "simplified_models", "taus_ps",
                       "equivalence_taus_ps", "time_samples", "t_max_ps", "base_seed"});
  const auto set_count = [&](const char* key, int& slot) {
    if (const json* j = find(obj, key)) {
      const long n = as_integer(*j, path + "." + key);
      if (n < 0) {
        fail(path + "." + key, "must be nonnegative");
      }
      slot = static_cast<int>(n);
    }
  };
  set_count("generic_models", v.generic_models);
  set_count("separable_models", v.separable_models);
  set_count("infinite_temperature_models", v.infinite_temperature_models);
  set_count("blind_spot_models", v.blind_spot_models);
  set_count("equivalence_models", v.equivalence_models);
  set_count("simplified_models", v.simplified_models);
  if (const json* j = find(obj, "taus_ps")) {
    v.taus = as_grid(*j, path + ".taus_ps");
  }
  if (const json* j = find(obj, "equivalence_taus_ps")) {
    v.equivalence_taus = as_grid(*j, path + ".equivalence_taus_ps");
  }
  set_count("time_samples", v.time_samples);
  v.t_max = get_double(obj, "t_max_ps", path, v.t_max);
  if (const json* j = find(obj, "base_seed")) {
    const long seed = as_integer(*j, path + ".base_seed");
    if (seed < 0) {
      fail(path + ".base_seed", "must be nonnegative");
    }
    v.base_seed = static_cast<std::uint64_t>(seed);
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + origin + " is not valid JSON: " + e.what());
  }
  if (!root.is_object()) {
    throw ValidationError("config: " + origin + ": top level must be an object");
  }
  reject_unknown_keys(root, origin,
                      {"mode", "model", "simplified", "tau_grid_ps", "t_grid_ps", "t_eval_ps",
                       "temperatures_K", "output", "tolerances", "verify"});

  RunConfig cfg;
  const json* mode = find(root, "mode");
  if (!mode || !mode->is_string()) {
    fail(origin + ".mode", "required; one of \"spin\", \"phonon\", \"verify\"");
  }
  const std::string mode_name = mode->get<std::string>();
  if (mode_name == "spin") {
    cfg.mode = RunMode::kSpin;
  } else if (mode_name == "phonon") {
    cfg.mode = RunMode::kPhonon;
  } else if (mode_name == "verify") {
    cfg.mode = RunMode::kVerify;
  } else {
    fail(origin + ".mode", "unknown mode \"" + mode_name + "\"");
  }

  if (const json* model = find(root, "model")) {
    const std::string path = origin + ".model";
    if (!model->is_object()) {
      fail(path, "expected an object");
    }
    reject_unknown_keys(*model, path, {"matrices", "recipe", "phonon"});
    int sources = 0;
    if (const json* j = find(*model, "matrices")) {
      cfg.matrices = parse_matrices(*j, path + ".matrices");
      ++sources;
    }
    if (const json* j = find(*model, "recipe")) {
      cfg.recipe = parse_recipe(*j, path + ".recipe");
      ++sources;
    }
    if (const json* j = find(*model, "phonon")) {
      cfg.phonon = parse_phonon(*j, path + ".phonon");
      ++sources;
    }
    if (sources != 1) {
      fail(path, "exactly one of matrices, recipe, phonon must be given");
    }
  }

  if (const json* j = find(root, "simplified")) {
    cfg.simplified = as_bool(*j, origin + ".simplified");
  }
  if (const json* j = find(root, "tau_grid_ps")) {
    cfg.tau_grid = as_grid(*j, origin + ".tau_grid_ps");
  }
  if (const json* j = find(root, "t_grid_ps")) {
    cfg.t_grid = as_grid(*j, origin + ".t_grid_ps");
  }
  if (const json* j = find(root, "temperatures_K")) {
    cfg.temperatures = as_grid(*j, origin + ".temperatures_K");
  }
  cfg.t_eval = get_double(root, "t_eval_ps", origin, cfg.t_eval);
  if (const json* j = find(root, "output")) {
    if (!j->is_string()) {
      fail(origin + ".output", "expected a string");
    }
    cfg.output = j->get<std::string>();
  }
  if (const json* j = find(root, "tolerances")) {
    if (!j->is_object()) {
      fail(origin + ".tolerances", "expected an object");
    }
    parse_tolerances(*j, origin + ".tolerances", cfg.tol);
  }
  if (const json* j = find(root, "verify")) {
    if (!j->is_object()) {
      fail(origin + ".verify", "expected an object");
    }
    parse_verify(*j, origin + ".verify", cfg.verify);
  }

  // Mode / model-source consistency.
  if (cfg.mode == RunMode::kSpin && !cfg.matrices && !cfg.recipe) {
    fail(origin + ".model", "spin mode needs model.matrices or model.recipe");
  }
  if (cfg.mode == RunMode::kPhonon && !cfg.phonon) {
    fail(origin + ".model", "phonon mode needs model.phonon");
  }
  if (cfg.mode == RunMode::kPhonon && (cfg.matrices || cfg.recipe)) {
    fail(origin + ".model", "phonon mode cannot take a spin model");
  }
  if (cfg.mode == RunMode::kSpin && cfg.phonon) {
    fail(origin + ".model", "spin mode cannot take a phonon model");
  }
  if (cfg.mode == RunMode::kVerify && (cfg.matrices || cfg.recipe || cfg.phonon)) {
    fail(origin + ".model", "verify mode generates its own corpus; remove the model block");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("config: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_tolerance_override(Tolerances& tol, const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ValidationError("tolerance override must look like name=value, got \"" + spec + "\"");
  }
  const std::string name = spec.substr(0, eq);
  const std::string value_text = spec.substr(eq + 1);
  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(value_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value_text.size() || !(value > 0.0)) {
    throw ValidationError("tolerance " + name + ": value must be a positive number, got \"" +
                          value_text + "\"");
  }
  if (name == "witness_nonzero") {
    tol.witness_nonzero = value;
  } else if (name == "negativity_zero") {
    tol.negativity_zero = value;
  } else if (name == "separability") {
    tol.separability = value;
  } else if (name == "commutator_zero") {
    tol.commutator_zero = value;
  } else if (name == "quadrature_rel") {
    tol.quadrature_rel = value;
  } else {
    throw ValidationError(
        "unknown tolerance \"" + name +
        "\" (valid: witness_nonzero, negativity_zero, separability, commutator_zero, "
        "quadrature_rel)");
  }
}

double default_t_eval(RunMode mode) {
  return mode == RunMode::kPhonon ? 50.0 : 10.0;
}

SpinSetup build_spin_setup(const RunConfig& config) {
  if (config.matrices) {
    const InlineModelConfig& m = *config.matrices;
    return SpinSetup{
        PureDephasingModel(m.eps0_meV, m.eps1_meV, m.h_env, m.v0, m.v1, config.tol),
        std::nullopt, 0.0};
  }
  if (config.recipe) {
    GeneratedModel gm = generate_model(*config.recipe);
    return SpinSetup{std::move(gm.model), std::move(gm.r0), config.recipe->thermal_beta};
  }
  throw ValidationError("config: no spin model source");
}

}  // namespace qee
