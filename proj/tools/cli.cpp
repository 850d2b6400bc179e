#include "entangle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "entangle/bath.hpp"
#include "entangle/errors.hpp"
#include "entangle/oracle.hpp"
#include "entangle/oscillator.hpp"
#include "entangle/qubit.hpp"
#include "entangle/verify.hpp"

namespace entangle::cli {

namespace {

using json = nlohmann::ordered_json;

/// Raised for malformed input that never reaches the physics modules.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Command catalogue
// ---------------------------------------------------------------------------

enum class Kind { real, integer };

struct ParamSpec {
  std::string name;
  Kind kind = Kind::real;
  std::optional<std::string> fallback;  // absent: required
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
  bool tolerances = false;
  bool only = false;
};

const std::vector<CommandSpec>& catalogue() {
  static const std::vector<CommandSpec> commands = {
      {"qubit-dist",
       "two-level energy distribution from a Bloch vector",
       {{"epsilon", Kind::real, std::nullopt, "bias energy"},
        {"delta", Kind::real, std::nullopt, "tunnelling energy"},
        {"sx", Kind::real, "0", "<sigma_x>"},
        {"sy", Kind::real, "0", "<sigma_y>"},
        {"sz", Kind::real, "0", "<sigma_z>"},
        {"hbar", Kind::real, "1", "action unit"}}},
      {"qubit-crossover",
       "weak-coupling p_up and the temperature where thermal occupation matches it",
       {{"gap", Kind::real, std::nullopt, "level splitting E2 - E1"},
        {"alpha", Kind::real, std::nullopt, "dimensionless coupling"},
        {"cutoff", Kind::real, "10", "omega_c / Delta"},
        {"k", Kind::real, "1", "Boltzmann constant in the chosen units"}}},
      {"osc-cumulants",
       "energy cumulants k1..k4 by closed form, finite differences and spectral sums",
       {{"x", Kind::real, std::nullopt, "2 gamma^2 <q^2>"},
        {"y", Kind::real, std::nullopt, "2 <p^2> / (gamma^2 hbar^2)"},
        {"quantum", Kind::real, "1", "hbar omega"}}},
      {"osc-probs",
       "Fock-basis probabilities rho_nn",
       {{"x", Kind::real, std::nullopt, "2 gamma^2 <q^2>"},
        {"y", Kind::real, std::nullopt, "2 <p^2> / (gamma^2 hbar^2)"},
        {"nmax", Kind::integer, "10", "highest Fock level"},
        {"quantum", Kind::real, "1", "hbar omega"}}},
      {"osc-purity",
       "purity from the closed form and from position-space quadrature",
       {{"x", Kind::real, std::nullopt, "2 gamma^2 <q^2>"},
        {"y", Kind::real, std::nullopt, "2 <p^2> / (gamma^2 hbar^2)"}}},
      {"ohmic-trajectory",
       "shape variables, purity and rho_nn along an ohmic coupling sweep",
       {{"alpha-max", Kind::real, "0.9", "largest coupling (inclusive)"},
        {"steps", Kind::integer, "10", "number of grid points"},
        {"cutoff", Kind::real, "10", "omega_c / omega"},
        {"nmax", Kind::integer, "5", "highest Fock level per row"}}},
      {"oracle-verify",
       "exact-diagonalization sweep of a spin-boson surrogate",
       {{"epsilon", Kind::real, "0.5", "bias energy"},
        {"delta", Kind::real, "1", "tunnelling energy"},
        {"omega-c", Kind::real, "10", "bath cutoff frequency"},
        {"modes", Kind::integer, "2", "bath modes"},
        {"cutoff", Kind::integer, "8", "Fock levels per mode"},
        {"alpha-max", Kind::real, "0.16", "largest coupling (inclusive)"},
        {"steps", Kind::integer, "5", "number of grid points"}},
       true},
      {"verify-all", "run the named invariant suites", {}, true, true},
  };
  return commands;
}

const CommandSpec& find_command(const std::string& name) {
  for (const auto& c : catalogue()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown command '" + name + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ", ") + item;
  return out;
}

std::vector<std::string> config_keys(const CommandSpec& spec) {
  std::vector<std::string> keys;
  for (const auto& p : spec.params) keys.push_back(p.name);
  keys.push_back("format");
  keys.push_back("output");
  if (spec.tolerances) keys.push_back("tolerance");
  if (spec.only) keys.push_back("only");
  return keys;
}

// ---------------------------------------------------------------------------
// Raw settings: strings gathered from the config file and the flags
// ---------------------------------------------------------------------------

struct RawSettings {
  std::map<std::string, std::string> params;
  std::optional<std::string> format;
  std::optional<std::string> output;
  std::vector<std::string> tolerances;  // key=value
  std::vector<std::string> only;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void assign_key(RawSettings& raw, const CommandSpec& spec, const std::string& key,
                const std::string& value) {
  const auto keys = config_keys(spec);
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw UsageError("unknown key '" + key + "' for " + spec.name + "; valid keys: " + join(keys));
  }
  if (key == "format") {
    raw.format = value;
  } else if (key == "output") {
    raw.output = value;
  } else if (key == "tolerance") {
    raw.tolerances.push_back(value);
  } else if (key == "only") {
    for (auto& s : split_list(value)) raw.only.push_back(s);
  } else {
    raw.params[key] = value;
  }
}

std::string json_scalar_text(const json& v, const std::string& key) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return number_text(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  throw UsageError("config value for '" + key + "' must be a number or a string");
}

void load_json_config(RawSettings& raw, const CommandSpec& spec, const json& doc) {
  const json& cfg = doc.contains("config") ? doc.at("config") : doc;
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  if (cfg.contains("command") && cfg.at("command") != spec.name) {
    throw UsageError("config is for command '" + json_scalar_text(cfg.at("command"), "command") +
                     "', not '" + spec.name + "'");
  }
  const bool nested = cfg.contains("parameters");
  if (nested) {
    for (const auto& [key, value] : cfg.at("parameters").items()) {
      assign_key(raw, spec, key, json_scalar_text(value, key));
    }
  }
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || key == "parameters") continue;
    if (key == "tolerances") {
      if (!spec.tolerances) assign_key(raw, spec, "tolerance", "");
      for (const auto& [tk, tv] : value.items()) {
        raw.tolerances.push_back(tk + "=" + json_scalar_text(tv, tk));
      }
    } else if (key == "only") {
      if (!spec.only) assign_key(raw, spec, "only", "");
      for (const auto& item : value) raw.only.push_back(json_scalar_text(item, "only"));
    } else {
      assign_key(raw, spec, key, json_scalar_text(value, key));
    }
  }
}

void load_flat_config(RawSettings& raw, const CommandSpec& spec, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(number) + ": expected key = value");
    }
    assign_key(raw, spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void load_config(RawSettings& raw, const CommandSpec& spec, const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw UsageError("config file '" + path + "': " + e.what());
    }
    load_json_config(raw, spec, doc);
  } else {
    load_flat_config(raw, spec, text);
  }
}

// ---------------------------------------------------------------------------
// Resolved settings
// ---------------------------------------------------------------------------

using Value = std::variant<double, long long>;

struct Settings {
  const CommandSpec* spec = nullptr;
  std::map<std::string, Value> values;
  std::string format = "csv";
  std::optional<std::string> output;
  std::map<std::string, double> tolerance_overrides;
  std::vector<std::string> only;

  double real(const std::string& name) const { return std::get<double>(values.at(name)); }
  long long integer(const std::string& name) const { return std::get<long long>(values.at(name)); }
};

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw UsageError("'" + key + "' expects a finite number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw UsageError("'" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

Settings resolve(const CommandSpec& spec, const RawSettings& raw) {
  Settings s;
  s.spec = &spec;
  for (const auto& p : spec.params) {
    const auto it = raw.params.find(p.name);
    std::string text;
    if (it != raw.params.end()) {
      text = it->second;
    } else if (p.fallback) {
      text = *p.fallback;
    } else {
      throw UsageError("missing required parameter --" + p.name);
    }
    if (p.kind == Kind::real) {
      s.values[p.name] = parse_real(p.name, text);
    } else {
      s.values[p.name] = parse_integer(p.name, text);
    }
  }
  if (raw.format) s.format = *raw.format;
  if (s.format != "csv" && s.format != "json") {
    throw UsageError("format must be csv or json, got '" + s.format + "'");
  }
  s.output = raw.output;
  verify::ToleranceSet probe;
  for (const auto& entry : raw.tolerances) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw UsageError("tolerance expects key=value, got '" + entry + "'");
    const std::string key = trim(entry.substr(0, eq));
    const double value = parse_real("tolerance " + key, trim(entry.substr(eq + 1)));
    probe.set(key, value);  // rejects unknown keys
    s.tolerance_overrides[key] = value;
  }
  for (const auto& name : raw.only) {
    const auto& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw UsageError("unknown suite '" + name + "'; valid suites: " + join(names));
    }
    if (std::find(s.only.begin(), s.only.end(), name) == s.only.end()) s.only.push_back(name);
  }
  return s;
}

verify::ToleranceSet tolerance_set(const Settings& s) {
  verify::ToleranceSet t;
  for (const auto& [k, v] : s.tolerance_overrides) t.set(k, v);
  return t;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

using Cell = std::variant<double, long long, std::string, bool>;

struct Result {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json summary = json::object();
  std::vector<std::string> warnings;
  int status = kSuccess;
  std::string failure;
};

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return number_text(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

json json_cell(const Cell& c) {
  return std::visit([](const auto& v) { return json(v); }, c);
}

std::string render_csv(const Result& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i];
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

json config_json(const Settings& s) {
  json cfg;
  cfg["command"] = s.spec->name;
  json params = json::object();
  for (const auto& p : s.spec->params) {
    std::visit([&](const auto& v) { params[p.name] = v; }, s.values.at(p.name));
  }
  cfg["parameters"] = params;
  cfg["format"] = s.format;
  if (s.spec->tolerances) {
    json tol = json::object();
    for (const auto& [k, v] : s.tolerance_overrides) tol[k] = v;
    cfg["tolerances"] = tol;
  }
  if (s.spec->only) cfg["only"] = s.only;
  return cfg;
}

std::string render_json(const Settings& s, const Result& r) {
  json doc;
  doc["config"] = config_json(s);
  json results;
  results["columns"] = r.columns;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (const auto& c : row) jr.push_back(json_cell(c));
    rows.push_back(jr);
  }
  results["rows"] = rows;
  results["summary"] = r.summary;
  results["warnings"] = r.warnings;
  doc["results"] = results;
  doc["provenance"] = {
      {"library", "entangle"},
      {"version", ENTANGLE_VERSION},
      {"units", {{"hbar", 1.0},
                 {"convention",
                  "energies in the units of the inputs; hbar = 1 unless given; logarithms are natural"}}},
      {"exit_status", r.status},
  };
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

Result cmd_qubit_dist(const Settings& s) {
  const qubit::QubitParams p(s.real("epsilon"), s.real("delta"), s.real("hbar"));
  const qubit::BlochVector b{s.real("sx"), s.real("sy"), s.real("sz")};
  qubit::validate(b);
  const double e = qubit::mean_energy(p, b);
  const auto d = qubit::energy_distribution(p, e);
  const auto k = qubit::cumulants_from_two_levels(d, 2);
  Result r;
  r.columns = {"mean_energy", "energy_minus", "energy_plus", "p_down", "p_up", "purity", "variance"};
  r.rows.push_back({e, d.energy_minus, d.energy_plus, d.p_down, d.p_up, qubit::bloch_purity(b), k[1]});
  return r;
}

Result cmd_qubit_crossover(const Settings& s) {
  const qubit::ThermalCrossoverQuery q{s.real("gap"), s.real("alpha"), s.real("cutoff"), s.real("k")};
  const auto p_up = qubit::weak_coupling_p_up(q.alpha, 1.0, q.cutoff_ratio);
  const double t = qubit::crossover_temperature(q);
  Result r;
  if (!p_up.warning.empty()) r.warnings.push_back(p_up.warning);
  r.columns = {"gap", "alpha", "cutoff", "p_up", "crossover_temperature", "thermal_occupation"};
  r.rows.push_back({q.gap, q.alpha, q.cutoff_ratio, p_up.raw, t,
                    qubit::thermal_occupation(q.gap, t, q.boltzmann_k)});
  return r;
}

Result cmd_osc_cumulants(const Settings& s) {
  const auto shape = oscillator::shape_from_xy(s.real("x"), s.real("y"), s.real("quantum"));
  const oscillator::OscillatorParams p(1.0, s.real("quantum"), 1.0);
  const auto closed = oscillator::cumulants_closed_form(shape);
  const auto fd = oscillator::cumulants_finite_difference(shape, 4);
  const int n = oscillator::fock_truncation_for(shape, 1e-12, 4);
  const auto sp = oscillator::spectral_cumulants(oscillator::fock_probabilities(shape, n), p, 4, 1e-12);
  Result r;
  r.columns = {"order", "closed_form", "finite_difference", "spectral"};
  for (int i = 0; i < 4; ++i) r.rows.push_back({static_cast<long long>(i + 1), closed[i], fd[i], sp[i]});
  r.summary["energy"] = shape.energy;
  r.summary["area"] = shape.area;
  r.summary["fock_truncation"] = n;
  return r;
}

Result cmd_osc_probs(const Settings& s) {
  const long long nmax = s.integer("nmax");
  if (nmax < 0 || nmax > oscillator::kMaxFockTruncation) {
    throw DomainError("nmax must lie in [0, " + std::to_string(oscillator::kMaxFockTruncation) + "]");
  }
  const auto shape = oscillator::shape_from_xy(s.real("x"), s.real("y"), s.real("quantum"));
  const auto f = oscillator::fock_probabilities(shape, static_cast<int>(nmax));
  Result r;
  r.columns = {"n", "energy", "rho_nn"};
  for (int n = 0; n <= nmax; ++n) {
    r.rows.push_back({static_cast<long long>(n), (n + 0.5) * shape.quantum, f.probs[n]});
  }
  r.summary["a"] = shape.a;
  r.summary["b"] = shape.b;
  r.summary["d"] = shape.d;
  r.summary["tail_bound"] = f.tail_bound;
  r.summary["envelope_tail"] = f.envelope_tail(0);
  return r;
}

Result cmd_osc_purity(const Settings& s) {
  const auto shape = oscillator::shape_from_xy(s.real("x"), s.real("y"));
  const oscillator::OscillatorParams unit;
  const auto g = oscillator::shape_to_moments(unit, shape);
  Result r;
  r.columns = {"x", "y", "area", "purity", "purity_quadrature"};
  r.rows.push_back({shape.x, shape.y, shape.area, oscillator::purity(shape),
                    oracle::purity_via_quadrature(unit, g)});
  return r;
}

std::string rho_column(int n) {
  if (n < 10) return "rho_" + std::to_string(n) + std::to_string(n);
  return "rho_" + std::to_string(n) + "_" + std::to_string(n);
}

Result cmd_ohmic_trajectory(const Settings& s) {
  const long long steps = s.integer("steps");
  const long long nmax = s.integer("nmax");
  if (steps < 1 || steps > 100000) throw DomainError("steps must lie in [1, 100000]");
  if (nmax < 0 || nmax > oscillator::kMaxFockTruncation) {
    throw DomainError("nmax must lie in [0, " + std::to_string(oscillator::kMaxFockTruncation) + "]");
  }
  const auto rows = bath::ohmic_trajectory(
      bath::uniform_alpha_grid(s.real("alpha-max"), static_cast<int>(steps), s.real("cutoff")),
      static_cast<int>(nmax));
  Result r;
  r.columns = {"alpha", "x", "y", "purity"};
  for (int n = 0; n <= nmax; ++n) r.columns.push_back(rho_column(n));
  r.columns.push_back("tail_bound");
  for (const auto& row : rows) {
    std::vector<Cell> cells{row.alpha, row.x, row.y, row.purity};
    for (double prob : row.probs) cells.push_back(prob);
    cells.push_back(row.tail_bound);
    r.rows.push_back(std::move(cells));
  }
  return r;
}

Result cmd_oracle_verify(const Settings& s) {
  const qubit::QubitParams spin(s.real("epsilon"), s.real("delta"));
  const long long steps = s.integer("steps");
  const long long modes = s.integer("modes");
  const long long cutoff = s.integer("cutoff");
  if (steps < 1 || steps > 1000) throw DomainError("steps must lie in [1, 1000]");
  if (modes < 1 || modes > 16) throw DomainError("modes must lie in [1, 16]");
  if (cutoff < 3 || cutoff > 1000) throw DomainError("cutoff must lie in [3, 1000]");
  const double alpha_max = s.real("alpha-max");
  if (!(alpha_max >= 0.0)) throw DomainError("alpha-max must be non-negative");
  const double omega_c = s.real("omega-c");
  const double limit = tolerance_set(s).get("ed-cutoff");

  auto model_at = [&](double alpha) {
    return oracle::spin_boson_surrogate(spin, alpha, omega_c, static_cast<int>(modes),
                                        static_cast<int>(cutoff));
  };
  // Check the dimension guard of the doubled cutoff before doing any work.
  auto doubled = model_at(alpha_max);
  doubled.fock_cutoff *= 2;
  oracle::validate(doubled);

  Result r;
  r.columns = {"alpha", "p_up", "lambda_min", "purity", "weak_coupling_p_up", "cutoff_change",
               "residual"};
  std::vector<double> alphas;
  double worst_change = 0.0;
  for (long long i = 0; i < steps; ++i) {
    const double alpha = steps == 1 ? alpha_max : alpha_max * static_cast<double>(i) / (steps - 1);
    alphas.push_back(alpha);
    const auto conv = oracle::reduced_density_converged(model_at(alpha));
    const auto pops = oracle::spin_populations(conv.rho, spin);
    double weak = 0.0;
    if (omega_c > spin.delta()) weak = qubit::weak_coupling_p_up(alpha, spin.delta(), omega_c).raw;
    worst_change = std::max(worst_change, conv.cutoff_change);
    r.rows.push_back({alpha, pops.p_up, conv.rho.eigenvalues()[0], conv.rho.purity(), weak,
                      conv.cutoff_change, conv.ground.residual});
  }
  const auto fit = oracle::first_order_structure_check(model_at, alphas);
  r.summary["first_order_fit_ok"] = fit.fit_ok;
  if (fit.fit_ok) {
    r.summary["p_up_slope"] = fit.p_up_slope;
    r.summary["eigenvalue_slope"] = fit.eigenvalue_slope;
    r.summary["purity_slope"] = fit.purity_slope;
    r.summary["difference_loglog_slope"] = fit.difference_loglog;
  } else {
    r.summary["first_order_message"] = fit.message;
  }
  r.summary["max_cutoff_change"] = worst_change;
  if (worst_change > limit) {
    r.status = kToleranceFailure;
    r.failure = "Fock-cutoff convergence: reduced-density change " + number_text(worst_change) +
                " exceeds tolerance " + number_text(limit);
  }
  return r;
}

Result cmd_verify_all(const Settings& s) {
  const auto reports = verify::run_suites(s.only, tolerance_set(s));
  Result r;
  r.columns = {"suite", "check", "error", "tolerance", "pass", "detail"};
  std::vector<std::string> failed;
  for (const auto& rep : reports) {
    for (const auto& c : rep.checks) {
      r.rows.push_back({c.suite, c.check, c.error, c.tolerance, c.pass, c.detail});
      if (!c.pass) failed.push_back(c.suite + "/" + c.check);
    }
  }
  r.summary["suites"] = static_cast<long long>(reports.size());
  r.summary["checks"] = static_cast<long long>(r.rows.size());
  r.summary["failed"] = failed;
  if (!failed.empty()) {
    r.status = kToleranceFailure;
    r.failure = "failed checks: " + join(failed);
  }
  return r;
}

Result execute(const Settings& s) {
  const auto& name = s.spec->name;
  if (name == "qubit-dist") return cmd_qubit_dist(s);
  if (name == "qubit-crossover") return cmd_qubit_crossover(s);
  if (name == "osc-cumulants") return cmd_osc_cumulants(s);
  if (name == "osc-probs") return cmd_osc_probs(s);
  if (name == "osc-purity") return cmd_osc_purity(s);
  if (name == "ohmic-trajectory") return cmd_ohmic_trajectory(s);
  if (name == "oracle-verify") return cmd_oracle_verify(s);
  return cmd_verify_all(s);
}

std::filesystem::path output_path(const Settings& s) {
  if (s.output) return *s.output;
  const char* dir = std::getenv(kOutputDirVariable);
  if (dir && *dir) return std::filesystem::path(dir) / (s.spec->name + "." + s.format);
  return {};
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
  const auto path = output_path(s);
  if (path.empty()) {
    out << text;
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write output file '" + path.string() + "'");
  file << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy statistics of sub-systems entangled with their environment", "entangle"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ENTANGLE_VERSION));

  struct Bound {
    const CommandSpec* spec;
    CLI::App* sub;
    std::map<std::string, std::string> flags;
    std::string config, format, output;
    std::vector<std::string> tolerances, only;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& spec : catalogue()) {
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->sub = app.add_subcommand(spec.name, spec.help);
    for (const auto& p : spec.params) {
      std::string help = p.help;
      if (p.fallback) help += " (default " + *p.fallback + ")";
      b->sub->add_option("--" + p.name, b->flags[p.name], help);
    }
    b->sub->add_option("--config", b->config, "key = value file or JSON document");
    b->sub->add_option("--format", b->format, "csv (default) or json");
    b->sub->add_option("--output", b->output,
                       std::string("output file (default: stdout, or $") + kOutputDirVariable +
                           "/<command>.<format> when set)");
    if (spec.tolerances) {
      b->sub->add_option("--tolerance", b->tolerances, "override a tolerance, key=value (repeatable)");
    }
    if (spec.only) {
      b->sub->add_option("--only", b->only, "restrict to the named suites")->delimiter(',');
    }
    bound.push_back(std::move(b));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }

  const Bound* chosen = nullptr;
  for (const auto& b : bound) {
    if (b->sub->parsed()) chosen = b.get();
  }
  if (!chosen) {
    err << "error: no command given\n";
    return kValidationError;
  }
  const auto& spec = *chosen->spec;
  const auto was_given = [&](const std::string& flag) { return chosen->sub->count(flag) > 0; };

  Settings settings;
  try {
    RawSettings raw;
    if (was_given("--config")) load_config(raw, spec, chosen->config);
    for (const auto& p : spec.params) {
      if (was_given("--" + p.name)) raw.params[p.name] = chosen->flags.at(p.name);
    }
    if (was_given("--format")) raw.format = chosen->format;
    if (was_given("--output")) raw.output = chosen->output;
    if (spec.tolerances && was_given("--tolerance")) {
      for (const auto& t : chosen->tolerances) raw.tolerances.push_back(t);
    }
    if (spec.only && was_given("--only")) raw.only = chosen->only;
    settings = resolve(spec, raw);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    const Result result = execute(settings);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    emit(settings, settings.format == "json" ? render_json(settings, result) : render_csv(result), out);
    if (result.status != kSuccess) err << "error: " << result.failure << "\n";
    return result.status;
  } catch (const ToleranceError& e) {
    err << "error: tolerance not met: " << e.what() << "\n";
    return kToleranceFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
}

}  // namespace entangle::cli
