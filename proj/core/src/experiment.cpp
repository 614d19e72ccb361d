#include "antic/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "antic/error.hpp"
#include "antic/numeric.hpp"

namespace antic {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// small helpers

std::string load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output file: " + path.string());
  out << text;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double get_num(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError(where + ": missing numeric field '" + key + "'");
  return obj[key].get<double>();
}

double get_num_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("field '" + key + "' must be numeric");
  return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ConfigError(where + ": missing string field '" + key + "'");
  return obj[key].get<std::string>();
}

std::vector<double> get_vec(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_array())
    throw ConfigError(where + ": missing array field '" + key + "'");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError(where + "." + key + ": entries must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// potential / kernel / model (de)serialization

Potential parse_potential(const json& j, const std::string& where) {
  const std::string type = get_str(j, where, "type");
  if (type == "power_law") {
    require_keys(j, where, {"type", "a", "beta"});
    const double a = get_num(j, where, "a");
    const double beta = get_num(j, where, "beta");
    if (!(a > 0.0)) throw ConfigError(where + ": power_law needs a > 0");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError(where + ": beta must be in [0, 1)");
    return PowerLawPotential{a, beta};
  }
  if (type == "quadratic") {
    require_keys(j, where, {"type", "a"});
    const double a = get_num(j, where, "a");
    if (!(a > 0.0)) throw ConfigError(where + ": quadratic needs a > 0");
    return QuadraticPotential{a};
  }
  if (type == "repulsive_attractive") {
    require_keys(j, where, {"type", "k", "r0"});
    const double k = get_num(j, where, "k");
    const double r0 = get_num(j, where, "r0");
    if (!(k > 0.0) || !(r0 > 0.0))
      throw ConfigError(where + ": repulsive_attractive needs k > 0 and r0 > 0");
    return RepulsiveAttractivePotential{k, r0};
  }
  if (type == "tabulated") {
    require_keys(j, where, {"type", "knots", "du", "interpolation"});
    if (j.contains("interpolation") && j["interpolation"] != "pchip")
      throw ConfigError(where + ": only 'pchip' interpolation is supported");
    try {
      return TabulatedPotential(get_vec(j, where, "knots"), get_vec(j, where, "du"));
    } catch (const InputError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": unknown potential type '" + type + "'");
}

json potential_json(const Potential& p) {
  json j;
  if (const auto* q = std::get_if<PowerLawPotential>(&p)) {
    j["type"] = "power_law";
    j["a"] = q->a;
    j["beta"] = q->beta;
  } else if (const auto* q = std::get_if<QuadraticPotential>(&p)) {
    j["type"] = "quadratic";
    j["a"] = q->a;
  } else if (const auto* q = std::get_if<RepulsiveAttractivePotential>(&p)) {
    j["type"] = "repulsive_attractive";
    j["k"] = q->k;
    j["r0"] = q->r0;
  } else {
    const auto& tab = std::get<TabulatedPotential>(p);
    j["type"] = "tabulated";
    j["knots"] = tab.knots();
    j["du"] = tab.du_values();
    j["interpolation"] = "pchip";
  }
  return j;
}

Kernel parse_kernel(const json& j, const std::string& where) {
  const std::string type = get_str(j, where, "type");
  if (type == "scalar_fat_tail") {
    require_keys(j, where, {"type", "phi_minus", "gamma"});
    const double phi = get_num(j, where, "phi_minus");
    const double gamma = get_num(j, where, "gamma");
    if (!(phi > 0.0)) throw ConfigError(where + ": phi_minus must be > 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError(where + ": gamma must be in [0, 1)");
    return ScalarFatTailKernel{phi, gamma};
  }
  if (type == "constant") {
    require_keys(j, where, {"type", "phi"});
    const double phi = get_num(j, where, "phi");
    if (!(phi > 0.0)) throw ConfigError(where + ": phi must be > 0");
    return ConstantKernel{phi};
  }
  if (type == "hessian") {
    require_keys(j, where, {"type", "potential", "eval_point"});
    if (!j.contains("potential"))
      throw ConfigError(where + ": hessian kernel needs a potential");
    const std::string at = j.contains("eval_point") ? get_str(j, where, "eval_point")
                                                    : std::string("current");
    if (at != "current" && at != "anticipated")
      throw ConfigError(where + ": eval_point must be 'current' or 'anticipated'");
    return HessianKernel{parse_potential(j["potential"], where + ".potential"),
                         at == "current" ? KernelEvalPoint::current
                                         : KernelEvalPoint::anticipated};
  }
  throw ConfigError(where + ": unknown kernel type '" + type + "'");
}

json kernel_json(const Kernel& k) {
  json j;
  if (const auto* q = std::get_if<ScalarFatTailKernel>(&k)) {
    j["type"] = "scalar_fat_tail";
    j["phi_minus"] = q->phi_minus;
    j["gamma"] = q->gamma;
  } else if (const auto* q = std::get_if<ConstantKernel>(&k)) {
    j["type"] = "constant";
    j["phi"] = q->phi;
  } else {
    const auto& h = std::get<HessianKernel>(k);
    j["type"] = "hessian";
    j["potential"] = potential_json(h.potential);
    j["eval_point"] = h.eval_point == KernelEvalPoint::current ? "current" : "anticipated";
  }
  return j;
}

// ---------------------------------------------------------------------------
// simulation config

struct InitialSpec {
  bool random = true;
  std::uint64_t seed = 0;
  double position_scale = 1.0;
  double velocity_scale = 1.0;
  std::vector<double> mean_velocity;  // empty or size d
  bool zero_momentum = false;
  std::vector<double> x, v;  // table form
};

struct FitSpec {
  std::string series = "d_cal_E";
  double t_lo = 10.0;
  std::optional<double> t_hi;
};

struct SimulationConfig {
  Model model{AtModel{QuadraticPotential{1.0}, 0.0}};
  int n = 0;
  int d = 0;
  InitialSpec initial;
  IntegratorSpec integrator;
  bool h_explicit = false;
  ModifiedEnergyParams modified;
  FitSpec fit;
  bool envelopes = true;
  std::string csv_name = "diagnostics.csv";
  std::string summary_name = "summary.json";
  std::vector<std::string> warnings;
};

double default_step_size(const Model& model) {
  double stiffness = 0.0;
  if (const Potential* pot = model_potential(model))
    stiffness = classify_potential(*pot, 10.0, 1001).bounded.value;
  else {
    const auto& cs = std::get<CsModel>(model);
    stiffness = cs.tau * kernel_upper_bound(cs.kernel, 10.0);
  }
  if (!(stiffness > 0.0)) return 1e-2;
  return 1e-2 * std::min(1.0, 1.0 / std::sqrt(stiffness));
}

SimulationConfig parse_simulation_config(const json& root) {
  require_keys(root, "config",
               {"version", "model", "potential", "kernel", "agents", "initial", "integrator",
                "diagnostics", "output", "sweep"});
  if (!root.contains("version") || root["version"] != 1)
    throw ConfigError("config: missing or unsupported version (expected 1)");

  SimulationConfig cfg;

  if (!root.contains("model")) throw ConfigError("config: missing 'model'");
  const json& jm = root["model"];
  require_keys(jm, "model", {"type", "tau"});
  const std::string mtype = get_str(jm, "model", "type");
  const double tau = get_num(jm, "model", "tau");
  if (!(tau >= 0.0)) throw ConfigError("model.tau must be >= 0");

  if (mtype == "at") {
    if (!root.contains("potential")) throw ConfigError("at model requires a potential");
    if (root.contains("kernel")) throw ConfigError("at model does not take a kernel");
    cfg.model = AtModel{parse_potential(root["potential"], "potential"), tau};
  } else if (mtype == "phiu") {
    if (!root.contains("potential")) throw ConfigError("phiu model requires a potential");
    if (!root.contains("kernel")) throw ConfigError("phiu model requires a kernel");
    cfg.model = PhiUModel{parse_potential(root["potential"], "potential"),
                          parse_kernel(root["kernel"], "kernel"), tau};
  } else if (mtype == "cs") {
    if (root.contains("potential"))
      throw ConfigError("cs model forbids a potential entry");
    if (!root.contains("kernel")) throw ConfigError("cs model requires a kernel");
    cfg.model = CsModel{parse_kernel(root["kernel"], "kernel"), tau};
  } else {
    throw ConfigError("model.type must be one of 'at', 'phiu', 'cs'");
  }

  if (!root.contains("agents")) throw ConfigError("config: missing 'agents'");
  const json& ja = root["agents"];
  require_keys(ja, "agents", {"n", "d"});
  cfg.n = static_cast<int>(get_num(ja, "agents", "n"));
  cfg.d = static_cast<int>(get_num(ja, "agents", "d"));
  if (cfg.n < 1 || cfg.d < 1) throw ConfigError("agents: need n >= 1 and d >= 1");

  if (!root.contains("initial")) throw ConfigError("config: missing 'initial'");
  const json& ji = root["initial"];
  const std::string itype = get_str(ji, "initial", "type");
  if (itype == "random") {
    require_keys(ji, "initial",
                 {"type", "seed", "position_scale", "velocity_scale", "mean_velocity",
                  "zero_momentum"});
    if (!ji.contains("seed"))
      throw ConfigError("initial: seed is mandatory for random initial conditions");
    cfg.initial.random = true;
    cfg.initial.seed = ji["seed"].get<std::uint64_t>();
    cfg.initial.position_scale = get_num_or(ji, "position_scale", 1.0);
    cfg.initial.velocity_scale = get_num_or(ji, "velocity_scale", 1.0);
    if (ji.contains("mean_velocity")) {
      cfg.initial.mean_velocity = get_vec(ji, "initial", "mean_velocity");
      if (cfg.initial.mean_velocity.size() != static_cast<std::size_t>(cfg.d))
        throw ConfigError("initial.mean_velocity must have d entries");
    }
    cfg.initial.zero_momentum =
        ji.contains("zero_momentum") && ji["zero_momentum"].get<bool>();
  } else if (itype == "table") {
    require_keys(ji, "initial", {"type", "x", "v"});
    cfg.initial.random = false;
    for (const char* key : {"x", "v"}) {
      if (!ji.contains(key))
        throw ConfigError(std::string("initial.") + key + " is required for table input");
      const json& rows = ji[key];
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(cfg.n))
        throw ConfigError(std::string("initial.") + key + " must be an n-row array");
      auto& flat = key[0] == 'x' ? cfg.initial.x : cfg.initial.v;
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(cfg.d))
          throw ConfigError(std::string("initial.") + key + " rows must have d entries");
        for (const auto& val : row) flat.push_back(val.get<double>());
      }
    }
  } else {
    throw ConfigError("initial.type must be 'random' or 'table'");
  }

  if (!root.contains("integrator")) throw ConfigError("config: missing 'integrator'");
  const json& jg = root["integrator"];
  require_keys(jg, "integrator",
               {"method", "h", "t_end", "sample_stride", "blowup_guard"});
  const std::string method =
      jg.contains("method") ? get_str(jg, "integrator", "method") : std::string("rk4");
  if (method != "rk4" && method != "euler")
    throw ConfigError("integrator.method must be 'rk4' or 'euler'");
  cfg.integrator.method = method == "rk4" ? Method::rk4 : Method::euler;
  cfg.integrator.t_end = get_num(jg, "integrator", "t_end");
  cfg.h_explicit = jg.contains("h");
  cfg.integrator.h = cfg.h_explicit ? get_num(jg, "integrator", "h")
                                    : default_step_size(cfg.model);
  cfg.integrator.sample_stride = static_cast<int>(get_num_or(jg, "sample_stride", 1));
  cfg.integrator.blowup_guard = get_num_or(jg, "blowup_guard", 1e8);
  validate_integrator_spec(cfg.integrator);

  if (root.contains("diagnostics")) {
    const json& jd = root["diagnostics"];
    require_keys(jd, "diagnostics", {"modified_energy", "fit", "envelopes"});
    if (jd.contains("modified_energy")) {
      const json& jme = jd["modified_energy"];
      require_keys(jme, "diagnostics.modified_energy", {"eps0", "alpha"});
      cfg.modified.eps0 = get_num_or(jme, "eps0", 1e-2);
      if (jme.contains("alpha") && !jme["alpha"].is_null())
        cfg.modified.alpha = jme["alpha"].get<double>();
    }
    if (jd.contains("fit")) {
      const json& jf = jd["fit"];
      require_keys(jf, "diagnostics.fit", {"series", "window"});
      if (jf.contains("series")) cfg.fit.series = jf["series"].get<std::string>();
      static const std::set<std::string> series{"E", "cal_E", "dE", "d_cal_E"};
      if (!series.count(cfg.fit.series))
        throw ConfigError("diagnostics.fit.series must be one of E, cal_E, dE, d_cal_E");
      if (jf.contains("window")) {
        const json& w = jf["window"];
        if (!w.is_array() || w.size() != 2)
          throw ConfigError("diagnostics.fit.window must be [t_lo, t_hi]");
        cfg.fit.t_lo = w[0].get<double>();
        if (!w[1].is_null()) cfg.fit.t_hi = w[1].get<double>();
      }
    }
    if (jd.contains("envelopes")) cfg.envelopes = jd["envelopes"].get<bool>();
  }

  if (root.contains("output")) {
    const json& jo = root["output"];
    require_keys(jo, "output", {"csv", "summary"});
    if (jo.contains("csv")) cfg.csv_name = jo["csv"].get<std::string>();
    if (jo.contains("summary")) cfg.summary_name = jo["summary"].get<std::string>();
  }

  // Flocking-theorem parameter range is a warning, not an error.
  const Potential* pot = model_potential(cfg.model);
  const double beta = pot ? potential_beta(*pot) : 0.0;
  double gamma = beta;
  if (const auto* m = std::get_if<PhiUModel>(&cfg.model)) gamma = kernel_gamma(m->kernel);
  if (const auto* m = std::get_if<CsModel>(&cfg.model)) gamma = kernel_gamma(m->kernel);
  if (pot && 3.0 * beta + 2.0 * std::max(beta, gamma) >= 4.0)
    cfg.warnings.push_back("decay parameters outside the guaranteed range: 3*beta + "
                           "2*max(beta, gamma) >= 4");
  if (!pot && 1.5 * gamma >= 1.0)
    cfg.warnings.push_back("kernel tail gamma >= 2/3: alignment decay not guaranteed");

  return cfg;
}

json simulation_config_json(const SimulationConfig& cfg) {
  json root;
  root["version"] = 1;
  json jm;
  if (const auto* m = std::get_if<AtModel>(&cfg.model)) {
    jm["type"] = "at";
    jm["tau"] = m->tau;
    root["potential"] = potential_json(m->potential);
  } else if (const auto* m = std::get_if<PhiUModel>(&cfg.model)) {
    jm["type"] = "phiu";
    jm["tau"] = m->tau;
    root["potential"] = potential_json(m->potential);
    root["kernel"] = kernel_json(m->kernel);
  } else {
    const auto& cs = std::get<CsModel>(cfg.model);
    jm["type"] = "cs";
    jm["tau"] = cs.tau;
    root["kernel"] = kernel_json(cs.kernel);
  }
  root["model"] = jm;
  root["agents"] = {{"n", cfg.n}, {"d", cfg.d}};

  json ji;
  if (cfg.initial.random) {
    ji["type"] = "random";
    ji["seed"] = cfg.initial.seed;
    ji["position_scale"] = cfg.initial.position_scale;
    ji["velocity_scale"] = cfg.initial.velocity_scale;
    if (!cfg.initial.mean_velocity.empty()) ji["mean_velocity"] = cfg.initial.mean_velocity;
    ji["zero_momentum"] = cfg.initial.zero_momentum;
  } else {
    ji["type"] = "table";
    json jx = json::array(), jv = json::array();
    for (int i = 0; i < cfg.n; ++i) {
      json rx = json::array(), rv = json::array();
      for (int a = 0; a < cfg.d; ++a) {
        rx.push_back(cfg.initial.x[static_cast<std::size_t>(i) * cfg.d + a]);
        rv.push_back(cfg.initial.v[static_cast<std::size_t>(i) * cfg.d + a]);
      }
      jx.push_back(rx);
      jv.push_back(rv);
    }
    ji["x"] = jx;
    ji["v"] = jv;
  }
  root["initial"] = ji;

  root["integrator"] = {{"method", cfg.integrator.method == Method::rk4 ? "rk4" : "euler"},
                        {"h", cfg.integrator.h},
                        {"t_end", cfg.integrator.t_end},
                        {"sample_stride", cfg.integrator.sample_stride},
                        {"blowup_guard", cfg.integrator.blowup_guard}};

  json jme;
  jme["eps0"] = cfg.modified.eps0;
  if (cfg.modified.alpha)
    jme["alpha"] = *cfg.modified.alpha;
  else
    jme["alpha"] = nullptr;
  json jf;
  jf["series"] = cfg.fit.series;
  jf["window"] = {cfg.fit.t_lo, cfg.fit.t_hi ? json(*cfg.fit.t_hi) : json(nullptr)};
  root["diagnostics"] = {{"modified_energy", jme}, {"fit", jf}, {"envelopes", cfg.envelopes}};
  root["output"] = {{"csv", cfg.csv_name}, {"summary", cfg.summary_name}};
  return root;
}

SwarmState build_initial_state(const SimulationConfig& cfg) {
  SwarmState state(cfg.n, cfg.d);
  if (!cfg.initial.random) {
    state.x = cfg.initial.x;
    state.v = cfg.initial.v;
    if (!all_finite(state.x) || !all_finite(state.v))
      throw ConfigError("initial table contains non-finite entries");
    return state;
  }
  Rng rng(cfg.initial.seed);
  for (auto& val : state.x) val = cfg.initial.position_scale * rng.normal();
  for (auto& val : state.v) val = cfg.initial.velocity_scale * rng.normal();
  if (!cfg.initial.mean_velocity.empty())
    for (int i = 0; i < cfg.n; ++i)
      for (int a = 0; a < cfg.d; ++a)
        state.v[static_cast<std::size_t>(i) * cfg.d + a] += cfg.initial.mean_velocity[a];
  if (cfg.initial.zero_momentum) {
    for (int a = 0; a < cfg.d; ++a) {
      double mx = 0.0, mv = 0.0;
      for (int i = 0; i < cfg.n; ++i) {
        mx += state.x[static_cast<std::size_t>(i) * cfg.d + a];
        mv += state.v[static_cast<std::size_t>(i) * cfg.d + a];
      }
      mx /= cfg.n;
      mv /= cfg.n;
      for (int i = 0; i < cfg.n; ++i) {
        state.x[static_cast<std::size_t>(i) * cfg.d + a] -= mx;
        state.v[static_cast<std::size_t>(i) * cfg.d + a] -= mv;
      }
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// fitting helpers

// Thin a sorted abscissa to at most m log-spaced samples (indices).
std::vector<std::size_t> log_spaced_indices(std::span<const double> t, double lo, double hi,
                                            std::size_t m) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= lo && t[i] <= hi) idx.push_back(i);
  if (idx.size() <= m || idx.empty()) return idx;
  const double a = std::log(std::max(t[idx.front()], 1e-300));
  const double b = std::log(std::max(t[idx.back()], 1e-300));
  std::vector<std::size_t> out;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double target = std::exp(a + (b - a) * k / (m - 1));
    while (cursor + 1 < idx.size() && t[idx[cursor]] < target) ++cursor;
    if (out.empty() || out.back() != idx[cursor]) out.push_back(idx[cursor]);
  }
  return out;
}

json fit_to_json(const FitSpec& fit, const std::vector<DiagnosticsRow>& rows, double t_end) {
  json out;
  out["series"] = fit.series;
  const double hi = fit.t_hi.value_or(t_end);
  out["window"] = {fit.t_lo, hi};
  auto pick = [&](const DiagnosticsRow& r) {
    if (fit.series == "E") return r.E;
    if (fit.series == "cal_E") return r.cal_E;
    if (fit.series == "dE") return r.dE;
    return r.d_cal_E;
  };
  std::vector<double> ts, fs;
  ts.reserve(rows.size());
  for (const auto& r : rows) {
    ts.push_back(r.t);
    fs.push_back(pick(r));
  }
  try {
    const auto idx = log_spaced_indices(ts, fit.t_lo, hi, 400);
    std::vector<double> tt, ff;
    for (auto i : idx) {
      tt.push_back(ts[i]);
      ff.push_back(fs[i]);
    }
    const ExponentFit res = fit_subexp_exponent(tt, ff, fit.t_lo, hi);
    out["slope"] = res.slope;
    out["stderr"] = res.stderr_;
    out["n_used"] = res.n_used;
  } catch (const FitError& e) {
    out["error"] = e.what();
  }
  return out;
}

json envelope_to_json(const EnvelopeChannel& ch) {
  return {{"exponent", ch.exponent},
          {"c_head", ch.c_head},
          {"c_all", ch.c_all},
          {"violations", ch.violations},
          {"first_violation_t", ch.violations > 0 ? json(ch.first_violation_t) : json(nullptr)}};
}

double trapezoid(const std::vector<DiagnosticsRow>& rows,
                 double (*pick)(const DiagnosticsRow&)) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k)
    acc += 0.5 * (pick(rows[k]) + pick(rows[k + 1])) * (rows[k + 1].t - rows[k].t);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV rendering

std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::string out = kDiagnosticsCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_csv_value(r.t);
    for (double v : {r.E, r.cal_E, r.dE, r.d_cal_E, r.enstrophy, r.X, r.X_tau, r.Vmax,
                     r.E_hat.value_or(0.0)}) {
      out += ',';
      out += format_csv_value(v);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// simulate

namespace {

SimulationResult run_simulation(const SimulationConfig& cfg) {
  SwarmState state = build_initial_state(cfg);

  SimulationResult result;
  result.rows.reserve(
      static_cast<std::size_t>(cfg.integrator.t_end / cfg.integrator.h /
                               cfg.integrator.sample_stride) +
      2);
  const auto observer = [&](long, const SwarmState& s) {
    result.rows.push_back(make_row(s, cfg.model, cfg.modified));
  };
  const IntegrationResult integ = integrate(cfg.model, std::move(state), cfg.integrator,
                                            observer);
  result.blowup = integ.blowup;
  result.final_state = integ.final_state;
  result.exit_code = integ.blowup ? kExitBlowup : kExitOk;
  result.csv = diagnostics_csv(result.rows);

  // summary
  json sum;
  sum["version"] = 1;
  sum["command"] = "simulate";
  sum["config"] = simulation_config_json(cfg);
  if (cfg.initial.random) sum["seed"] = cfg.initial.seed;
  sum["rows"] = result.rows.size();
  sum["warnings"] = cfg.warnings;

  if (!result.rows.empty()) {
    const DiagnosticsRow& first = result.rows.front();
    double vdrift = 0.0, path_err = 0.0;
    for (const auto& r : result.rows) {
      double dv2 = 0.0, dx2 = 0.0;
      for (int a = 0; a < cfg.d; ++a) {
        const double dv = r.vbar[a] - first.vbar[a];
        const double dx = r.xbar[a] - (first.xbar[a] + (r.t - first.t) * first.vbar[a]);
        dv2 += dv * dv;
        dx2 += dx * dx;
      }
      vdrift = std::max(vdrift, std::sqrt(dv2));
      path_err = std::max(path_err, std::sqrt(dx2));
    }
    sum["momentum"] = {{"vbar_drift", vdrift}, {"mean_path_error", path_err}};

    sum["fit"] = fit_to_json(cfg.fit, result.rows, cfg.integrator.t_end);

    const Potential* pot = model_potential(cfg.model);
    if (cfg.envelopes && pot && result.rows.size() >= 2) {
      const EnvelopeReport env = spread_envelopes(result.rows, potential_beta(*pot));
      sum["envelopes"] = {{"beta", potential_beta(*pot)},
                          {"X", envelope_to_json(env.X)},
                          {"X_tau", envelope_to_json(env.X_tau)},
                          {"Vmax", envelope_to_json(env.Vmax)}};
    } else {
      sum["envelopes"] = nullptr;
    }

    // Dissipation bookkeeping: the anticipated energy decays for AT; the
    // instantaneous energy decays for positive-semidefinite kernels.
    bool monotone_applicable = false;
    std::string monotone_series;
    if (std::holds_alternative<AtModel>(cfg.model)) {
      monotone_applicable = model_tau(cfg.model) > 0.0;
      monotone_series = "cal_E";
    } else {
      const Kernel* kernel = nullptr;
      if (const auto* m = std::get_if<PhiUModel>(&cfg.model)) kernel = &m->kernel;
      if (const auto* m = std::get_if<CsModel>(&cfg.model)) kernel = &m->kernel;
      bool psd = true;
      if (kernel && std::holds_alternative<HessianKernel>(*kernel))
        psd = classify_potential(std::get<HessianKernel>(*kernel).potential, 10.0, 1001)
                  .convex.pass;
      if (const auto* m = std::get_if<PhiUModel>(&cfg.model))
        psd = psd && classify_potential(m->potential, 10.0, 1001).convex.pass;
      monotone_applicable = psd;
      monotone_series = "E";
    }
    json je;
    je["E0"] = first.E;
    je["E_end"] = result.rows.back().E;
    je["cal_E0"] = first.cal_E;
    je["cal_E_end"] = result.rows.back().cal_E;
    if (monotone_applicable) {
      auto pick = [&](const DiagnosticsRow& r) {
        return monotone_series == "cal_E" ? r.cal_E : r.E;
      };
      double max_uptick = 0.0;
      for (std::size_t k = 0; k + 1 < result.rows.size(); ++k)
        max_uptick = std::max(max_uptick, pick(result.rows[k + 1]) - pick(result.rows[k]));
      je["monotone_series"] = monotone_series;
      je["max_uptick"] = max_uptick;
      je["monotone_ok"] = max_uptick <= 1e-9 * (1.0 + std::abs(pick(first)));
    } else {
      je["monotone_series"] = nullptr;
    }
    if (std::holds_alternative<AtModel>(cfg.model)) {
      const double drop = first.cal_E - result.rows.back().cal_E;
      const double acc =
          trapezoid(result.rows, [](const DiagnosticsRow& r) { return r.enstrophy; });
      const double residual = std::abs(drop - acc);
      je["enstrophy_identity"] = {
          {"drop", drop},
          {"trapezoid", acc},
          {"residual", residual},
          {"rel_residual", residual / std::max(std::abs(drop), 1e-300)},
          {"applicable", cfg.integrator.sample_stride == 1 && cfg.integrator.h <= 1e-3}};
    }
    sum["energy"] = je;
  }

  if (result.blowup) {
    sum["blowup"] = {{"t", result.blowup->t},
                     {"agent", result.blowup->agent},
                     {"step", result.blowup->step}};
  } else {
    sum["blowup"] = nullptr;
  }
  sum["exit_code"] = result.exit_code;
  result.summary_json = sum.dump(2);
  result.summary_json += '\n';
  return result;
}

SimulationConfig config_from_json_text(const std::string& text,
                                       std::optional<std::uint64_t> seed_override) {
  json root = parse_json(text);
  if (root.contains("sweep")) root.erase("sweep");
  SimulationConfig cfg = parse_simulation_config(root);
  if (seed_override) {
    if (!cfg.initial.random)
      cfg.warnings.push_back("--seed ignored: initial conditions come from a table");
    else
      cfg.initial.seed = *seed_override;
  }
  return cfg;
}

}  // namespace

SimulationResult run_simulation_config(const std::string& config_text,
                                       std::optional<std::uint64_t> seed_override) {
  return run_simulation(config_from_json_text(config_text, seed_override));
}

std::string normalize_simulation_config(const std::string& config_text) {
  const SimulationConfig cfg = config_from_json_text(config_text, {});
  return simulation_config_json(cfg).dump(2) + "\n";
}

namespace {

int guarded(bool quiet, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    if (!quiet) std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    if (!quiet) std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}

}  // namespace

int run_simulate(const CliOptions& opt) {
  return guarded(opt.quiet, [&]() {
    const std::string text = load_text(opt.config);
    const SimulationConfig cfg = config_from_json_text(text, opt.seed);
    const SimulationResult result = run_simulation(cfg);
    write_text(opt.out_dir / cfg.csv_name, result.csv);
    write_text(opt.out_dir / cfg.summary_name, result.summary_json);
    if (!opt.quiet) {
      for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "simulate: " << result.rows.size() << " rows -> "
                << (opt.out_dir / cfg.csv_name).string();
      if (result.blowup)
        std::cout << " (blow-up at t = " << result.blowup->t << ", agent "
                  << result.blowup->agent << ")";
      std::cout << "\n";
    }
    return result.exit_code;
  });
}

// ---------------------------------------------------------------------------
// sweep

namespace {

struct SweepAxis {
  std::string path;
  std::vector<json> values;
};

json* navigate(json& root, const std::string& dotted) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

}  // namespace

int run_sweep(const CliOptions& opt) {
  return guarded(opt.quiet, [&]() {
    const json root = parse_json(load_text(opt.config));
    if (!root.contains("sweep")) throw ConfigError("sweep: config has no 'sweep' section");
    const json& js = root["sweep"];
    require_keys(js, "sweep", {"axes", "aggregate_csv"});
    if (!js.contains("axes") || !js["axes"].is_array() || js["axes"].empty())
      throw ConfigError("sweep.axes must be a non-empty array");

    std::vector<SweepAxis> axes;
    for (const auto& ja : js["axes"]) {
      require_keys(ja, "sweep.axes[]", {"path", "values"});
      SweepAxis axis;
      axis.path = get_str(ja, "sweep.axes[]", "path");
      if (!ja.contains("values") || !ja["values"].is_array() || ja["values"].empty())
        throw ConfigError("sweep axis '" + axis.path + "' needs a non-empty values array");
      for (const auto& v : ja["values"]) axis.values.push_back(v);
      axes.push_back(std::move(axis));
    }
    const std::string aggregate_name =
        js.contains("aggregate_csv") ? js["aggregate_csv"].get<std::string>()
                                     : std::string("sweep.csv");

    // validate the template once (axis paths must exist)
    {
      json probe = root;
      probe.erase("sweep");
      for (const auto& axis : axes) {
        json copy = probe;
        if (!navigate(copy, axis.path))
          throw ConfigError("sweep axis path not found in config: " + axis.path);
      }
      parse_simulation_config(probe);
    }

    long total = 1;
    for (const auto& axis : axes) total *= static_cast<long>(axis.values.size());

    std::string agg = "cell";
    for (const auto& axis : axes) {
      std::string name = axis.path;
      std::replace(name.begin(), name.end(), '.', '_');
      agg += "," + name;
    }
    agg += ",status,slope,stderr,X_C,X_violations,Xtau_C,Xtau_violations,blowup_t\n";

    for (long cell = 0; cell < total; ++cell) {
      json cell_cfg = root;
      cell_cfg.erase("sweep");
      long rem = cell;
      std::vector<json> coords;
      for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
        const long idx = rem % static_cast<long>(it->values.size());
        rem /= static_cast<long>(it->values.size());
        coords.insert(coords.begin(), it->values[idx]);
      }
      for (std::size_t a = 0; a < axes.size(); ++a)
        *navigate(cell_cfg, axes[a].path) = coords[a];

      char cell_name[32];
      std::snprintf(cell_name, sizeof cell_name, "cell_%03ld", cell);
      const std::filesystem::path cell_dir = opt.out_dir / "cells" / cell_name;

      agg += std::to_string(cell);
      for (const auto& c : coords) agg += "," + c.dump();

      try {
        const SimulationConfig cfg =
            config_from_json_text(cell_cfg.dump(), opt.seed);
        const SimulationResult result = run_simulation(cfg);
        write_text(cell_dir / cfg.csv_name, result.csv);
        write_text(cell_dir / cfg.summary_name, result.summary_json);

        const json sum = json::parse(result.summary_json);
        const json& fit = sum["fit"];
        agg += result.blowup ? ",blowup" : ",ok";
        agg += fit.contains("slope") ? "," + format_csv_value(fit["slope"].get<double>())
                                     : ",";
        agg += fit.contains("stderr") ? "," + format_csv_value(fit["stderr"].get<double>())
                                      : ",";
        if (!sum["envelopes"].is_null()) {
          const json& env = sum["envelopes"];
          agg += "," + format_csv_value(env["X"]["c_all"].get<double>());
          agg += "," + std::to_string(env["X"]["violations"].get<int>());
          agg += "," + format_csv_value(env["X_tau"]["c_all"].get<double>());
          agg += "," + std::to_string(env["X_tau"]["violations"].get<int>());
        } else {
          agg += ",,,,";
        }
        agg += result.blowup ? "," + format_csv_value(result.blowup->t) : ",";
        agg += "\n";
        if (!opt.quiet)
          std::cout << "sweep cell " << cell << "/" << total << " done\n";
      } catch (const Error& e) {
        agg += ",error,,,,,,,\n";
        if (!opt.quiet) std::cerr << "sweep cell " << cell << " failed: " << e.what() << "\n";
      }
    }

    write_text(opt.out_dir / aggregate_name, agg);
    if (!opt.quiet)
      std::cout << "sweep: aggregate -> " << (opt.out_dir / aggregate_name).string() << "\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// polar

namespace {

struct PolarConfig {
  Potential potential{RepulsiveAttractivePotential{1.0, 1.0}};
  double tau = 1.0;
  double r0 = 1.0;
  PolarState initial;
  double h = 1e-2;
  double t_end = 100.0;
  int sample_stride = 1;
  double fit_lo = 100.0;
  std::optional<double> fit_hi;
  std::string csv_name = "polar.csv";
  std::string summary_name = "polar_summary.json";
};

PolarConfig parse_polar_config(const json& root) {
  require_keys(root, "config",
               {"version", "potential", "tau", "r0", "initial", "integrator", "fit",
                "output"});
  if (!root.contains("version") || root["version"] != 1)
    throw ConfigError("config: missing or unsupported version (expected 1)");
  PolarConfig cfg;
  if (!root.contains("potential")) throw ConfigError("polar: missing potential");
  cfg.potential = parse_potential(root["potential"], "potential");
  cfg.tau = get_num(root, "config", "tau");
  if (!(cfg.tau >= 0.0)) throw ConfigError("polar: tau must be >= 0");

  if (const auto* ra = std::get_if<RepulsiveAttractivePotential>(&cfg.potential))
    cfg.r0 = ra->r0;
  else if (!root.contains("r0"))
    throw ConfigError("polar: r0 required unless the potential is repulsive_attractive");
  if (root.contains("r0")) cfg.r0 = get_num(root, "config", "r0");
  if (!(cfg.r0 > 0.0)) throw ConfigError("polar: r0 must be > 0");

  if (!root.contains("initial")) throw ConfigError("polar: missing initial");
  const json& ji = root["initial"];
  require_keys(ji, "initial", {"kr", "vr", "vtheta", "theta"});
  cfg.initial.r = cfg.r0 + get_num_or(ji, "kr", 0.0);
  cfg.initial.vr = get_num_or(ji, "vr", 0.0);
  cfg.initial.vtheta = get_num_or(ji, "vtheta", 0.0);
  cfg.initial.theta = get_num_or(ji, "theta", 0.0);
  if (!(cfg.initial.r > 0.0)) throw ConfigError("polar: initial radius must be positive");

  if (!root.contains("integrator")) throw ConfigError("polar: missing integrator");
  const json& jg = root["integrator"];
  require_keys(jg, "integrator", {"h", "t_end", "sample_stride"});
  cfg.h = get_num(jg, "integrator", "h");
  cfg.t_end = get_num(jg, "integrator", "t_end");
  cfg.sample_stride = static_cast<int>(get_num_or(jg, "sample_stride", 1));
  if (!(cfg.h > 0.0) || !(cfg.t_end >= cfg.h) || cfg.sample_stride < 1)
    throw ConfigError("polar: invalid integrator parameters");

  if (root.contains("fit")) {
    const json& jf = root["fit"];
    require_keys(jf, "fit", {"window"});
    if (jf.contains("window")) {
      const json& w = jf["window"];
      if (!w.is_array() || w.size() != 2) throw ConfigError("polar: fit.window = [lo, hi]");
      cfg.fit_lo = w[0].get<double>();
      if (!w[1].is_null()) cfg.fit_hi = w[1].get<double>();
    }
  }
  if (root.contains("output")) {
    const json& jo = root["output"];
    require_keys(jo, "output", {"csv", "summary"});
    if (jo.contains("csv")) cfg.csv_name = jo["csv"].get<std::string>();
    if (jo.contains("summary")) cfg.summary_name = jo["summary"].get<std::string>();
  }
  return cfg;
}

// kr envelope <t>^(-1) ln^(1/2)<1+t>.
double kr_envelope(double t) {
  return std::sqrt(std::log(bracket(1.0 + t))) / bracket(t);
}

}  // namespace

int run_polar(const CliOptions& opt) {
  return guarded(opt.quiet, [&]() {
    const PolarConfig cfg = parse_polar_config(parse_json(load_text(opt.config)));

    std::vector<double> y = {cfg.initial.r, cfg.initial.theta, cfg.initial.vr,
                             cfg.initial.vtheta};
    const OdeRhs rhs = [&](double, std::span<const double> s, std::span<double> dy) {
      const PolarState p{s[0], s[1], s[2], s[3]};
      const PolarState d = polar_rhs(p, cfg.potential, cfg.tau);
      dy[0] = d.r;
      dy[1] = d.theta;
      dy[2] = d.vr;
      dy[3] = d.vtheta;
    };
    OdeStepper stepper(Method::rk4, 4);
    const long n_steps = std::llround(cfg.t_end / cfg.h);

    std::vector<double> ts, krs, vrs, vthetas;
    auto sample = [&](double t) {
      ts.push_back(t);
      krs.push_back(y[0] - cfg.r0);
      vrs.push_back(y[2]);
      vthetas.push_back(y[3]);
    };
    sample(0.0);
    std::vector<double> ynext(4);
    for (long k = 1; k <= n_steps; ++k) {
      stepper.step((k - 1) * cfg.h, cfg.h, y, rhs, ynext);
      y = ynext;
      if (!(y[0] > 0.0) || !all_finite(y))
        throw NumericalError("polar: chart left r > 0 at step " + std::to_string(k));
      if (k % cfg.sample_stride == 0 || k == n_steps) sample(k * cfg.h);
    }

    std::string csv = "t,kr,vr,vtheta\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      csv += format_csv_value(ts[i]);
      csv += ',';
      csv += format_csv_value(krs[i]);
      csv += ',';
      csv += format_csv_value(vrs[i]);
      csv += ',';
      csv += format_csv_value(vthetas[i]);
      csv += '\n';
    }
    write_text(opt.out_dir / cfg.csv_name, csv);

    json sum;
    sum["version"] = 1;
    sum["command"] = "polar";
    sum["tau"] = cfg.tau;
    sum["r0"] = cfg.r0;
    const double hi = cfg.fit_hi.value_or(cfg.t_end);
    sum["fit_window"] = {cfg.fit_lo, hi};

    // power fit of |vtheta| on a log-spaced window
    try {
      const auto idx = log_spaced_indices(ts, cfg.fit_lo, hi, 400);
      std::vector<double> xs, ys;
      for (auto i : idx) {
        if (std::abs(vthetas[i]) > 0.0 && ts[i] > 0.0) {
          xs.push_back(std::log(ts[i]));
          ys.push_back(std::log(std::abs(vthetas[i])));
        }
      }
      if (xs.size() < 8) throw FitError("polar: too few vtheta samples in window");
      const LinearFit fit = linear_fit(xs, ys);
      sum["vtheta_power"] = {{"slope", fit.slope}, {"stderr", fit.slope_stderr},
                             {"n_used", fit.n}};
    } catch (const FitError& e) {
      sum["vtheta_power"] = {{"error", e.what()}};
    }

    // power fit of per-bin max |kr| (kr oscillates through zero)
    try {
      const int bins = 40;
      std::vector<double> xs, ys;
      const double la = std::log(std::max(cfg.fit_lo, cfg.h));
      const double lb = std::log(hi);
      for (int b = 0; b < bins; ++b) {
        const double lo = std::exp(la + (lb - la) * b / bins);
        const double up = std::exp(la + (lb - la) * (b + 1) / bins);
        double peak = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i)
          if (ts[i] >= lo && ts[i] < up) peak = std::max(peak, std::abs(krs[i]));
        if (peak > 0.0) {
          xs.push_back(0.5 * (std::log(lo) + std::log(up)));
          ys.push_back(std::log(peak));
        }
      }
      if (xs.size() < 8) throw FitError("polar: too few kr bins in window");
      const LinearFit fit = linear_fit(xs, ys);
      sum["kr_power"] = {{"slope", fit.slope}, {"stderr", fit.slope_stderr}, {"n_used", fit.n}};
    } catch (const FitError& e) {
      sum["kr_power"] = {{"error", e.what()}};
    }

    // envelope constant |kr| <= C <t>^(-1) ln^(1/2)<1+t>, fitted on the head
    // (log-midpoint split) and checked on the tail.
    {
      const double t_split = std::sqrt(std::max(cfg.fit_lo, 1.0) * hi);
      double c_head = 0.0, c_tail = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < cfg.fit_lo) continue;
        const double c = std::abs(krs[i]) / kr_envelope(ts[i]);
        if (ts[i] <= t_split)
          c_head = std::max(c_head, c);
        else
          c_tail = std::max(c_tail, c);
      }
      sum["kr_envelope"] = {{"c_head", c_head},
                            {"c_tail", c_tail},
                            {"t_split", t_split},
                            {"pass", c_tail <= c_head * 1.05}};
    }

    sum["rows"] = ts.size();
    write_text(opt.out_dir / cfg.summary_name, sum.dump(2) + "\n");
    if (!opt.quiet)
      std::cout << "polar: " << ts.size() << " rows -> "
                << (opt.out_dir / cfg.csv_name).string() << "\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// hydro1d

namespace {

struct HydroConfig {
  Potential potential{QuadraticPotential{1.0}};
  double tau = 0.0;
  int particles = 64;
  std::vector<double> px, pu, pm;
  HydroRunSpec run;
  std::string csv_name = "hydro.csv";
  std::string summary_name = "hydro_summary.json";
};

HydroConfig parse_hydro_config(const json& root) {
  require_keys(root, "config",
               {"version", "potential", "tau", "particles", "profile", "integrator",
                "dslope_cutoff", "output"});
  if (!root.contains("version") || root["version"] != 1)
    throw ConfigError("config: missing or unsupported version (expected 1)");
  HydroConfig cfg;
  if (!root.contains("potential")) throw ConfigError("hydro1d: missing potential");
  cfg.potential = parse_potential(root["potential"], "potential");
  cfg.tau = get_num(root, "config", "tau");
  if (!(cfg.tau >= 0.0)) throw ConfigError("hydro1d: tau must be >= 0");
  cfg.particles = static_cast<int>(get_num(root, "config", "particles"));

  if (!root.contains("profile")) throw ConfigError("hydro1d: missing profile");
  const json& jp = root["profile"];
  require_keys(jp, "profile", {"x", "u", "m"});
  cfg.px = get_vec(jp, "profile", "x");
  cfg.pu = get_vec(jp, "profile", "u");
  cfg.pm = get_vec(jp, "profile", "m");

  if (!root.contains("integrator")) throw ConfigError("hydro1d: missing integrator");
  const json& jg = root["integrator"];
  require_keys(jg, "integrator", {"h", "t_end", "sample_stride", "blowup_guard"});
  cfg.run.h = get_num(jg, "integrator", "h");
  cfg.run.t_end = get_num(jg, "integrator", "t_end");
  cfg.run.sample_stride = static_cast<int>(get_num_or(jg, "sample_stride", 1));
  cfg.run.blowup_guard = get_num_or(jg, "blowup_guard", 1e8);
  cfg.run.dslope_cutoff = get_num_or(root, "dslope_cutoff", 1e6);
  if (!(cfg.run.h > 0.0) || !(cfg.run.t_end >= cfg.run.h) || cfg.run.sample_stride < 1 ||
      !(cfg.run.dslope_cutoff > 0.0))
    throw ConfigError("hydro1d: invalid integrator parameters");

  if (root.contains("output")) {
    const json& jo = root["output"];
    require_keys(jo, "output", {"csv", "summary"});
    if (jo.contains("csv")) cfg.csv_name = jo["csv"].get<std::string>();
    if (jo.contains("summary")) cfg.summary_name = jo["summary"].get<std::string>();
  }
  return cfg;
}

}  // namespace

int run_hydro1d(const CliOptions& opt) {
  return guarded(opt.quiet, [&]() {
    HydroConfig cfg = parse_hydro_config(parse_json(load_text(opt.config)));
    Hydro1DState state;
    try {
      state = hydro_state_from_profile(cfg.px, cfg.pu, cfg.pm, cfg.particles);
    } catch (const ConfigError&) {
      throw;
    }
    const double m0 = state.total_mass();
    const double init_min_slope = state.min_dslope();

    // widest anticipated separation seen during the run, for the convexity audit
    double r_range = 0.0;
    const HydroObserver observer = [&](long, const Hydro1DState& s) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& p : s.particles) {
        const double xt = p.x + cfg.tau * p.u;
        lo = std::min(lo, xt);
        hi = std::max(hi, xt);
      }
      r_range = std::max(r_range, hi - lo);
    };

    const ThresholdResult result =
        run_threshold_experiment(cfg.potential, cfg.tau, std::move(state), cfg.run, observer);

    std::string csv = "t,min_dslope,max_abs_dslope,mass,momentum\n";
    for (const auto& s : result.history) {
      csv += format_csv_value(s.t);
      for (double v : {s.min_dslope, s.max_abs_dslope, s.mass, s.momentum}) {
        csv += ',';
        csv += format_csv_value(v);
      }
      csv += '\n';
    }
    write_text(opt.out_dir / cfg.csv_name, csv);

    // uniform convexity bound on the separations the run actually visited
    double a_min = std::numeric_limits<double>::infinity();
    const double probe = std::max(r_range, 1e-6);
    for (int k = 0; k <= 1000; ++k)
      a_min = std::min(a_min, eval_potential(cfg.potential, probe * k / 1000.0).ddu);

    json sum;
    sum["version"] = 1;
    sum["command"] = "hydro1d";
    sum["tau"] = cfg.tau;
    sum["particles"] = cfg.particles;
    sum["m0"] = m0;
    sum["initial_min_slope"] = init_min_slope;
    sum["r_range"] = r_range;
    sum["a_min"] = a_min;
    sum["uniformly_convex"] = a_min > 0.0;

    std::optional<double> threshold;
    if (a_min > 0.0 && cfg.tau > 0.0) threshold = critical_slope(cfg.tau, m0, a_min);
    sum["threshold"] = threshold ? json(*threshold) : json(nullptr);

    double min_overall = std::numeric_limits<double>::infinity();
    for (const auto& s : result.history) min_overall = std::min(min_overall, s.min_dslope);
    sum["min_dslope_overall"] = min_overall;

    if (threshold && init_min_slope >= *threshold) {
      int violations = 0;
      const double slack = 1e-9 * (1.0 + std::abs(*threshold));
      for (const auto& s : result.history)
        if (s.min_dslope < *threshold - slack) ++violations;
      sum["invariant_region"] = {{"root", *threshold},
                                 {"violations", violations},
                                 {"ok", violations == 0 && !result.blew_up}};
    } else {
      sum["invariant_region"] = nullptr;
    }

    if (result.blew_up) {
      sum["blowup"] = {{"t", *result.t_blowup},
                       {"particle", result.blowup_particle.value_or(-1)}};
    } else {
      sum["blowup"] = nullptr;
    }
    const int code = result.blew_up ? kExitBlowup : kExitOk;
    sum["exit_code"] = code;
    write_text(opt.out_dir / cfg.summary_name, sum.dump(2) + "\n");
    if (!opt.quiet)
      std::cout << "hydro1d: " << result.history.size() << " rows -> "
                << (opt.out_dir / cfg.csv_name).string()
                << (result.blew_up ? " (blow-up)" : "") << "\n";
    return code;
  });
}

// ---------------------------------------------------------------------------
// classify-potential

int run_classify(const CliOptions& opt) {
  return guarded(opt.quiet, [&]() {
    const json root = parse_json(load_text(opt.config));
    require_keys(root, "config", {"version", "potential", "classify", "output"});
    if (!root.contains("version") || root["version"] != 1)
      throw ConfigError("config: missing or unsupported version (expected 1)");
    if (!root.contains("potential")) throw ConfigError("classify: missing potential");
    const Potential pot = parse_potential(root["potential"], "potential");
    double r_max = 10.0;
    int n_samples = 2001;
    if (root.contains("classify")) {
      const json& jc = root["classify"];
      require_keys(jc, "classify", {"r_max", "n_samples"});
      r_max = get_num_or(jc, "r_max", 10.0);
      n_samples = static_cast<int>(get_num_or(jc, "n_samples", 2001));
    }
    const ClassReport rep = classify_potential(pot, r_max, n_samples);

    auto cert_json = [](const ClassCertificate& c) {
      return json{{"pass", c.pass}, {"value", c.value}, {"witness_r", c.witness_r}};
    };
    json sum;
    sum["version"] = 1;
    sum["command"] = "classify-potential";
    sum["potential"] = potential_json(pot);
    sum["r_max"] = rep.r_max;
    sum["n_samples"] = rep.n_samples;
    sum["beta"] = rep.beta_used;
    sum["bounded"] = cert_json(rep.bounded);
    sum["convex"] = cert_json(rep.convex);
    sum["attractive"] = cert_json(rep.attractive);
    sum["confining"] = cert_json(rep.confining);
    sum["confining_a"] = rep.confining_a;

    std::string summary_name = "classify.json";
    if (root.contains("output")) {
      const json& jo = root["output"];
      require_keys(jo, "output", {"summary"});
      if (jo.contains("summary")) summary_name = jo["summary"].get<std::string>();
    }
    write_text(opt.out_dir / summary_name, sum.dump(2) + "\n");
    if (!opt.quiet) {
      auto line = [](const char* name, const ClassCertificate& c, const char* what) {
        std::printf("%-11s %-4s  %s = %.12g  (witness r = %.6g)\n", name,
                    c.pass ? "pass" : "FAIL", what, c.value, c.witness_r);
      };
      line("bounded", rep.bounded, "A");
      line("convex", rep.convex, "a");
      line("attractive", rep.attractive, "a");
      line("confining", rep.confining, "L");
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// means-check

int run_means_check(const MeansCheckOptions& opt) {
  const bool quiet = opt.quiet;
  return guarded(quiet, [&]() {
    if (opt.instances < 1) throw ConfigError("means-check: instances must be >= 1");
    if (opt.n_max < 1 || opt.d_max < 1)
      throw ConfigError("means-check: n_max and d_max must be >= 1");
    if (!(opt.lam_max > 0.0) || !(opt.cap_max >= opt.lam_max))
      throw ConfigError("means-check: need 0 < lam_max <= cap_max");

    Rng rng(opt.seed);
    long violations = 0;
    double worst_ratio = 0.0;     // lhs/rhs
    double worst_margin = 0.0;    // (lhs/rhs) / C_explicit
    json worst_case = nullptr;

    for (long it = 0; it < opt.instances; ++it) {
      const int n = rng.uniform_int(2, opt.n_max);
      const int d = rng.uniform_int(1, opt.d_max);
      double lam = rng.uniform(0.0, opt.lam_max);
      if (lam <= 0.0) lam = opt.lam_max;  // (0, lam_max]
      const double cap = rng.uniform(lam, opt.cap_max);

      std::vector<double> z(static_cast<std::size_t>(n) * d);
      for (auto& v : z) v = rng.normal();
      std::vector<double> c(static_cast<std::size_t>(n) * n);
      for (auto& v : c) v = rng.uniform(lam, cap);

      const MeansCheckResult res = check_means_inequality(z, n, d, c, lam, cap);
      if (!res.pass) {
        ++violations;
        if (!quiet)
          std::cerr << "means-check violation: instance " << it << " n=" << n << " d=" << d
                    << " lhs=" << res.lhs << " rhs=" << res.rhs
                    << " C=" << res.c_explicit << "\n";
      }
      worst_ratio = std::max(worst_ratio, res.ratio);
      const double margin = res.c_explicit > 0.0 ? res.ratio / res.c_explicit : 0.0;
      if (margin > worst_margin) {
        worst_margin = margin;
        worst_case = {{"instance", it}, {"n", n},     {"d", d},
                      {"lam", lam},     {"Lam", cap}, {"ratio", res.ratio},
                      {"C", res.c_explicit}};
      }
    }

    json sum;
    sum["version"] = 1;
    sum["command"] = "means-check";
    sum["seed"] = opt.seed;
    sum["instances"] = opt.instances;
    sum["n_max"] = opt.n_max;
    sum["d_max"] = opt.d_max;
    sum["violations"] = violations;
    sum["worst_ratio"] = worst_ratio;
    sum["worst_margin"] = worst_margin;  // ratio / C_explicit, must stay <= 1
    sum["worst_case"] = worst_case;
    sum["pass"] = violations == 0;

    if (opt.summary_name) write_text(opt.out_dir / *opt.summary_name, sum.dump(2) + "\n");
    if (!quiet)
      std::cout << "means-check: " << opt.instances << " instances, " << violations
                << " violations, worst ratio/C = " << worst_margin << "\n";
    return violations == 0 ? kExitOk : kExitNumericalError;
  });
}

}  // namespace antic
