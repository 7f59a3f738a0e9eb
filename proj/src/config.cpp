#include "milne/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "milne/energies.hpp"
#include "milne/geometry.hpp"

namespace milne {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads known keys of one object; any other key is an error.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }
  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what + " violated");
}

}  // namespace

void validate_config(const ScenarioConfig& c) {
  require(c.schema_version == kConfigSchemaVersion, "schema_version == " + std::to_string(kConfigSchemaVersion));
  static const std::set<std::string> scenarios{"background_check", "modes", "homogeneous", "characteristics",
                                               "full_report"};
  require(scenarios.count(c.scenario) == 1, "scenario in {background_check, modes, homogeneous, characteristics, full_report}");
  require(c.tau0 < 0.0, "tau0 < 0");
  require(c.T0 >= 0.0, "T0 >= 0");
  require(c.Tend > c.T0, "Tend > T0");
  require(c.h > 0.0, "h > 0");
  require(!c.lambdaGrid.empty(), "lambdaGrid non-empty");
  for (double l : c.lambdaGrid) require(l >= 1.0 / 9.0 - kLambdaBorderTol, "lambda >= 1/9");
  require(c.epsTot > 0.0, "epsTot > 0");
  require(c.epsDecay > 0.0 && c.epsDecay < 1.0, "0 < epsDecay < 1");
  validate_energy_weights(c.deltaE, c.deltaEcal);

  double lambda0 = c.lambdaGrid.front();
  for (double l : c.lambdaGrid) lambda0 = std::min(lambda0, l);
  CorrectionConstants cc;
  try {
    cc = correction_constants(lambda0, c.epsPrime);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require(cc.alpha > c.alphaFloor, "alpha > alphaFloor");
  require(1.0 - 2.0 * cc.deltaAlpha - c.deltaE - c.epsTot > 1.0 - c.epsDecay,
          "1 - 2 deltaAlpha - deltaE - epsTot > 1 - epsDecay");
  require(c.deltaEcal - c.epsTot > 1.0 - c.epsDecay, "deltaEcal - epsTot > 1 - epsDecay");

  require(c.homogeneous_output_every >= 1, "homogeneous_output_every >= 1");
  require(c.radial.profile == "bump" || c.radial.profile == "top_hat", "radial.profile in {bump, top_hat}");
  require(c.radial.f0 >= 0.0, "radial.f0 >= 0");
  require(c.radial.Q > 0.0, "radial.Q > 0");
  require(c.radial.cells >= 8, "radial.cells >= 8");
  require(c.radial.extent >= 1.0, "radial.extent >= 1");
  require(c.particles.count >= 0, "particles.count >= 0");
  require(c.particles.fields == "background" || c.particles.fields == "lapse_perturbation",
          "particles.fields in {background, lapse_perturbation}");
  require(c.particles.mode == "derived" || c.particles.mode == "paper_form", "particles.mode in {derived, paper_form}");
  require(c.particles.xmax > 0.0 && c.particles.xmax < 6.0, "0 < particles.xmax < 6");
  require(c.particles.pmax >= 0.0, "particles.pmax >= 0");
  require(c.particles.output_every >= 1, "particles.output_every >= 1");
  require(c.particles.log_particles >= 0, "particles.log_particles >= 0");
  require(c.modes.order >= 1 && c.modes.order <= 6, "1 <= modes.order <= 6");
  require(c.modes.h > 0.0, "modes.h > 0");
  require(c.monitors.C_support > 0.0, "monitors.C_support > 0");
  require(c.monitors.eps_loc > 0.0, "monitors.eps_loc > 0");
  require(c.monitors.delta_small > 0.0, "monitors.delta_small > 0");
  require(c.monitors.massshell_tol > 0.0, "monitors.massshell_tol > 0");
}

ScenarioConfig validate_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  ScenarioConfig c;
  Reader r(j, "config");
  if (!j.contains("schema_version")) throw ConfigError("config: schema_version is required");
  if (!j.contains("seed")) throw ConfigError("config: seed is required");
  r.get("schema_version", c.schema_version);
  r.get("scenario", c.scenario);
  r.get("seed", c.seed);
  r.get("tau0", c.tau0);
  r.get("T0", c.T0);
  r.get("Tend", c.Tend);
  r.get("h", c.h);
  r.get("lambdaGrid", c.lambdaGrid);
  r.get("epsPrime", c.epsPrime);
  r.get("deltaE", c.deltaE);
  r.get("deltaEcal", c.deltaEcal);
  r.get("epsDecay", c.epsDecay);
  r.get("epsTot", c.epsTot);
  r.get("alphaFloor", c.alphaFloor);
  r.get("homogeneous_output_every", c.homogeneous_output_every);
  if (const json* s = r.sub("radial")) {
    Reader q(*s, "radial");
    q.get("profile", c.radial.profile);
    q.get("f0", c.radial.f0);
    q.get("Q", c.radial.Q);
    q.get("cells", c.radial.cells);
    q.get("extent", c.radial.extent);
    q.finish();
  }
  if (const json* s = r.sub("particles")) {
    Reader q(*s, "particles");
    q.get("count", c.particles.count);
    q.get("fields", c.particles.fields);
    q.get("eps", c.particles.eps);
    q.get("mode", c.particles.mode);
    q.get("xmax", c.particles.xmax);
    q.get("pmax", c.particles.pmax);
    q.get("output_every", c.particles.output_every);
    q.get("log_particles", c.particles.log_particles);
    q.finish();
  }
  if (const json* s = r.sub("modes")) {
    Reader q(*s, "modes");
    q.get("u0", c.modes.u0);
    q.get("w0", c.modes.w0);
    q.get("order", c.modes.order);
    q.get("forcing_amp", c.modes.forcing_amp);
    q.get("forcing_rate", c.modes.forcing_rate);
    q.get("h", c.modes.h);
    q.finish();
  }
  if (const json* s = r.sub("monitors")) {
    Reader q(*s, "monitors");
    q.get("C_support", c.monitors.C_support);
    q.get("eps_loc", c.monitors.eps_loc);
    q.get("delta_small", c.monitors.delta_small);
    q.get("margin_floor", c.monitors.margin_floor);
    q.get("massshell_tol", c.monitors.massshell_tol);
    q.get("background_tol", c.monitors.background_tol);
    q.get("NM", c.monitors.NM);
    q.get("gbound", c.monitors.gbound);
    q.get("Xbound", c.monitors.Xbound);
    q.finish();
  }
  r.finish();
  validate_config(c);
  return c;
}

std::string config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["tau0"] = c.tau0;
  j["T0"] = c.T0;
  j["Tend"] = c.Tend;
  j["h"] = c.h;
  j["lambdaGrid"] = c.lambdaGrid;
  j["epsPrime"] = c.epsPrime;
  j["deltaE"] = c.deltaE;
  j["deltaEcal"] = c.deltaEcal;
  j["epsDecay"] = c.epsDecay;
  j["epsTot"] = c.epsTot;
  j["alphaFloor"] = c.alphaFloor;
  j["homogeneous_output_every"] = c.homogeneous_output_every;
  j["radial"] = {{"profile", c.radial.profile}, {"f0", c.radial.f0}, {"Q", c.radial.Q},
                 {"cells", c.radial.cells}, {"extent", c.radial.extent}};
  j["particles"] = {{"count", c.particles.count},          {"fields", c.particles.fields},
                    {"eps", c.particles.eps},              {"mode", c.particles.mode},
                    {"xmax", c.particles.xmax},            {"pmax", c.particles.pmax},
                    {"output_every", c.particles.output_every}, {"log_particles", c.particles.log_particles}};
  j["modes"] = {{"u0", c.modes.u0},
                {"w0", c.modes.w0},
                {"order", c.modes.order},
                {"forcing_amp", c.modes.forcing_amp},
                {"forcing_rate", c.modes.forcing_rate},
                {"h", c.modes.h}};
  j["monitors"] = {{"C_support", c.monitors.C_support},       {"eps_loc", c.monitors.eps_loc},
                   {"delta_small", c.monitors.delta_small},   {"margin_floor", c.monitors.margin_floor},
                   {"massshell_tol", c.monitors.massshell_tol}, {"background_tol", c.monitors.background_tol},
                   {"NM", c.monitors.NM},                     {"gbound", c.monitors.gbound},
                   {"Xbound", c.monitors.Xbound}};
  return j.dump(2);
}

}  // namespace milne
