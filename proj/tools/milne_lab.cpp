// milne_lab: run a scenario, write CSV tables and report.json.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "milne/parallel.hpp"
#include "milne/scenarios.hpp"

namespace {

struct Args {
  std::string config, out = "out";
  std::uint64_t seed = 0;
  bool has_seed = false, strict = false;
};

int run(const std::string& scenario, const Args& a) {
  using namespace milne;
  ScenarioConfig cfg;
  try {
    if (!a.config.empty()) {
      std::ifstream in(a.config);
      if (!in) throw ConfigError("cannot open config " + a.config);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = validate_config(ss.str());
    } else if (!a.has_seed) {
      throw ConfigError("--seed is required without --config");
    }
    if (a.has_seed) cfg.seed = a.seed;
    cfg.scenario = scenario;
    validate_config(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  const int threads = apply_thread_cap();
  try {
    const ScenarioOutput out = run_scenario(cfg);
    emit_outputs(out, cfg, a.out);
    for (const auto& m : out.monitors)
      std::printf("%-28s %s  margin=%s\n", m.name.c_str(), m.holds ? "holds" : "FAILS", format_double(m.margin).c_str());
    std::printf("threads=%d  outputs in %s\n", threads, a.out.c_str());
    const bool ok = a.strict ? out.strict_ok(cfg.monitors.margin_floor) : out.all_hold();
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Milne lab: rescaled Einstein-Vlasov diagnostics"};
  app.require_subcommand(1);
  Args a;
  const std::pair<const char*, const char*> subs[] = {{"background-check", "background_check"},
                                                      {"modes", "modes"},
                                                      {"homogeneous", "homogeneous"},
                                                      {"characteristics", "characteristics"},
                                                      {"report", "full_report"}};
  std::string chosen;
  for (const auto& [name, scenario] : subs) {
    auto* sc = app.add_subcommand(name, std::string("run the ") + scenario + " scenario");
    sc->add_option("--config", a.config, "JSON config")->check(CLI::ExistingFile);
    sc->add_option("--out", a.out, "output directory");
    sc->add_option("--seed", a.seed, "RNG seed (overrides the config)");
    sc->add_flag("--strict", a.strict, "also require every margin >= monitors.margin_floor");
    sc->callback([&chosen, scenario] { chosen = scenario; });
  }
  CLI11_PARSE(app, argc, argv);
  for (auto* sc : app.get_subcommands())
    if (sc->count("--seed")) a.has_seed = true;
  return run(chosen, a);
}
