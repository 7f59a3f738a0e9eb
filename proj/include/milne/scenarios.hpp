#pragma once
// Scenario orchestration: background check, mode sweep, homogeneous run,
// characteristics, and the composite report.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "milne/config.hpp"
#include "milne/energies.hpp"
#include "milne/homogeneous.hpp"
#include "milne/modes.hpp"
#include "milne/report.hpp"
#include "milne/transport.hpp"

namespace milne {

struct ScenarioOutput {
  std::string scenario;
  std::vector<MonitorResult> monitors;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name -> table
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  bool all_hold() const;
  // all_hold and every finite margin >= floor
  bool strict_ok(double floor) const;
};

// Positions uniform in the chart ball |x| < xmax, momenta uniform in
// [-pmax, pmax]^3, unit weights.  std::mt19937_64 + uniform_real_distribution.
ParticleEnsemble make_random_ensemble(int count, double xmax, double pmax, std::uint64_t seed);

RadialDistribution make_distribution(const RadialConfig& rc);

struct CompositeRun {
  HomogeneousRun hom;
  CorrectionConstants cc;
  std::vector<double> T, E6, sasaki24, Etot, g_modes, sigma_norm, Nm3, tau2eta, rho;
  DecayFit fit_N, fit_tau2eta, fit_modes_g;
  double rho_drift = 0.0;  // relative change of rho over the final e-fold
  CompletenessReport completeness;
  MonitorResult total_decay;
};
CompositeRun run_composite(const ScenarioConfig& cfg);

ScenarioOutput run_background_check(const ScenarioConfig& cfg);
ScenarioOutput run_modes(const ScenarioConfig& cfg);
ScenarioOutput run_homogeneous(const ScenarioConfig& cfg);
ScenarioOutput run_characteristics(const ScenarioConfig& cfg);
ScenarioOutput run_full_report(const ScenarioConfig& cfg);
ScenarioOutput run_scenario(const ScenarioConfig& cfg);

nlohmann::ordered_json report_json(const ScenarioOutput& out, const ScenarioConfig& cfg);
// Writes every table and report.json into dir.
void emit_outputs(const ScenarioOutput& out, const ScenarioConfig& cfg, const std::string& dir);

}  // namespace milne
