#pragma once
// Scenario configuration: JSON in, validated struct out.

#include <cstdint>
#include <string>
#include <vector>

#include "milne/core.hpp"

namespace milne {

constexpr int kConfigSchemaVersion = 1;

struct RadialConfig {
  std::string profile = "bump";  // bump | top_hat
  double f0 = 1e-3;
  double Q = 1.0;
  int cells = 64;
  double extent = 1.25;
};

struct ParticleConfig {
  int count = 1000;
  std::string fields = "lapse_perturbation";  // background | lapse_perturbation
  double eps = 1e-3;
  std::string mode = "derived";  // derived | paper_form
  double xmax = 1.0;             // positions uniform in the chart ball of this radius
  double pmax = 1.0;             // momenta uniform in [-pmax, pmax]^3
  int output_every = 100;
  int log_particles = 1000;      // trajectory rows for ids below this
};

struct ModeConfig {
  double u0 = 1.0, w0 = 0.0;
  int order = 6;
  double forcing_amp = 0.0;
  double forcing_rate = 1.0;
  double h = 1e-2;
};

struct MonitorConfig {
  double C_support = 10.0;
  double eps_loc = 0.5;
  double delta_small = 0.1;
  double margin_floor = 0.0;  // --strict: every margin must reach this
  double massshell_tol = 1e-8;
  double background_tol = 1e-12;
  double NM = 3.0;
  double gbound = 0.5;
  double Xbound = 10.0;
};

struct ScenarioConfig {
  int schema_version = kConfigSchemaVersion;
  std::string scenario = "full_report";  // background_check | modes | homogeneous | characteristics | full_report
  std::uint64_t seed = 0;
  double tau0 = -1.0;
  double T0 = 0.0;
  double Tend = 10.0;
  double h = 1e-3;
  std::vector<double> lambdaGrid{1.0 / 9.0, 0.2, 5.0 / 9.0, 1.0, 2.0};
  double epsPrime = 1e-4;
  double deltaE = 0.05;
  double deltaEcal = 0.9;
  double epsDecay = 0.2;
  double epsTot = 0.05;
  double alphaFloor = 0.5;
  int homogeneous_output_every = 10;
  RadialConfig radial;
  ParticleConfig particles;
  ModeConfig modes;
  MonitorConfig monitors;
};

// Parses and validates; throws ConfigError naming the failing condition.
ScenarioConfig validate_config(const std::string& json_text);
// Checks all side conditions on an already-filled struct.
void validate_config(const ScenarioConfig& cfg);
// Canonical JSON echo (all fields, defaults filled).
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace milne
