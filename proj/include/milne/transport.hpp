#pragma once
// Characteristics of the rescaled Vlasov equation, ensemble integration
// (serial reference and OpenMP kernels) and the momentum-support tracker.

#include <cstddef>
#include <vector>

#include "milne/fields.hpp"
#include "milne/massshell.hpp"
#include "milne/parallel.hpp"

namespace milne {

enum class TransportMode { derived, paper_form };

struct CharacteristicState {
  Vec3 x = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

struct Particle {
  CharacteristicState state;
  double weight = 1.0;
  double p0 = 0.0;  // tracked along the flow (kinetic normalization)
  bool flagged = false;
};

struct ParticleEnsemble {
  std::vector<Particle> particles;
  double total_weight() const;
  // Sets the tracked p0 of every particle from the mass shell.
  void project_to_massshell(const FieldProvider& fields, const TimeFrame& frame);
};

struct CharacteristicRhs {
  Vec3 dx = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  double dp0 = 0.0;  // derived p0 equation (both modes)
};

// p0 taken from the mass shell.
CharacteristicRhs characteristic_rhs(const CharacteristicState& state, const FieldSample& fields,
                                     const TimeFrame& frame, TransportMode mode);
// Geodesic system in (x, p, p0) with p0 tracked; derived mode uses the tracked
// p0 everywhere, paper_form uses the mass-shell p0 in the printed formulas.
CharacteristicRhs characteristic_rhs_tracked(const CharacteristicState& state, double p0, const FieldSample& fields,
                                             const TimeFrame& frame, TransportMode mode);

// G(x,p) = |p|_g^2
double support_G(const FieldSample& fields, const Vec3& p);

struct TransportOptions {
  TransportMode mode = TransportMode::derived;
  double h = 1e-3;
  int output_every = 100;  // steps between logged samples
  Exec exec = Exec::parallel;
  bool record_rows = true;
};

struct TrajectoryRow {
  double T = 0;
  std::size_t id = 0;
  Vec3 x = Vec3::Zero(), p = Vec3::Zero();
  double p0 = 0, residual = 0, G = 0;
};

// Pointwise proxies (sup over the ensemble) for the norms entering the
// support-bound envelope.
struct NormSample {
  double T = 0;
  double X = 0, Sigma = 0, Nm3 = 0, dTX = 0, gstar = 0, gstarstar = 0;
};

struct TransportRun {
  double tau0 = -1.0;
  std::vector<double> T;
  std::vector<double> calG;          // sup sqrt(G) over unflagged particles
  std::vector<double> max_residual;  // max mass-shell residual
  std::vector<NormSample> norms;
  std::vector<TrajectoryRow> rows;   // ordered by (T, id)
  ParticleEnsemble final;
  std::vector<std::size_t> flagged;
};

TransportRun integrate_characteristics(const ParticleEnsemble& ensemble, const FieldProvider& fields, double tau0,
                                       double T0, double Tend, const TransportOptions& opt);

struct SupportBoundReport {
  std::vector<double> T, measured, bound;
  double margin = 0;  // min (bound - measured) / bound
  bool holds = true;
};
SupportBoundReport support_bound_check(const TransportRun& run, double C);

}  // namespace milne
