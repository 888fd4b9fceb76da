#pragma once

// Scenario runs: named initial states, per-n_x trajectories with measures,
// derived times (sudden transition, effectiveness), temperature sweeps,
// config ingestion and CSV/JSON persistence.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdshield/bath_kernel.hpp"
#include "qdshield/correlation_measures.hpp"
#include "qdshield/redfield_engine.hpp"

namespace qds {

inline constexpr const char* kEngineVersion = "1.0.0";
inline constexpr const char* kThreadsEnvVar = "QDSHIELD_THREADS";

// bell_phi_plus, mixed_rho1, mixed_rho2
DensityMatrix build_initial_state(const std::string& name);
const std::vector<std::string>& initial_state_names();

struct MeasureSelection {
  bool discord = true;
  bool concurrence = true;
  bool superfidelity = true;

  static MeasureSelection none() { return {false, false, false}; }
};

struct InitialStateSpec {
  std::string name;                    // empty when an explicit matrix is given
  std::optional<ComplexMatrix> matrix;

  DensityMatrix resolve() const;
  std::string label() const { return matrix ? std::string("inline") : name; }
};

struct Scenario {
  std::string name;
  InitialStateSpec initial_state;
  std::vector<int> n_x_list;
  double t_on = 0.0;
  BathParams bath{kDefaultEta, kDefaultOmegaC};
  double t_final = 3.0;
  MeasureSelection outputs;

  void validate() const;
};

struct RunSettings {
  double dt = 1e-3;
  double quad_tol = kDefaultQuadTolerance;
  int sample_stride = 10;
  double t_c = 1.0;
  OptimizerSettings optimizer;
  // 0 selects the environment variable, then the hardware concurrency.
  int threads = 0;
};

struct MeasureRow {
  std::optional<double> discord;
  std::optional<double> concurrence;
  std::optional<double> superfidelity;
};

struct SeriesResult {
  int n_x;
  Trajectory trajectory;
  std::vector<MeasureRow> measures;
};

// A derived time together with the sample interval that brackets it.
struct TimeEstimate {
  double value;
  double lower;
  double upper;
};

struct DerivedTimes {
  std::optional<TimeEstimate> t_star;
  std::vector<std::pair<int, std::optional<TimeEstimate>>> t_e;
};

struct Provenance {
  std::string config_hash;
  std::string engine_version = kEngineVersion;
  double dt;
  double quad_tol;
};

struct RunRecord {
  Scenario scenario;
  RunSettings settings;
  std::vector<SeriesResult> series;
  DerivedTimes derived;
  Provenance provenance;

  // Throws InvalidArgument when the n_x series is absent.
  const SeriesResult& series_for(int n_x) const;
};

RunRecord run_scenario(const Scenario& s, const RunSettings& settings = {});

// Empty when the unprotected discord shows no initial plateau.
std::optional<TimeEstimate> sudden_transition_time(const RunRecord& record);
// Empty when the protected discord never overtakes the unprotected one.
std::optional<TimeEstimate> effectiveness_time(const RunRecord& record, int n_x);

struct SweepRow {
  double temperature;
  std::optional<TimeEstimate> t_star;
  std::optional<TimeEstimate> t_e;
};

std::vector<SweepRow> temperature_sweep(const Scenario& base,
                                        const std::vector<double>& temperatures,
                                        const RunSettings& settings = {}, int n_x = 4);

// Config file ingestion (JSON). Unknown keys raise InvalidArgument.
struct ScenarioConfig {
  Scenario scenario;
  RunSettings settings;
};
ScenarioConfig parse_scenario_config(const std::string& json_text);
std::string config_hash(const Scenario& s, const RunSettings& settings);

// t,nx,discord,concurrence,superfidelity,trace_error,min_eigenvalue
void write_csv(const RunRecord& record, std::ostream& out);
void write_sidecar_json(const RunRecord& record, std::ostream& out);

void write_sweep_csv(const std::vector<SweepRow>& rows, int n_x, std::ostream& out);
void write_sweep_json(const std::vector<SweepRow>& rows, int n_x, const Scenario& base,
                      const RunSettings& settings, std::ostream& out);

// Built-in figure datasets.
const std::vector<std::string>& figure_ids();
Scenario figure_scenario(const std::string& id);
inline const std::vector<double> kFigureTemperatures = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};

// Writes <id>.csv and <id>.json (fig5 also writes fig5_late.csv/.json) into
// out_dir, removing partial files on failure. Returns the paths written.
std::vector<std::string> write_figure(const std::string& id, const std::string& out_dir,
                                      const RunSettings& settings = {});

struct DerivedTimesReport {
  std::optional<TimeEstimate> t_star;
  std::optional<TimeEstimate> t_e;
};
DerivedTimesReport derived_times(const std::string& state, int n_x, double temperature,
                                 const RunSettings& settings = {});

struct SelfCheckResult {
  std::string name;
  bool passed;
  std::string detail;
};
std::vector<SelfCheckResult> run_self_checks();

int resolve_thread_count(int requested);

}  // namespace qds
