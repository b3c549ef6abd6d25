#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipns/manifest.hpp"
#include "slipns/modes.hpp"
#include "slipns/stepper.hpp"

namespace slipns::sim {

/// mu >= mu_c(slip): no lattice wavenumber is unstable.
class StableRegimeError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

struct ExperimentSetup {
  SimConfig sim;              // channel, slip, resolution and dt; t_end is set per run
  int lattice_index = 0;      // 0 picks the wavenumber maximizing lambda_1
  int basis_size = 64;
  int max_modes = 8;
  std::optional<double> epsilon0;  // default 1e-2 * ||u^N(0)||_L2
  std::optional<double> delta0;    // default epsilon0
};

/// Packets and constants shared by every delta of a sweep.
struct PreparedExperiment {
  ExperimentSetup setup;
  double capital_lambda = 0.0;
  int lattice_index = 0;
  double wavenumber = 0.0;
  modes::ModePacket full;     // N modes, lambda increasing
  modes::ModePacket reduced;  // first N - 1 modes
  double unit_l2 = 0.0;       // ||u^N(0)||_L2 at delta = 1
  double c1 = 0.0;            // ||u^N(0)||_H2 at delta = 1
  double epsilon0 = 0.0;
  double delta0 = 0.0;
  std::vector<std::string> notes;
};

PreparedExperiment prepare_experiment(const ExperimentSetup& setup);

struct SeparationSample {
  double t = 0.0;
  double sep_l2 = 0.0;             // ||u1 - u2||
  double linear_prediction = 0.0;  // same difference for the linearized companions
  double d_from_linear_full = 0.0;
  double d_from_linear_reduced = 0.0;
};

struct MeasuredConstants {
  double c1 = 0.0;      // ||u^N(0)||_H2
  double c2 = 0.0;      // max ||u1(t)||_H2 / (delta F_N(t))
  double c3 = 0.0;      // max ||u1 - delta v^N||_L2 / (delta F_N(t))^2
  double c4 = 0.0;      // F_N(T) / (|c_N| e^{lambda_N T})
  double delta0 = 0.0;
  double m0 = 0.0;      // separation(T) / epsilon0
};

struct SeparationResult {
  double delta = 0.0;
  double t_delta = 0.0;
  double t_fix = 0.0;
  double separation = 0.0;  // ||u1 - u2||_L2 at T^delta
  double bound = 0.0;       // 0.5 delta |c_N| e^{lambda_N T^delta}
  double d_at_fix = 0.0;    // ||u1 - delta v^N||_L2 at t_fix
  MeasuredConstants constants;
  bool gate_h2 = true;      // ||u||_H2 <= 2 C1 delta0 up to T^delta
  bool gate_l2 = true;      // ||u||_L2 <= 3 C1 delta F_N(t) up to T^delta
  std::optional<double> first_violation_h2;
  std::optional<double> first_violation_l2;
  bool separation_ok = false;
  bool verdict = false;
  double max_energy_residual = 0.0;  // relative to ||u||^2
  double cfl = 0.0;
  std::vector<SeparationSample> series;
  RunDiagnostics diagnostics;  // full-packet nonlinear branch
  std::string error;           // set when the simulation failed
};

/// Runs the full and reduced packets (nonlinear) and their linearized
/// companions in lockstep on one step schedule up to T^delta, landing
/// exactly on t_fix.
SeparationResult run_separation_experiment(const PreparedExperiment& prep, double delta, double t_fix);

struct SweepResult {
  PreparedExperiment prep;
  std::vector<SeparationResult> runs;  // in the order of the requested deltas
  double t_fix = 0.0;
  double slope = 0.0;                  // d log ||u1 - delta v^N||(t_fix) / d log delta
  bool slope_ok = false;               // |slope - 2| <= 0.2
  std::vector<double> escape_ratio;    // (T(d_{i+1}) - T(d_i)) / (ln(d_i/d_{i+1}) / lambda_N), deltas sorted descending
  bool escape_ok = false;              // every ratio within 5% of 1
  bool all_ok = false;
};

/// threads > 1 runs the deltas concurrently.
SweepResult run_experiment_sweep(const ExperimentSetup& setup, const std::vector<double>& deltas, int threads = 1);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// One subdirectory per delta (manifest.json, diagnostics.csv,
/// separation.csv) plus summary.csv and experiment.json. Returns the
/// written paths relative to out_dir.
std::vector<std::string> write_experiment_outputs(const SweepResult& sweep, const std::string& out_dir,
                                                  const io::RunManifest& base);

std::string delta_label(double delta);

}  // namespace slipns::sim
