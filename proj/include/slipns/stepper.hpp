#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slipns/chebyshev.hpp"
#include "slipns/core.hpp"
#include "slipns/field.hpp"

namespace slipns::sim {

/// NaN, overflow or runaway growth during time stepping.
class BlowUpError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

struct SimConfig {
  ChannelConfig channel;
  SlipPair slip;
  int fourier_modes = 32;
  int cheb_degree = 64;
  double dt = 0.01;
  double t_end = 1.0;
  bool dealias = true;     // padded grids: 3M+1 points in x1, degree ceil(3P/2) in x2
  bool linearized = false; // drop advection
  int diagnostics_stride = 10;
};

void validate(const SimConfig& cfg);

/// Streamfunction-vorticity state. The n = 0 columns carry the mean flow:
/// psi holds U(x2) itself and omega holds -U'.
struct FlowState {
  SpectralField2D psi;
  SpectralField2D omega;
  Eigen::MatrixXcd tendency_prev;  // explicit term of the previous step
  bool has_prev = false;
  double dt_prev = 0.0;
  std::int64_t step = 0;
  double t = 0.0;
};

/// State at rest apart from the given streamfunction (and mean velocity in
/// column 0); omega = -Laplacian(psi).
FlowState make_state(const SpectralField2D& psi);

inline VelocityField velocity(const FlowState& s) { return velocity_from_streamfunction(s.psi); }

/// Energy bookkeeping of one step; CN makes the discrete identity
/// (E1 - E0)/dt = production - dissipation + work hold up to spatial error.
struct StepReport {
  double dt = 0.0;
  double energy_before = 0.0;    // 1/2 ||u||^2
  double energy_after = 0.0;
  double production_mid = 0.0;   // boundary production of the midpoint field
  double dissipation_mid = 0.0;  // mu int |grad u|^2 of the midpoint field
  double nonlinear_flux = 0.0;   // minus the work of the explicit term

  double residual() const {
    return std::abs((energy_after - energy_before) / dt - production_mid + dissipation_mid + nonlinear_flux);
  }
};

struct RunDiagnostics {
  std::vector<double> times, l2, h1, h2, boundary_production, dissipation, growth_rate;
  std::vector<double> energy_residual;  // StepReport::residual of the step ending at the row
  std::vector<double> nonlinear_flux;
  std::vector<double> boundary_defect;

  std::size_t size() const { return times.size(); }
  /// Centered differences of log l2 (one-sided at the ends).
  void fill_growth_rate();
};

/// Step sizes from t0 to t_end: steps of dt, except that the step reaching a
/// stop time (or t_end) is shortened to land on it exactly. times[i] is the
/// time after step i.
struct Schedule {
  std::vector<double> sizes;
  std::vector<double> times;
};
Schedule make_schedule(double t0, double t_end, double dt, const std::vector<double>& stops);

struct RunOptions {
  std::vector<double> stop_times;  // landed on exactly, in addition to t_end
  std::function<void(const FlowState&)> observer;  // called at the start and after every step
  std::string checkpoint_path;
  std::int64_t checkpoint_every = 0;  // steps; 0 disables
  bool check_cfl = true;
};

struct RunResult {
  RunDiagnostics diagnostics;
  FlowState final_state;
  double cfl = 0.0;
};

class Stepper {
public:
  explicit Stepper(SimConfig cfg);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  const SimConfig& config() const { return cfg_; }

  /// Advances by dt: Crank-Nicolson diffusion, AB2 advection (explicit Euler
  /// on the first step), slip conditions through the influence matrix.
  void step(FlowState& s, double dt, StepReport* report = nullptr);

  /// Explicit tendency: -(u . grad omega) for n != 0, -d2 <u1 u2> for n = 0.
  Eigen::MatrixXcd tendency(const FlowState& s) const;

  /// Advective CFL number of the state for step dt on the physical grid.
  double cfl(const FlowState& s, double dt) const;

  /// max over walls of |u2| and |mu d2 u1 -+ xi_+- u1|.
  double boundary_defect(const FlowState& s) const;

  /// Runs to cfg.t_end. Diagnostics are recorded at step 0, every
  /// diagnostics_stride steps and at t_end.
  RunResult run(FlowState s, const RunOptions& opts = {});

  /// Appends one diagnostics row for the state (rep: the step that produced it).
  void record(RunDiagnostics& d, const FlowState& s, const StepReport* rep) const;

private:
  struct ModeOps;
  struct Ops;
  const Ops& ops_for(double dt);

  SimConfig cfg_;
  numerics::ChebyshevGrid grid_;
  struct Transforms;
  std::unique_ptr<Transforms> tf_;
  std::map<double, std::unique_ptr<Ops>> cache_;
};

}  // namespace slipns::sim
