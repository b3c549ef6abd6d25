#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "slipns/core.hpp"
#include "slipns/eigensolver.hpp"
#include "slipns/legendre.hpp"

namespace slipns::modes {

/// Real normal mode e^{lambda t} (sin(k x1) psi, cos(k x1) phi, cos(k x1) pi)
/// of the linearized problem, with psi = -phi'/k and
/// pi = (lambda psi + mu (k^2 psi - psi'')) / k, the pressure of the linearized momentum equations.
struct NormalMode {
  ModeProblem problem;
  double lambda = 0.0;
  numerics::LegendreSeries phi;
  numerics::LegendreSeries psi;
  numerics::LegendreSeries pi;
};

NormalMode build_mode(const ModeProblem& problem, double lambda, const numerics::LegendreSeries& phi);
NormalMode build_mode(const eigen::Spectrum& spectrum, int index);

struct GridSpec {
  int nx1 = 32;                 // uniform points on [0, 2 pi L)
  int nx2 = 33;
  double period_length = 1.0;
  bool chebyshev_x2 = false;    // Lobatto points instead of a uniform grid on [-1, 1]
};

/// Samples indexed (i2, i1).
struct FieldSamples {
  std::vector<double> x1;
  std::vector<double> x2;
  Eigen::MatrixXd u1, u2, q;
};

std::vector<double> grid_x1(const GridSpec& grid);
std::vector<double> grid_x2(const GridSpec& grid);

FieldSamples sample_field(const NormalMode& mode, double t, const GridSpec& grid);

/// Modes sharing one wavenumber, sorted by strictly increasing lambda, so
/// the last mode is the most unstable one.
struct ModePacket {
  std::vector<NormalMode> modes;
  std::vector<double> coefficients;

  int count() const { return static_cast<int>(modes.size()); }
  std::vector<double> lambdas() const;
};

/// Packet of the positive modes of the spectrum (capped at max_modes, the
/// largest ones kept), c_j = 1. Throws on repeated eigenvalues.
ModePacket make_packet(const eigen::Spectrum& spectrum, int max_modes = 8);
ModePacket make_packet(std::vector<NormalMode> modes, std::vector<double> coefficients);

/// The packet without its last (most unstable) mode.
ModePacket reduced_packet(const ModePacket& packet);

/// F_N(t) = sum |c_j| e^{lambda_j t}.
double growth_envelope(const ModePacket& packet, double t);

struct GrowthEnvelope {
  ModePacket packet;
  double delta = 0.0;
  double epsilon0 = 0.0;

  double operator()(double t) const { return growth_envelope(packet, t); }
};

/// Unique T with delta F_N(T) = epsilon0.
double escape_time(const GrowthEnvelope& env);

struct CapitalLambda {
  double value = 0.0;                 // max_n lambda_1(n / L)
  double argmax_k = 0.0;
  int argmax_index = 0;
  std::vector<double> lambda1;        // lambda_1(n / L), n = 1..max_index
  std::vector<std::string> warnings;  // non-monotone steps of the sweep
};

/// Throws NumericalError when lambda_1 is still positive at the end of the sweep.
CapitalLambda compute_capital_lambda(const LatticeSweep& sweep, double mu, int basis_size = 64);

nlohmann::json packet_manifest(const ModePacket& packet, double epsilon0, double delta, double t_delta);

}  // namespace slipns::modes
