#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "slipns/basis.hpp"
#include "slipns/core.hpp"

namespace slipns::eigen {

/// Discrete normal-mode problem B v = lambda A v over the wall basis:
///
///   B_ij = xi_- phi_i'(-1) phi_j'(-1) + xi_+ phi_i'(1) phi_j'(1) - mu E_ij
///   E_ij = int phi_i'' phi_j'' + 2k^2 phi_i' phi_j' + k^4 phi_i phi_j
///   A_ij = int phi_i' phi_j' + k^2 phi_i phi_j
///
/// The slip conditions mu phi''(+-1) = +-xi_+- phi'(+-1) are natural for this
/// form and are not built into the basis. B is indefinite in general.
struct AssembledPencil {
  Eigen::MatrixXd b;
  Eigen::MatrixXd a;
  Eigen::MatrixXd energy;
  Eigen::MatrixXd production;
  ModeProblem problem;
  const numerics::DirichletBasis* basis = nullptr;
};

AssembledPencil assemble(const ModeProblem& problem, const numerics::DirichletBasis& basis);

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd phi;  // coefficients in the wall basis, int (phi')^2 + k^2 phi^2 = 1
};

struct Spectrum {
  ModeProblem problem;
  std::vector<EigenPair> pairs;  // lambda descending
  int positive_count = 0;
  const numerics::DirichletBasis* basis = nullptr;

  double lambda1() const { return pairs.front().lambda; }
  std::vector<double> positive_lambdas() const;
};

Spectrum solve_spectrum(const AssembledPencil& pencil);
Spectrum solve_spectrum(const ModeProblem& problem, const numerics::DirichletBasis& basis);

/// Growth-rate quotient (production - mu * energy) / (int (phi')^2 + k^2 phi^2).
double rayleigh_quotient(const AssembledPencil& pencil, const Eigen::VectorXd& coeffs);

/// Maximum of the growth-rate quotient found by shifted inverse iteration
/// from several seeded random starts. Does not use the dense eigensolver.
double lambda1_variational(const ModeProblem& problem, const numerics::DirichletBasis& basis,
                           std::uint64_t seed = 0, int starts = 4);

/// Number of modes (in descending order) treated as resolved: min(N/2, 16).
int resolved_count(int basis_size);

struct ModeResiduals {
  double strong_l2 = 0.0;     // || lambda (k^2 phi - phi'') + mu (phi'''' - 2k^2 phi'' + k^4 phi) ||_L2
  double bc_upper = 0.0;      // | mu phi''(1) - xi_+ phi'(1) |
  double bc_lower = 0.0;      // | mu phi''(-1) + xi_- phi'(-1) |
  double wall_value = 0.0;    // max |phi(+-1)|
  double normalization = 0.0; // | int (phi')^2 + k^2 phi^2 - 1 |
};

ModeResiduals mode_residuals(const Spectrum& spectrum, int index);

/// max_{i != j} |phi_i^T A phi_j| over the first `count` modes.
double orthogonality_defect(const Spectrum& spectrum, const AssembledPencil& pencil, int count);

/// Scaled 4x4 determinant of the wall conditions applied to the exact
/// solutions cosh(kx), sinh(kx), cosh(mx), sinh(mx), m = sqrt(k^2 + lambda/mu).
/// Columns are divided by cosh(k) or cosh(m). Requires lambda > 0.
double characteristic_determinant(double lambda, const ModeProblem& problem);

struct DeterminantTrace {
  ModeProblem problem;
  std::vector<double> lambda_grid;
  std::vector<double> det_values;
  std::vector<double> roots;  // descending, like Spectrum
};

/// A priori bound (xi_- + xi_+) / 2 + (xi_- + xi_+)^2 / mu on every eigenvalue.
double lambda_upper_bound(const ModeProblem& problem);

/// Default scan ceiling: 1e4 * mu * k^2, raised to clear lambda_upper_bound.
double default_lambda_max(const ModeProblem& problem);

/// Scans lambda on a geometric grid from 1e-6 mu k^2 up to lambda_max,
/// brackets sign changes and refines each root to 1e-13 relative width.
DeterminantTrace determinant_roots(const ModeProblem& problem, double lambda_max, int grid_points = 4096);

}  // namespace slipns::eigen
