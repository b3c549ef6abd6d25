#pragma once

#include <Eigen/Dense>

namespace slipns::numerics {

// Tolerances shared by every dense solve in the toolkit.
inline constexpr double kSymmetryTolerance = 1e-12;  // relative, max-norm
inline constexpr double kResidualTolerance = 1e-10;  // relative to ||B||

struct GeneralizedEigResult {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]; A-orthonormal
};

double symmetry_defect(const Eigen::MatrixXd& m);

/// All pairs of B v = lambda A v for symmetric B and symmetric positive
/// definite A. Eigenvalues are sorted descending; each eigenvector is
/// A-normalized with its first significant coefficient positive.
/// Throws NumericalError for non-symmetric input or when A is not positive
/// definite.
GeneralizedEigResult solve_generalized_symmetric(const Eigen::MatrixXd& b, const Eigen::MatrixXd& a);

/// Flips the sign of v so that its first coefficient with magnitude above
/// 1e-8 * max|v| is positive.
void canonical_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace slipns::numerics
