#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "slipns/legendre.hpp"

namespace slipns::numerics {

/// Trial basis of polynomials vanishing at both walls:
///
///   phi_j(x) = (1 - x^2) P_j^{(1,1)}(x) / (j + 1) = 2 (L_j - L_{j+2}) / (2j + 3),
///
/// so phi_0 = 1 - x^2 and phi_j' = -2 L_{j+1}; the H^1 seminorm Gram matrix
/// is diagonal. The span of the first N members is nested in N.
///
/// Tables hold derivatives 0..4 at the Gauss-Legendre nodes and at x = -1, +1.
/// The quadrature uses N + 4 points, the smallest count that is exact for
/// every product of two basis derivatives (degree <= 2N + 6).
class DirichletBasis {
public:
  static constexpr int kMaxDerivative = 4;

  int size() const { return size_; }
  const QuadratureRule& quadrature() const { return rule_; }

  /// values(d)(q, j) = phi_j^{(d)}(x_q)
  const Eigen::MatrixXd& values(int derivative) const { return at_nodes_[derivative]; }
  /// endpoint(d)(0, j) = phi_j^{(d)}(-1), endpoint(d)(1, j) = phi_j^{(d)}(+1)
  const Eigen::MatrixXd& endpoint(int derivative) const { return at_ends_[derivative]; }

  /// Legendre coefficients (length N + 2) of sum_j coeffs[j] phi_j.
  Eigen::VectorXd to_legendre(const Eigen::VectorXd& coeffs) const;
  LegendreSeries series(const Eigen::VectorXd& coeffs) const { return LegendreSeries(to_legendre(coeffs)); }

  /// Weighted integral of products of derivative tables: int phi_i^{(a)} phi_j^{(b)}.
  Eigen::MatrixXd gram(int a, int b) const;

private:
  friend DirichletBasis build_basis(int size);

  int size_ = 0;
  QuadratureRule rule_;
  std::array<Eigen::MatrixXd, kMaxDerivative + 1> at_nodes_;
  std::array<Eigen::MatrixXd, kMaxDerivative + 1> at_ends_;
};

/// Builds the N-member basis; rejects N < 4 and verifies quadrature exactness
/// on monomials up to degree 2N + 6 (relative error <= 1e-13).
DirichletBasis build_basis(int size);

/// A coefficient vector tied to the basis it expands in.
struct CoeffVector {
  Eigen::VectorXd coeffs;
  const DirichletBasis* basis = nullptr;
};

}  // namespace slipns::numerics
