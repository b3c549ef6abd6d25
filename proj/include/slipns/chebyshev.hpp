#pragma once

#include <span>

#include <Eigen/Dense>

namespace slipns::numerics {

/// Chebyshev-Gauss-Lobatto collocation on [-1, 1] for polynomials of
/// degree <= P. Node i sits at cos(pi i / P): node 0 is the upper wall
/// x2 = +1, node P the lower wall x2 = -1.
class ChebyshevGrid {
public:
  explicit ChebyshevGrid(int degree);

  int degree() const { return degree_; }
  int points() const { return degree_ + 1; }
  const Eigen::VectorXd& nodes() const { return nodes_; }

  /// nodal = synthesis * coeffs, coeffs = analysis * nodal (exact inverses).
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  const Eigen::MatrixXd& analysis() const { return analysis_; }

  /// Nodal differentiation matrices.
  const Eigen::MatrixXd& d1() const { return d1_; }
  const Eigen::MatrixXd& d2() const { return d2_; }

  /// Coefficient-space differentiation matrix ((P+1) x (P+1)).
  const Eigen::MatrixXd& coeff_d1() const { return coeff_d1_; }

private:
  int degree_;
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd synthesis_, analysis_, d1_, d2_, coeff_d1_;
};

/// evaluation(q, j) = T_j(x_q) for j = 0..degree.
Eigen::MatrixXd chebyshev_evaluation(int degree, std::span<const double> x);

/// Coefficients of the derivative of a Chebyshev series (same length, last entry 0).
template <typename Vec>
Vec chebyshev_derivative(const Vec& c) {
  const Eigen::Index n = c.size();
  Vec d = Vec::Zero(n);
  if (n < 2) return d;
  d[n - 2] = 2.0 * static_cast<double>(n - 1) * c[n - 1];
  for (Eigen::Index k = n - 2; k >= 1; --k) d[k - 1] = d[k + 1] + 2.0 * static_cast<double>(k) * c[k];
  d[0] *= 0.5;
  return d;
}

/// Chebyshev-Gauss-Lobatto nodes cos(pi i / P), i = 0..P.
Eigen::VectorXd lobatto_nodes(int degree);

}  // namespace slipns::numerics
