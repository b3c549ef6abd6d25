#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace slipns::numerics {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  double integrate(const Eigen::VectorXd& values) const { return weights.dot(values); }
};

/// Gauss-Legendre rule on [-1, 1] with `points` nodes (exact to degree 2*points-1).
QuadratureRule gauss_legendre(int points);

/// Values of d-th derivatives of L_0..L_{max_degree} at the given points.
/// Result[d](i, n) = L_n^{(d)}(x_i) for d = 0..max_derivative.
std::vector<Eigen::MatrixXd> legendre_table(std::span<const double> x, int max_degree, int max_derivative);

// Polynomial stored by its Legendre coefficients.
class LegendreSeries {
public:
  LegendreSeries() = default;
  explicit LegendreSeries(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {}

  const Eigen::VectorXd& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  double operator()(double x) const;
  LegendreSeries derivative() const;
  LegendreSeries derivative(int order) const;

  LegendreSeries operator+(const LegendreSeries& o) const;
  LegendreSeries operator-(const LegendreSeries& o) const;
  LegendreSeries operator*(double s) const;

  /// Exact integral of the product over [-1, 1] by orthogonality.
  double inner(const LegendreSeries& o) const;

private:
  Eigen::VectorXd c_;
};

}  // namespace slipns::numerics
