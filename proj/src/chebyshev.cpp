#include "slipns/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "slipns/core.hpp"

namespace slipns::numerics {

Eigen::VectorXd lobatto_nodes(int degree) {
  Eigen::VectorXd x(degree + 1);
  for (int i = 0; i <= degree; ++i) x[i] = std::cos(std::numbers::pi * i / degree);
  // exact symmetry and endpoints
  for (int i = 0; i <= degree / 2; ++i) {
    const double v = 0.5 * (x[i] - x[degree - i]);
    x[i] = v;
    x[degree - i] = -v;
  }
  if (degree % 2 == 0) x[degree / 2] = 0.0;
  x[0] = 1.0;
  x[degree] = -1.0;
  return x;
}

Eigen::MatrixXd chebyshev_evaluation(int degree, std::span<const double> x) {
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd t(m, degree + 1);
  for (Eigen::Index q = 0; q < m; ++q) {
    t(q, 0) = 1.0;
    if (degree >= 1) t(q, 1) = x[q];
    for (int j = 1; j < degree; ++j) t(q, j + 1) = 2.0 * x[q] * t(q, j) - t(q, j - 1);
  }
  return t;
}

ChebyshevGrid::ChebyshevGrid(int degree) : degree_(degree) {
  if (degree < 2) throw ValidationError("Chebyshev degree must be >= 2");
  const int n = degree + 1;
  nodes_ = lobatto_nodes(degree);

  synthesis_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) synthesis_(i, j) = std::cos(std::numbers::pi * static_cast<double>(i * j % (2 * degree)) / degree);

  // Discrete cosine inverse on the Lobatto grid.
  analysis_.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const double cj = (j == 0 || j == degree) ? 2.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      const double ci = (i == 0 || i == degree) ? 2.0 : 1.0;
      analysis_(j, i) = 2.0 / (degree * cj * ci) * synthesis_(i, j);
    }
  }

  // Nodal first derivative with the negative-sum diagonal.
  d1_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double ci = ((i == 0 || i == degree) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double cj = ((j == 0 || j == degree) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
      d1_(i, j) = ci / cj / (nodes_[i] - nodes_[j]);
    }
    d1_(i, i) = -d1_.row(i).sum();
  }
  d2_ = d1_ * d1_;

  coeff_d1_ = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    coeff_d1_.col(j) = chebyshev_derivative(e);
  }
}

}  // namespace slipns::numerics
