#include "slipns/basis.hpp"

#include <cmath>
#include <string>

#include "slipns/core.hpp"

namespace slipns::numerics {

namespace {

constexpr double kQuadratureTolerance = 1e-13;

// Fill phi tables from Legendre tables: phi_j = s_j (L_j - L_{j+2}), s_j = 2/(2j+3).
Eigen::MatrixXd combine(const Eigen::MatrixXd& legendre, int size) {
  Eigen::MatrixXd out(legendre.rows(), size);
  for (int j = 0; j < size; ++j)
    out.col(j) = (2.0 / (2.0 * j + 3.0)) * (legendre.col(j) - legendre.col(j + 2));
  return out;
}

}  // namespace

DirichletBasis build_basis(int size) {
  if (size < 4) throw ValidationError("basis size must be >= 4, got " + std::to_string(size));

  DirichletBasis b;
  b.size_ = size;
  b.rule_ = gauss_legendre(size + 4);

  for (int d = 0; d <= 2 * size + 6; d += 2) {
    const double exact = 2.0 / (d + 1.0);
    const double approx = b.rule_.integrate(b.rule_.nodes.array().pow(d).matrix());
    if (std::abs(approx - exact) > kQuadratureTolerance * exact)
      throw NumericalError("quadrature not exact for degree " + std::to_string(d));
  }

  const std::vector<double> nodes(b.rule_.nodes.data(), b.rule_.nodes.data() + b.rule_.nodes.size());
  const auto interior = legendre_table(nodes, size + 1, DirichletBasis::kMaxDerivative);
  const std::vector<double> ends{-1.0, 1.0};
  const auto boundary = legendre_table(ends, size + 1, DirichletBasis::kMaxDerivative);
  for (int d = 0; d <= DirichletBasis::kMaxDerivative; ++d) {
    b.at_nodes_[d] = combine(interior[d], size);
    b.at_ends_[d] = combine(boundary[d], size);
  }
  return b;
}

Eigen::VectorXd DirichletBasis::to_legendre(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size_ + 2);
  for (int j = 0; j < size_; ++j) {
    const double s = 2.0 / (2.0 * j + 3.0) * coeffs[j];
    out[j] += s;
    out[j + 2] -= s;
  }
  return out;
}

Eigen::MatrixXd DirichletBasis::gram(int a, int b) const {
  return at_nodes_[a].transpose() * rule_.weights.asDiagonal() * at_nodes_[b];
}

}  // namespace slipns::numerics
