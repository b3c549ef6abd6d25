#include "slipns/legendre.hpp"

#include <cmath>
#include <numbers>

#include "slipns/core.hpp"

namespace slipns::numerics {

namespace {

// L_n(x) and L_n'(x) by the three-term recurrence.
void legendre_pair(int n, double x, double& value, double& deriv) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    value = 1.0;
    deriv = 0.0;
    return;
  }
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  value = p1;
  deriv = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int points) {
  if (points < 1) throw ValidationError("quadrature needs at least one point");
  QuadratureRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton; nodes are mirrored for exact symmetry.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double value = 0.0, deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(points, x, value, deriv);
      const double dx = value / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_pair(points, x, value, deriv);
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) rule.nodes[points / 2] = 0.0;
  return rule;
}

std::vector<Eigen::MatrixXd> legendre_table(std::span<const double> x, int max_degree, int max_derivative) {
  const auto m = static_cast<Eigen::Index>(x.size());
  std::vector<Eigen::MatrixXd> table(max_derivative + 1, Eigen::MatrixXd::Zero(m, max_degree + 1));
  auto& values = table[0];
  for (Eigen::Index i = 0; i < m; ++i) {
    values(i, 0) = 1.0;
    if (max_degree >= 1) values(i, 1) = x[i];
    for (int n = 1; n < max_degree; ++n)
      values(i, n + 1) = ((2.0 * n + 1.0) * x[i] * values(i, n) - n * values(i, n - 1)) / (n + 1.0);
  }
  // L^{(d)}_{n+1} = L^{(d)}_{n-1} + (2n+1) L^{(d-1)}_n
  for (int d = 1; d <= max_derivative; ++d) {
    auto& cur = table[d];
    const auto& prev = table[d - 1];
    for (Eigen::Index i = 0; i < m; ++i) {
      if (max_degree >= 1) cur(i, 1) = prev(i, 0);
      for (int n = 1; n < max_degree; ++n) cur(i, n + 1) = cur(i, n - 1) + (2.0 * n + 1.0) * prev(i, n);
    }
  }
  return table;
}

double LegendreSeries::operator()(double x) const {
  if (c_.size() == 0) return 0.0;
  // Clenshaw recurrence
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index n = c_.size() - 1; n >= 1; --n) {
    const double alpha = (2.0 * n + 1.0) / (n + 1.0) * x;
    const double beta = -static_cast<double>(n + 1) / (n + 2.0);
    const double b0 = c_[n] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return c_[0] + x * b1 - 0.5 * b2;
}

LegendreSeries LegendreSeries::derivative() const {
  const Eigen::Index n = c_.size() - 1;
  if (n <= 0) return LegendreSeries(Eigen::VectorXd::Zero(1));
  Eigen::VectorXd c = c_;
  Eigen::VectorXd der = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = n; j > 2; --j) {
    der[j - 1] = (2.0 * j - 1.0) * c[j];
    c[j - 2] += c[j];
  }
  if (n > 1) der[1] = 3.0 * c[2];
  der[0] = c[1];
  return LegendreSeries(std::move(der));
}

LegendreSeries LegendreSeries::derivative(int order) const {
  LegendreSeries out = *this;
  for (int i = 0; i < order; ++i) out = out.derivative();
  return out;
}

LegendreSeries LegendreSeries::operator+(const LegendreSeries& o) const {
  const Eigen::Index n = std::max(c_.size(), o.c_.size());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r.head(c_.size()) += c_;
  r.head(o.c_.size()) += o.c_;
  return LegendreSeries(std::move(r));
}

LegendreSeries LegendreSeries::operator-(const LegendreSeries& o) const { return *this + o * -1.0; }

LegendreSeries LegendreSeries::operator*(double s) const { return LegendreSeries(c_ * s); }

double LegendreSeries::inner(const LegendreSeries& o) const {
  const Eigen::Index n = std::min(c_.size(), o.c_.size());
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) sum += c_[j] * o.c_[j] * 2.0 / (2.0 * j + 1.0);
  return sum;
}

}  // namespace slipns::numerics
