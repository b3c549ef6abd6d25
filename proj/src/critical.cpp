#include "slipns/critical.hpp"

#include <cmath>

#include "slipns/linalg.hpp"

namespace slipns::critical {

namespace {

constexpr double kScaledThreshold = 20.0;

double closed_form_direct(double k, double sum, double diff) {
  const double s = std::sinh(2.0 * k);
  const double c = std::cosh(2.0 * k);
  const double a = s - 2.0 * k * c;
  const double root = std::sqrt(a * a * sum * sum + s * s * (s * s - 4.0 * k * k) * diff * diff);
  return ((s * c - 2.0 * k) * sum + root) / (4.0 * k * s * s);
}

// Numerator and denominator divided by sinh^2(2k), written with e = exp(-4k).
double closed_form_scaled(double k, double sum, double diff) {
  const double e = std::exp(-4.0 * k);
  const double inv_s = 2.0 * std::exp(-2.0 * k) / (1.0 - e);
  const double coth = (1.0 + e) / (1.0 - e);
  const double two_k_over_s2 = 2.0 * k * inv_s * inv_s;
  const double a = inv_s * (1.0 - 2.0 * k * coth);
  const double b = 1.0 - 4.0 * k * k * inv_s * inv_s;
  const double root = std::sqrt(a * a * sum * sum + b * diff * diff);
  return ((coth - two_k_over_s2) * sum + root) / (4.0 * k);
}

}  // namespace

double mu_c_closed_form(double k, const SlipPair& slip) {
  if (!(k > 0.0)) throw ValidationError("wavenumber must be positive");
  validate_slip(slip);
  const double sum = slip.xi_plus + slip.xi_minus;
  const double diff = slip.xi_plus - slip.xi_minus;
  const double value = k > kScaledThreshold ? closed_form_scaled(k, sum, diff) : closed_form_direct(k, sum, diff);
  return std::max(value, 0.0);
}

double mu_c_variational(double k, const SlipPair& slip, const numerics::DirichletBasis& basis) {
  if (!(k > 0.0)) throw ValidationError("wavenumber must be positive");
  if (basis.size() < 8) throw ValidationError("variational mu_c needs a basis of size >= 8");
  validate_slip(slip);

  const Eigen::MatrixXd& ends = basis.endpoint(1);
  const Eigen::MatrixXd production = slip.xi_minus * ends.row(0).transpose() * ends.row(0) +
                                     slip.xi_plus * ends.row(1).transpose() * ends.row(1);
  const double k2 = k * k;
  Eigen::MatrixXd energy = basis.gram(2, 2) + 2.0 * k2 * basis.gram(1, 1) + k2 * k2 * basis.gram(0, 0);
  energy = 0.5 * (energy + energy.transpose()).eval();

  const auto result = numerics::solve_generalized_symmetric(production, energy);
  return std::max(result.eigenvalues[0], 0.0);
}

double mu_c_global(const SlipPair& slip) {
  validate_slip(slip);
  const double p = slip.xi_plus, m = slip.xi_minus;
  return (p + m + std::sqrt(p * p - p * m + m * m)) / 3.0;
}

std::optional<int> critical_index(const ChannelConfig& config, const SlipPair& slip) {
  validate_channel(config);
  validate_slip(slip);
  const double mu = config.viscosity;
  auto unstable = [&](long n) { return mu < mu_c_closed_form(static_cast<double>(n) / config.period_length, slip); };
  if (!unstable(1)) return std::nullopt;

  long lo = 1, hi = 2;
  while (unstable(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > (1L << 40)) throw NumericalError("critical_wavenumber: no stable lattice point found");
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (unstable(mid) ? lo : hi) = mid;
  }
  return static_cast<int>(lo);
}

std::optional<double> critical_wavenumber(const ChannelConfig& config, const SlipPair& slip) {
  const auto n = critical_index(config, slip);
  if (!n) return std::nullopt;
  return static_cast<double>(*n) / config.period_length;
}

CriticalCurve sample_curve(const SlipPair& slip, double k_min, double k_max, int points) {
  if (!(k_min > 0.0) || !(k_max > k_min)) throw ValidationError("need 0 < k_min < k_max");
  if (points < 2) throw ValidationError("need at least two sample points");
  CriticalCurve curve{slip, {}};
  const double ratio = std::log(k_max / k_min) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double k = i == points - 1 ? k_max : k_min * std::exp(ratio * i);
    curve.samples.emplace_back(k, mu_c_closed_form(k, slip));
  }
  return curve;
}

}  // namespace slipns::critical
