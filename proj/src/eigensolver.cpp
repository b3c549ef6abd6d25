#include "slipns/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "slipns/linalg.hpp"
#include "slipns/roots.hpp"

namespace slipns::eigen {

using numerics::DirichletBasis;

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::MatrixXd production_matrix(const SlipPair& slip, const DirichletBasis& basis) {
  const Eigen::MatrixXd& ends = basis.endpoint(1);
  return slip.xi_minus * ends.row(0).transpose() * ends.row(0) +
         slip.xi_plus * ends.row(1).transpose() * ends.row(1);
}

}  // namespace

AssembledPencil assemble(const ModeProblem& problem, const DirichletBasis& basis) {
  validate_problem(problem);
  const double k2 = problem.wavenumber * problem.wavenumber;
  AssembledPencil p;
  p.problem = problem;
  p.basis = &basis;
  p.energy = symmetrized(basis.gram(2, 2) + 2.0 * k2 * basis.gram(1, 1) + k2 * k2 * basis.gram(0, 0));
  p.a = symmetrized(basis.gram(1, 1) + k2 * basis.gram(0, 0));
  p.production = production_matrix(problem.slip, basis);
  p.b = p.production - problem.viscosity * p.energy;
  return p;
}

std::vector<double> Spectrum::positive_lambdas() const {
  std::vector<double> out;
  for (const auto& pr : pairs)
    if (pr.lambda > 0.0) out.push_back(pr.lambda);
  return out;
}

Spectrum solve_spectrum(const AssembledPencil& pencil) {
  const auto result = numerics::solve_generalized_symmetric(pencil.b, pencil.a);
  Spectrum s;
  s.problem = pencil.problem;
  s.basis = pencil.basis;
  const auto n = result.eigenvalues.size();
  s.pairs.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    s.pairs.push_back({result.eigenvalues[i], result.eigenvectors.col(i)});
    if (result.eigenvalues[i] > 0.0) ++s.positive_count;
  }
  return s;
}

Spectrum solve_spectrum(const ModeProblem& problem, const DirichletBasis& basis) {
  return solve_spectrum(assemble(problem, basis));
}

double rayleigh_quotient(const AssembledPencil& pencil, const Eigen::VectorXd& coeffs) {
  const double denom = coeffs.dot(pencil.a * coeffs);
  if (!(denom > 0.0)) throw ValidationError("rayleigh quotient of the zero vector");
  return coeffs.dot(pencil.b * coeffs) / denom;
}

double lambda1_variational(const ModeProblem& problem, const DirichletBasis& basis, std::uint64_t seed, int starts) {
  if (starts < 1) throw ValidationError("need at least one random start");
  const AssembledPencil pencil = assemble(problem, basis);
  const int n = basis.size();

  // Upper bound on the quotient: the production part alone has rank <= 2,
  // so its top eigenvalue against A reduces to a 2x2 problem.
  const Eigen::MatrixXd& ends = basis.endpoint(1);
  Eigen::MatrixXd g(n, 2);
  g.col(0) = std::sqrt(problem.slip.xi_minus) * ends.row(0).transpose();
  g.col(1) = std::sqrt(problem.slip.xi_plus) * ends.row(1).transpose();
  Eigen::LLT<Eigen::MatrixXd> a_llt(pencil.a);
  if (a_llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
  const Eigen::Matrix2d small = g.transpose() * a_llt.solve(g);
  const double bound = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(small).eigenvalues().maxCoeff();

  // sigma A - B = (sigma A - R) + mu E is positive definite for sigma >= bound.
  const double sigma = bound + 1e-9 * (1.0 + std::abs(bound));
  Eigen::LLT<Eigen::MatrixXd> shifted(sigma * pencil.a - pencil.b);
  if (shifted.info() != Eigen::Success) throw NumericalError("shifted pencil is not positive definite");

  // Block inverse iteration with Rayleigh-Ritz: the quotient is maximized
  // over a growing Krylov-like subspace, so close pairs do not stall it.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int block = std::min(n, 8);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Eigen::MatrixXd v(n, block);
    for (int j = 0; j < block; ++j)
      for (int i = 0; i < n; ++i) v(i, j) = normal(rng);
    double q = -std::numeric_limits<double>::infinity();
    int stable = 0;
    for (int it = 0; it < 5000 && stable < 3; ++it) {
      v = shifted.solve(pencil.a * v);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
      v = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
      const Eigen::MatrixXd bs = v.transpose() * pencil.b * v;
      const Eigen::MatrixXd as = v.transpose() * pencil.a * v;
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (bs + bs.transpose()),
                                                                     0.5 * (as + as.transpose()));
      if (ritz.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
      v = v * ritz.eigenvectors();
      const double next = ritz.eigenvalues()[block - 1];
      stable = std::abs(next - q) <= 1e-15 * std::max(1.0, std::abs(next)) ? stable + 1 : 0;
      q = next;
    }
    best = std::max(best, rayleigh_quotient(pencil, v.col(block - 1)));
  }
  return best;
}

int resolved_count(int basis_size) { return std::min(basis_size / 2, 16); }

ModeResiduals mode_residuals(const Spectrum& spectrum, int index) {
  if (index < 0 || index >= static_cast<int>(spectrum.pairs.size())) throw ValidationError("mode index out of range");
  const auto& pr = spectrum.pairs[static_cast<std::size_t>(index)];
  const double k = spectrum.problem.wavenumber, k2 = k * k;
  const double mu = spectrum.problem.viscosity;
  const double lam = pr.lambda;
  const auto& slip = spectrum.problem.slip;

  const auto phi = spectrum.basis->series(pr.phi);
  const auto d1 = phi.derivative();
  const auto d2 = d1.derivative();
  const auto d4 = d2.derivative(2);
  const auto r = phi * (lam * k2 + mu * k2 * k2) - d2 * (lam + 2.0 * mu * k2) + d4 * mu;

  ModeResiduals out;
  out.strong_l2 = std::sqrt(std::max(r.inner(r), 0.0));
  out.bc_upper = std::abs(mu * d2(1.0) - slip.xi_plus * d1(1.0));
  out.bc_lower = std::abs(mu * d2(-1.0) + slip.xi_minus * d1(-1.0));
  out.wall_value = std::max(std::abs(phi(1.0)), std::abs(phi(-1.0)));
  out.normalization = std::abs(d1.inner(d1) + k2 * phi.inner(phi) - 1.0);
  return out;
}

double orthogonality_defect(const Spectrum& spectrum, const AssembledPencil& pencil, int count) {
  count = std::min<int>(count, static_cast<int>(spectrum.pairs.size()));
  double worst = 0.0;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const auto& vi = spectrum.pairs[static_cast<std::size_t>(i)].phi;
      const auto& vj = spectrum.pairs[static_cast<std::size_t>(j)].phi;
      worst = std::max(worst, std::abs(vi.dot(pencil.a * vj)));
    }
  return worst;
}

double characteristic_determinant(double lambda, const ModeProblem& problem) {
  if (!(lambda > 0.0)) throw ValidationError("characteristic determinant needs lambda > 0");
  validate_problem(problem);
  const double mu = problem.viscosity;
  const double xp = problem.slip.xi_plus, xm = problem.slip.xi_minus;
  const double k = problem.wavenumber;
  const double m = std::sqrt(k * k + lambda / mu);

  Eigen::Matrix4d d;
  int col = 0;
  for (double a : {k, m}) {
    const double t = std::tanh(a);
    // cosh(a x) / cosh(a)
    d(0, col) = 1.0;
    d(1, col) = 1.0;
    d(2, col) = mu * a * a - xp * a * t;
    d(3, col) = mu * a * a - xm * a * t;
    ++col;
    // sinh(a x) / cosh(a)
    d(0, col) = t;
    d(1, col) = -t;
    d(2, col) = mu * a * a * t - xp * a;
    d(3, col) = -mu * a * a * t + xm * a;
    ++col;
  }
  return d.determinant();
}

double lambda_upper_bound(const ModeProblem& problem) {
  // g(+-1)^2 <= |g|^2 / 2 + 2 |g| |g'| with g = phi', then maximize over |g'| / |g|.
  const double s = problem.slip.xi_minus + problem.slip.xi_plus;
  return 0.5 * s + s * s / problem.viscosity;
}

double default_lambda_max(const ModeProblem& problem) {
  return std::max(1e4 * problem.viscosity * problem.wavenumber * problem.wavenumber,
                  1.05 * lambda_upper_bound(problem));
}

DeterminantTrace determinant_roots(const ModeProblem& problem, double lambda_max, int grid_points) {
  validate_problem(problem);
  if (!(lambda_max > 0.0)) throw ValidationError("lambda_max must be positive");
  if (grid_points < 64) throw ValidationError("determinant scan needs at least 64 grid points");

  // Below ~1e-6 mu k^2 the two exponential families nearly coincide and the
  // determinant sinks into round-off.
  const double floor = 1e-6 * problem.viscosity * problem.wavenumber * problem.wavenumber;
  const double lo = std::min(floor, 1e-3 * lambda_max);
  const double ratio = std::log(lambda_max / lo) / (grid_points - 1);

  DeterminantTrace trace;
  trace.problem = problem;
  trace.lambda_grid.resize(static_cast<std::size_t>(grid_points));
  trace.det_values.resize(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    const double lam = i == grid_points - 1 ? lambda_max : lo * std::exp(ratio * i);
    trace.lambda_grid[static_cast<std::size_t>(i)] = lam;
    trace.det_values[static_cast<std::size_t>(i)] = characteristic_determinant(lam, problem);
  }

  auto f = [&](double lam) { return characteristic_determinant(lam, problem); };
  for (std::size_t i = 0; i + 1 < trace.lambda_grid.size(); ++i) {
    const double da = trace.det_values[i], db = trace.det_values[i + 1];
    if (da == 0.0) {
      trace.roots.push_back(trace.lambda_grid[i]);
    } else if (da * db < 0.0) {
      const double a = trace.lambda_grid[i], b = trace.lambda_grid[i + 1];
      trace.roots.push_back(numerics::find_root_bracketed(f, a, b, 1e-13 * b));
    }
  }
  std::sort(trace.roots.begin(), trace.roots.end(), std::greater<>());
  return trace;
}

}  // namespace slipns::eigen
