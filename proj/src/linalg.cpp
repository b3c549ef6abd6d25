#include "slipns/linalg.hpp"

#include <numeric>
#include <vector>

#include "slipns/core.hpp"

namespace slipns::numerics {

double symmetry_defect(const Eigen::MatrixXd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8 * peak) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

GeneralizedEigResult solve_generalized_symmetric(const Eigen::MatrixXd& b, const Eigen::MatrixXd& a) {
  if (b.rows() != b.cols() || a.rows() != a.cols() || a.rows() != b.rows())
    throw NumericalError("generalized eigensolve: matrix shapes disagree");
  if (symmetry_defect(b) > kSymmetryTolerance) throw NumericalError("generalized eigensolve: B is not symmetric");
  if (symmetry_defect(a) > kSymmetryTolerance) throw NumericalError("generalized eigensolve: A is not symmetric");

  const Eigen::MatrixXd bs = 0.5 * (b + b.transpose());
  const Eigen::MatrixXd as = 0.5 * (a + a.transpose());
  Eigen::LLT<Eigen::MatrixXd> chol(as);
  if (chol.info() != Eigen::Success) throw NumericalError("generalized eigensolve: A is not positive definite");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(bs, as, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw NumericalError("generalized eigensolve: factorization failed");

  const Eigen::Index n = b.rows();
  GeneralizedEigResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    out.eigenvalues[i] = solver.eigenvalues()[src];
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    v /= std::sqrt(v.dot(as * v));
    canonical_sign(v);
    out.eigenvectors.col(i) = v;
  }
  return out;
}

}  // namespace slipns::numerics
