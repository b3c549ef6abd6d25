#include "slipns/field.hpp"

#include <cmath>
#include <numbers>

#include "slipns/chebyshev.hpp"
#include "slipns/legendre.hpp"

namespace slipns::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Values of T_j and the derivative series at Gauss-Legendre nodes, exact for
// the degree-2P integrands of the norms.
struct YQuadrature {
  numerics::QuadratureRule rule;
  Eigen::MatrixXcd eval;  // Q x (P+1)

  explicit YQuadrature(int p) : rule(numerics::gauss_legendre(p + 4)) {
    std::vector<double> x(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
    eval = numerics::chebyshev_evaluation(p, x).cast<cplx>();
  }

  // sum_q w_q |values(q, c)|^2 summed over columns c, each weighted by wcol[c].
  double weighted(const Eigen::MatrixXcd& values, const Eigen::VectorXd& wcol) const {
    double s = 0.0;
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (wcol[c] == 0.0) continue;
      double col = 0.0;
      for (Eigen::Index q = 0; q < values.rows(); ++q) col += rule.weights[q] * std::norm(values(q, c));
      s += wcol[c] * col;
    }
    return s;
  }
};

Eigen::MatrixXcd derivative_columns(const Eigen::MatrixXcd& data) {
  Eigen::MatrixXcd d(data.rows(), data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const Eigen::VectorXcd col = data.col(c);
    d.col(c) = numerics::chebyshev_derivative(col);
  }
  return d;
}

Eigen::VectorXd wavenumber_powers(const SpectralField2D& f, int power) {
  Eigen::VectorXd w(f.columns());
  for (int n = -f.fourier_modes; n <= f.fourier_modes; ++n)
    w[n + f.fourier_modes] = std::pow(f.wavenumber(n), power);
  return w;
}

void check_shape(const VelocityField& v) {
  if (!v.u1.same_shape(v.u2)) throw ValidationError("velocity components have different shapes");
}

}  // namespace

SpectralField2D::SpectralField2D(int m, int p, double l)
    : fourier_modes(m), cheb_degree(p), period_length(l), data(Eigen::MatrixXcd::Zero(p + 1, 2 * m + 1)) {
  if (m < 1) throw ValidationError("need at least one Fourier mode");
  if (p < 4) throw ValidationError("Chebyshev degree must be at least 4");
  if (!(l > 0.0)) throw ValidationError("period length must be positive");
}

bool SpectralField2D::same_shape(const SpectralField2D& o) const {
  return fourier_modes == o.fourier_modes && cheb_degree == o.cheb_degree && period_length == o.period_length;
}

double SpectralField2D::reality_defect() const {
  double d = col(0).imag().cwiseAbs().maxCoeff();
  for (int n = 1; n <= fourier_modes; ++n) d = std::max(d, (col(n) - col(-n).conjugate()).cwiseAbs().maxCoeff());
  return d;
}

void SpectralField2D::enforce_reality() {
  col(0) = col(0).real().cast<cplx>();
  for (int n = 1; n <= fourier_modes; ++n) {
    const Eigen::VectorXcd avg = 0.5 * (col(n) + col(-n).conjugate());
    col(n) = avg;
    col(-n) = avg.conjugate();
  }
}

VelocityField velocity_from_streamfunction(const SpectralField2D& psi) {
  VelocityField v{psi, SpectralField2D(psi.fourier_modes, psi.cheb_degree, psi.period_length)};
  v.u1.data = derivative_columns(psi.data);
  v.u1.col(0) = psi.col(0);
  for (int n = -psi.fourier_modes; n <= psi.fourier_modes; ++n)
    if (n != 0) v.u2.col(n) = cplx(0.0, -psi.wavenumber(n)) * psi.col(n);
  return v;
}

double divergence_max(const VelocityField& v) {
  check_shape(v);
  const numerics::ChebyshevGrid grid(v.u1.cheb_degree);
  Eigen::MatrixXcd div = derivative_columns(v.u2.data);
  for (int n = -v.u1.fourier_modes; n <= v.u1.fourier_modes; ++n)
    div.col(n + v.u1.fourier_modes) += cplx(0.0, v.u1.wavenumber(n)) * v.u1.col(n);
  const Eigen::MatrixXcd nodal = grid.synthesis().cast<cplx>() * div;
  return nodal.cwiseAbs().maxCoeff();
}

Norms norms(const VelocityField& v) {
  check_shape(v);
  const YQuadrature yq(v.u1.cheb_degree);
  const double cell = kTwoPi * v.u1.period_length;
  const Eigen::VectorXd w0 = wavenumber_powers(v.u1, 0) * cell;
  const Eigen::VectorXd w2 = wavenumber_powers(v.u1, 2) * cell;
  const Eigen::VectorXd w4 = wavenumber_powers(v.u1, 4) * cell;

  double l2 = 0.0, grad = 0.0, hess = 0.0;
  for (const SpectralField2D* f : {&v.u1, &v.u2}) {
    const Eigen::MatrixXcd d1 = derivative_columns(f->data);
    const Eigen::MatrixXcd d2 = derivative_columns(d1);
    const Eigen::MatrixXcd f0 = yq.eval * f->data, f1 = yq.eval * d1, f2 = yq.eval * d2;
    const double a0 = yq.weighted(f0, w0), a0k2 = yq.weighted(f0, w2), a0k4 = yq.weighted(f0, w4);
    const double a1 = yq.weighted(f1, w0), a1k2 = yq.weighted(f1, w2);
    const double a2 = yq.weighted(f2, w0);
    l2 += a0;
    grad += a0k2 + a1;
    hess += a0k4 + 2.0 * a1k2 + a2;
  }
  return {std::sqrt(l2), std::sqrt(l2 + grad), std::sqrt(l2 + grad + hess)};
}

double l2_norm(const VelocityField& v) {
  check_shape(v);
  const YQuadrature yq(v.u1.cheb_degree);
  const Eigen::VectorXd w0 = wavenumber_powers(v.u1, 0) * (kTwoPi * v.u1.period_length);
  return std::sqrt(yq.weighted(yq.eval * v.u1.data, w0) + yq.weighted(yq.eval * v.u2.data, w0));
}

double gradient_energy(const VelocityField& v) {
  check_shape(v);
  const YQuadrature yq(v.u1.cheb_degree);
  const double cell = kTwoPi * v.u1.period_length;
  const Eigen::VectorXd w0 = wavenumber_powers(v.u1, 0) * cell;
  const Eigen::VectorXd w2 = wavenumber_powers(v.u1, 2) * cell;
  double grad = 0.0;
  for (const SpectralField2D* f : {&v.u1, &v.u2}) {
    grad += yq.weighted(yq.eval * f->data, w2);
    grad += yq.weighted(yq.eval * derivative_columns(f->data), w0);
  }
  return grad;
}

double boundary_production(const VelocityField& v, const SlipPair& slip) {
  const auto& u = v.u1;
  double top = 0.0, bottom = 0.0;
  for (int n = -u.fourier_modes; n <= u.fourier_modes; ++n) {
    cplx at_top(0.0), at_bottom(0.0);
    double sign = 1.0;
    for (int j = 0; j <= u.cheb_degree; ++j) {
      at_top += u.col(n)[j];
      at_bottom += sign * u.col(n)[j];
      sign = -sign;
    }
    top += std::norm(at_top);
    bottom += std::norm(at_bottom);
  }
  return kTwoPi * u.period_length * (slip.xi_plus * top + slip.xi_minus * bottom);
}

double l2_norm_physical(const VelocityField& v) {
  check_shape(v);
  const int m = v.u1.fourier_modes;
  const int nx = 2 * m + 2;
  const numerics::QuadratureRule rule = numerics::gauss_legendre(v.u1.cheb_degree + 4);
  std::vector<double> y(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
  const Eigen::MatrixXd ey = numerics::chebyshev_evaluation(v.u1.cheb_degree, y);
  double sum = 0.0;
  for (const SpectralField2D* f : {&v.u1, &v.u2}) {
    const Eigen::MatrixXcd cols = ey.cast<cplx>() * f->data;  // Q x (2M+1)
    for (int i = 0; i < nx; ++i) {
      const double x = kTwoPi * v.u1.period_length * i / nx;
      for (Eigen::Index q = 0; q < cols.rows(); ++q) {
        cplx val(0.0);
        for (int n = -m; n <= m; ++n) val += cols(q, n + m) * std::polar(1.0, f->wavenumber(n) * x);
        sum += rule.weights[q] * val.real() * val.real();
      }
    }
  }
  return std::sqrt(sum * kTwoPi * v.u1.period_length / nx);
}

Eigen::VectorXd chebyshev_from_legendre(const numerics::LegendreSeries& s, int degree) {
  const numerics::ChebyshevGrid grid(degree);
  Eigen::VectorXd nodal(degree + 1);
  for (int i = 0; i <= degree; ++i) nodal[i] = s(grid.nodes()[i]);
  return grid.analysis() * nodal;
}

SpectralField2D streamfunction_from_packet(const modes::ModePacket& packet, double delta, int m, int p, double l) {
  SpectralField2D psi(m, p, l);
  for (int j = 0; j < packet.count(); ++j) {
    const auto& mode = packet.modes[static_cast<std::size_t>(j)];
    const double k = mode.problem.wavenumber;
    const double nk = k * l;
    const int n = static_cast<int>(std::lround(nk));
    if (std::abs(nk - n) > 1e-9 * std::max(1.0, nk)) throw ValidationError("mode wavenumber is not on the channel lattice");
    if (n < 1 || n > m) throw ValidationError("mode wavenumber exceeds the Fourier truncation");
    // -(c/k) sin(k x) phi = (i c / 2k) phi e^{ikx} - (i c / 2k) phi e^{-ikx}
    const double c = delta * packet.coefficients[static_cast<std::size_t>(j)];
    const Eigen::VectorXcd phi = chebyshev_from_legendre(mode.phi, p).cast<cplx>();
    psi.col(n) += cplx(0.0, c / (2.0 * k)) * phi;
    psi.col(-n) += cplx(0.0, -c / (2.0 * k)) * phi;
  }
  return psi;
}

SpectralField2D random_streamfunction(int m, int p, double l, int n_max, std::mt19937_64& rng) {
  if (n_max < 1 || n_max > m) throw ValidationError("random field support must satisfy 1 <= n_max <= M");
  SpectralField2D psi(m, p, l);
  const numerics::ChebyshevGrid grid(p);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int inner_degree = p - 2;
  const Eigen::MatrixXd basis = grid.synthesis().leftCols(inner_degree + 1);
  for (int n = 1; n <= n_max; ++n) {
    Eigen::VectorXcd c(inner_degree + 1);
    for (int j = 0; j <= inner_degree; ++j) {
      const double scale = 1.0 / ((1.0 + j) * (1.0 + j));
      const double re = normal(rng), im = normal(rng);
      c[j] = scale * cplx(re, im);
    }
    Eigen::VectorXcd nodal = basis.cast<cplx>() * c;
    for (int i = 0; i <= p; ++i) {
      const double y = grid.nodes()[i];
      nodal[i] *= 1.0 - y * y;
    }
    const Eigen::VectorXcd coeffs = grid.analysis().cast<cplx>() * nodal;
    psi.col(n) = coeffs;
    psi.col(-n) = coeffs.conjugate();
  }
  return psi;
}

Eigen::MatrixXd to_physical(const SpectralField2D& f, int nx) {
  if (nx < 1) throw ValidationError("need at least one x1 point");
  const numerics::ChebyshevGrid grid(f.cheb_degree);
  const Eigen::MatrixXcd nodal = grid.synthesis().cast<cplx>() * f.data;
  const int m = f.fourier_modes;
  Eigen::MatrixXcd dft(f.columns(), nx);
  for (int n = -m; n <= m; ++n)
    for (int i = 0; i < nx; ++i) dft(n + m, i) = std::polar(1.0, f.wavenumber(n) * kTwoPi * f.period_length * i / nx);
  return (nodal * dft).real();
}

}  // namespace slipns::sim
