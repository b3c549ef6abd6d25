#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "slipns/core.hpp"
#include "slipns/modes.hpp"

namespace slipns::sim {

using cplx = std::complex<double>;

/// Fourier (x1, modes n = -M..M, wavenumber n/L) by Chebyshev (x2, degree P)
/// coefficients of a real field. data(j, n + M) multiplies T_j(x2) e^{i n x1 / L}.
struct SpectralField2D {
  int fourier_modes = 0;  // M
  int cheb_degree = 0;    // P
  double period_length = 1.0;
  Eigen::MatrixXcd data;

  SpectralField2D() = default;
  SpectralField2D(int m, int p, double l);

  int columns() const { return 2 * fourier_modes + 1; }
  double wavenumber(int n) const { return n / period_length; }
  auto col(int n) { return data.col(n + fourier_modes); }
  auto col(int n) const { return data.col(n + fourier_modes); }

  bool same_shape(const SpectralField2D& o) const;
  /// max_n max_j |data(j, n) - conj(data(j, -n))|, plus |imag| of the n = 0 column.
  double reality_defect() const;
  void enforce_reality();
};

struct VelocityField {
  SpectralField2D u1;
  SpectralField2D u2;
};

/// u1 = d2 Phi, u2 = -d1 Phi for n != 0. The n = 0 column of `psi` holds the
/// mean streamwise velocity U(x2) directly (u2 has no mean).
VelocityField velocity_from_streamfunction(const SpectralField2D& psi);

/// max norm over Chebyshev-Lobatto nodes of i k u1 + d2 u2.
double divergence_max(const VelocityField& v);

struct Norms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

/// Quadrature-exact Sobolev norms over the period cell 2 pi L x (-1, 1);
/// h2 includes the full Hessian.
Norms norms(const VelocityField& v);
double l2_norm(const VelocityField& v);

/// int |grad u|^2 over the cell.
double gradient_energy(const VelocityField& v);
/// xi_+ int |u1(x1, 1)|^2 dx1 + xi_- int |u1(x1, -1)|^2 dx1.
double boundary_production(const VelocityField& v, const SlipPair& slip);

/// Same L2 norm evaluated by physical-space quadrature on a uniform x1 grid
/// and Gauss-Legendre x2 nodes (independent of the coefficient-space sum).
double l2_norm_physical(const VelocityField& v);

/// Chebyshev coefficients (degree P) of a polynomial given by its Legendre series.
Eigen::VectorXd chebyshev_from_legendre(const numerics::LegendreSeries& s, int degree);

/// Streamfunction -(delta/k) sum_j c_j sin(k x1) phi_j(x2) of a packet; k L
/// must be an integer n with 1 <= n <= M.
SpectralField2D streamfunction_from_packet(const modes::ModePacket& packet, double delta, int m, int p, double l);

/// Random streamfunction vanishing at both walls, supported on 1 <= |n| <= n_max.
SpectralField2D random_streamfunction(int m, int p, double l, int n_max, std::mt19937_64& rng);

/// Physical values on the Lobatto nodes (rows, node 0 at x2 = +1) by a
/// uniform x1 grid of nx points (columns).
Eigen::MatrixXd to_physical(const SpectralField2D& f, int nx);

}  // namespace slipns::sim
