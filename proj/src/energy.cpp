#include "slipns/energy.hpp"

#include <cmath>

namespace slipns::sim {

EnergyCheck energy_inequality_check(const VelocityField& w, double capital_lambda, double mu, const SlipPair& slip) {
  if (!(mu > 0.0)) throw ValidationError("viscosity must be positive");
  validate_slip(slip);
  const double div = divergence_max(w);
  if (div > 1e-8) throw ValidationError("field is not divergence-free (max divergence " + std::to_string(div) + ")");

  double wall = 0.0;
  for (int n = -w.u2.fourier_modes; n <= w.u2.fourier_modes; ++n) {
    cplx top = 0, bottom = 0;
    double sign = 1.0;
    for (int j = 0; j <= w.u2.cheb_degree; ++j) {
      top += w.u2.col(n)[j];
      bottom += sign * w.u2.col(n)[j];
      sign = -sign;
    }
    wall = std::max({wall, std::abs(top), std::abs(bottom)});
  }
  if (wall > 1e-8) throw ValidationError("normal velocity does not vanish on the walls");

  EnergyCheck c;
  const double l2 = l2_norm(w);
  c.norm2 = l2 * l2;
  c.lhs = -mu * gradient_energy(w) + boundary_production(w, slip);
  c.rhs = capital_lambda * c.norm2;
  c.holds = c.lhs <= c.rhs + 1e-8 * c.norm2;
  return c;
}

}  // namespace slipns::sim
