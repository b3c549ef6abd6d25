#pragma once

#include "slipns/core.hpp"
#include "slipns/field.hpp"

namespace slipns::sim {

struct EnergyCheck {
  double lhs = 0.0;   // -mu int |grad w|^2 + xi_+ int |w1(x1,1)|^2 + xi_- int |w1(x1,-1)|^2
  double rhs = 0.0;   // Lambda int |w|^2
  double norm2 = 0.0; // int |w|^2
  bool holds = false; // lhs <= rhs + 1e-8 int |w|^2
};

/// Evaluates both sides of the growth bound for a divergence-free field with
/// w2 = 0 on the walls. Throws ValidationError when the discrete divergence
/// or the wall normal velocity exceeds 1e-8.
EnergyCheck energy_inequality_check(const VelocityField& w, double capital_lambda, double mu, const SlipPair& slip);

}  // namespace slipns::sim
