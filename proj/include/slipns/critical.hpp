#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "slipns/basis.hpp"
#include "slipns/core.hpp"

namespace slipns::critical {

/// Samples (k, mu_c(k, slip)); mu_c strictly decreases along increasing k.
struct CriticalCurve {
  SlipPair slip;
  std::vector<std::pair<double, double>> samples;
};

/// Closed-form critical viscosity mu_c(k, slip): the largest ratio of wall
/// production xi_-(phi'(-1))^2 + xi_+(phi'(1))^2 to the k-energy
/// int (phi'')^2 + 2k^2 (phi')^2 + k^4 phi^2 over phi vanishing at the walls.
/// Evaluated with exp(-4k) scaling for k > 20 so that it never overflows.
double mu_c_closed_form(double k, const SlipPair& slip);

/// The same maximum computed as the top generalized eigenvalue of the
/// (production, energy) pencil over the Galerkin space (basis size >= 8).
double mu_c_variational(double k, const SlipPair& slip, const numerics::DirichletBasis& basis);

/// sup_k mu_c(k, slip) = (xi_+ + xi_- + sqrt(xi_+^2 - xi_+ xi_- + xi_-^2)) / 3.
double mu_c_global(const SlipPair& slip);

/// Largest lattice wavenumber k = n/L with mu < mu_c(k, slip), or nothing
/// when even k = 1/L is stable.
std::optional<double> critical_wavenumber(const ChannelConfig& config, const SlipPair& slip);
std::optional<int> critical_index(const ChannelConfig& config, const SlipPair& slip);

/// Logarithmically spaced samples on [k_min, k_max].
CriticalCurve sample_curve(const SlipPair& slip, double k_min, double k_max, int points);

}  // namespace slipns::critical
