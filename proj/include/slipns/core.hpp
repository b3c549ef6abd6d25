#pragma once

#include <stdexcept>
#include <string>

namespace slipns {

/// Raised when a parameter violates a domain invariant.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical kernel cannot produce a trustworthy answer
/// (non-symmetric input, failed factorization, missing bracket, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Wall friction coefficients: xi_minus on x2 = -1, xi_plus on x2 = +1.
struct SlipPair {
  double xi_minus = 0.0;
  double xi_plus = 0.0;

  bool any_positive() const { return xi_minus > 0.0 || xi_plus > 0.0; }
  bool operator==(const SlipPair&) const = default;
};

// Horizontal period is 2*pi*period_length.
struct ChannelConfig {
  double period_length = 1.0;
  double viscosity = 1.0;

  bool operator==(const ChannelConfig&) const = default;
};

/// One linear-stability instance (k, mu, slip).
struct ModeProblem {
  double wavenumber = 1.0;
  double viscosity = 1.0;
  SlipPair slip;

  /// Lattice wavenumber k = n / L of the channel.
  static ModeProblem on_lattice(const ChannelConfig& config, int n, const SlipPair& slip);

  bool operator==(const ModeProblem&) const = default;
};

/// Lattice wavenumbers k = n / L for n = 1..max_index.
struct LatticeSweep {
  ChannelConfig config;
  SlipPair slip;
  int max_index = 1;

  double wavenumber(int n) const { return static_cast<double>(n) / config.period_length; }
};

void validate_slip(const SlipPair& slip);
void validate_channel(const ChannelConfig& config);

/// Returns the problem unchanged when k > 0, mu > 0 and both slip
/// coefficients are nonnegative; throws ValidationError otherwise.
ModeProblem validate_problem(const ModeProblem& p);

std::string to_string(const SlipPair& slip);

}  // namespace slipns
