#include "slipns/core.hpp"

#include <cmath>
#include <sstream>

namespace slipns {

ModeProblem ModeProblem::on_lattice(const ChannelConfig& config, int n, const SlipPair& slip) {
  validate_channel(config);
  if (n < 1) throw ValidationError("lattice index must be >= 1");
  return ModeProblem{static_cast<double>(n) / config.period_length, config.viscosity, slip};
}

void validate_slip(const SlipPair& slip) {
  if (!std::isfinite(slip.xi_minus) || !std::isfinite(slip.xi_plus))
    throw ValidationError("slip coefficients must be finite");
  if (slip.xi_minus < 0.0 || slip.xi_plus < 0.0)
    throw ValidationError("slip coefficients must be nonnegative");
}

void validate_channel(const ChannelConfig& config) {
  if (!(config.period_length > 0.0) || !std::isfinite(config.period_length))
    throw ValidationError("period length must be positive");
  if (!(config.viscosity > 0.0) || !std::isfinite(config.viscosity))
    throw ValidationError("viscosity must be positive");
}

ModeProblem validate_problem(const ModeProblem& p) {
  if (!(p.wavenumber > 0.0) || !std::isfinite(p.wavenumber))
    throw ValidationError("wavenumber must be positive");
  if (!(p.viscosity > 0.0) || !std::isfinite(p.viscosity))
    throw ValidationError("viscosity must be positive");
  validate_slip(p.slip);
  return p;
}

std::string to_string(const SlipPair& slip) {
  std::ostringstream os;
  os << "(" << slip.xi_minus << ", " << slip.xi_plus << ")";
  return os.str();
}

}  // namespace slipns
