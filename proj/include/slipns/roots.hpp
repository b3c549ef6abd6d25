#pragma once

#include <functional>

namespace slipns::numerics {

/// Root of f inside [lo, hi] given a sign change f(lo) * f(hi) < 0.
/// Terminates once the bracket is narrower than `tol` (absolute) or f hits
/// zero exactly. The result always lies inside the initial bracket.
/// Throws NumericalError when there is no sign change.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace slipns::numerics
