#include "slipns/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/toms748_solve.hpp>

#include "slipns/core.hpp"

namespace slipns::numerics {

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw ValidationError("root tolerance must be positive");
  if (lo > hi) std::swap(lo, hi);
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0)) throw NumericalError("find_root_bracketed: no sign change on bracket");

  auto width_ok = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  std::uintmax_t max_iter = 500;
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, width_ok, max_iter);
  const double a = bracket.first;
  const double b = bracket.second;
  // Return the endpoint with the smaller residual; both lie in [lo, hi].
  const double fa = f(a);
  const double fb = f(b);
  const double x = std::abs(fa) <= std::abs(fb) ? a : b;
  return std::clamp(x, lo, hi);
}

}  // namespace slipns::numerics
