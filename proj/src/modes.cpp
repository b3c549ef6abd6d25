#include "slipns/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "slipns/basis.hpp"
#include "slipns/chebyshev.hpp"
#include "slipns/roots.hpp"

namespace slipns::modes {

NormalMode build_mode(const ModeProblem& problem, double lambda, const numerics::LegendreSeries& phi) {
  if (!(problem.wavenumber > 0.0)) throw ValidationError("wavenumber must be positive");
  validate_problem(problem);
  const double k = problem.wavenumber;
  const double mu = problem.viscosity;
  NormalMode m;
  m.problem = problem;
  m.lambda = lambda;
  m.phi = phi;
  m.psi = phi.derivative() * (-1.0 / k);
  m.pi = (m.psi * (lambda + mu * k * k) - m.psi.derivative(2) * mu) * (1.0 / k);
  return m;
}

NormalMode build_mode(const eigen::Spectrum& spectrum, int index) {
  if (index < 0 || index >= static_cast<int>(spectrum.pairs.size())) throw ValidationError("mode index out of range");
  const auto& pr = spectrum.pairs[static_cast<std::size_t>(index)];
  return build_mode(spectrum.problem, pr.lambda, spectrum.basis->series(pr.phi));
}

std::vector<double> grid_x1(const GridSpec& grid) {
  std::vector<double> x(static_cast<std::size_t>(grid.nx1));
  const double span = 2.0 * std::numbers::pi * grid.period_length;
  for (int i = 0; i < grid.nx1; ++i) x[static_cast<std::size_t>(i)] = span * i / grid.nx1;
  return x;
}

std::vector<double> grid_x2(const GridSpec& grid) {
  std::vector<double> x(static_cast<std::size_t>(grid.nx2));
  if (grid.chebyshev_x2) {
    // Increasing order, -1 first.
    const Eigen::VectorXd nodes = numerics::lobatto_nodes(grid.nx2 - 1);
    for (int i = 0; i < grid.nx2; ++i) x[static_cast<std::size_t>(i)] = nodes[grid.nx2 - 1 - i];
  } else {
    for (int i = 0; i < grid.nx2; ++i) x[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (grid.nx2 - 1);
  }
  return x;
}

FieldSamples sample_field(const NormalMode& mode, double t, const GridSpec& grid) {
  if (grid.nx1 < 4 || grid.nx2 < 4) throw ValidationError("grid resolution must be at least 4 in each direction");
  if (!(grid.period_length > 0.0)) throw ValidationError("period length must be positive");
  FieldSamples s;
  s.x1 = grid_x1(grid);
  s.x2 = grid_x2(grid);
  const double amp = std::exp(mode.lambda * t);
  const double k = mode.problem.wavenumber;
  s.u1.resize(grid.nx2, grid.nx1);
  s.u2.resize(grid.nx2, grid.nx1);
  s.q.resize(grid.nx2, grid.nx1);
  for (int j = 0; j < grid.nx2; ++j) {
    const double y = s.x2[static_cast<std::size_t>(j)];
    const double psi = amp * mode.psi(y), phi = amp * mode.phi(y), pi = amp * mode.pi(y);
    for (int i = 0; i < grid.nx1; ++i) {
      const double x = s.x1[static_cast<std::size_t>(i)];
      const double sn = std::sin(k * x), cs = std::cos(k * x);
      s.u1(j, i) = sn * psi;
      s.u2(j, i) = cs * phi;
      s.q(j, i) = cs * pi;
    }
  }
  return s;
}

std::vector<double> ModePacket::lambdas() const {
  std::vector<double> out;
  for (const auto& m : modes) out.push_back(m.lambda);
  return out;
}

ModePacket make_packet(std::vector<NormalMode> modes, std::vector<double> coefficients) {
  if (modes.size() != coefficients.size()) throw ValidationError("packet needs one coefficient per mode");
  for (std::size_t i = 1; i < modes.size(); ++i)
    if (!(modes[i].problem == modes[0].problem)) throw ValidationError("packet modes must share one problem");

  std::vector<std::size_t> order(modes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return modes[a].lambda < modes[b].lambda; });
  ModePacket p;
  for (auto i : order) {
    if (!p.modes.empty()) {
      const double prev = p.modes.back().lambda;
      if (std::abs(modes[i].lambda - prev) <= 1e-12 * std::max(1.0, std::abs(prev)))
        throw NumericalError("packet has a repeated eigenvalue; strict ordering impossible");
    }
    p.modes.push_back(modes[i]);
    p.coefficients.push_back(coefficients[i]);
  }
  return p;
}

ModePacket make_packet(const eigen::Spectrum& spectrum, int max_modes) {
  if (max_modes < 1) throw ValidationError("packet needs at least one mode");
  const int n = std::min(spectrum.positive_count, max_modes);
  std::vector<NormalMode> modes;
  for (int i = 0; i < n; ++i) modes.push_back(build_mode(spectrum, i));
  return make_packet(std::move(modes), std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

ModePacket reduced_packet(const ModePacket& packet) {
  ModePacket r = packet;
  if (!r.modes.empty()) {
    r.modes.pop_back();
    r.coefficients.pop_back();
  }
  return r;
}

double growth_envelope(const ModePacket& packet, double t) {
  double f = 0.0;
  for (int j = 0; j < packet.count(); ++j)
    f += std::abs(packet.coefficients[static_cast<std::size_t>(j)]) * std::exp(packet.modes[static_cast<std::size_t>(j)].lambda * t);
  return f;
}

double escape_time(const GrowthEnvelope& env) {
  const auto& p = env.packet;
  if (p.count() == 0) throw ValidationError("escape time of an empty packet");
  if (!(env.delta > 0.0) || !(env.epsilon0 > 0.0)) throw ValidationError("delta and epsilon0 must be positive");
  double lam_min = std::numeric_limits<double>::infinity();
  double c_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < p.count(); ++j) {
    const double lam = p.modes[static_cast<std::size_t>(j)].lambda;
    const double c = std::abs(p.coefficients[static_cast<std::size_t>(j)]);
    if (!(lam > 0.0)) throw ValidationError("escape time needs every packet eigenvalue positive");
    if (!(c > 0.0)) throw ValidationError("escape time needs nonzero packet coefficients");
    lam_min = std::min(lam_min, lam);
    c_min = std::min(c_min, c);
  }
  if (env.delta * growth_envelope(p, 0.0) >= env.epsilon0)
    throw ValidationError("delta * F_N(0) >= epsilon0: already escaped at t = 0");

  const double hi = std::log(env.epsilon0 / (env.delta * c_min)) / lam_min + 1.0;
  // Logarithmic form keeps the function well scaled over the bracket.
  auto f = [&](double t) { return std::log(env.delta * growth_envelope(p, t) / env.epsilon0); };
  return numerics::find_root_bracketed(f, 0.0, hi, 1e-14 * hi);
}

CapitalLambda compute_capital_lambda(const LatticeSweep& sweep, double mu, int basis_size) {
  validate_channel(sweep.config);
  validate_slip(sweep.slip);
  if (!(mu > 0.0)) throw ValidationError("viscosity must be positive");
  if (sweep.max_index < 1) throw ValidationError("sweep needs max_index >= 1");
  const auto basis = numerics::build_basis(basis_size);

  CapitalLambda out;
  out.value = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= sweep.max_index; ++n) {
    const ModeProblem problem{sweep.wavenumber(n), mu, sweep.slip};
    const double lam = eigen::solve_spectrum(problem, basis).lambda1();
    if (!out.lambda1.empty() && lam >= out.lambda1.back()) {
      std::ostringstream os;
      os.precision(17);
      os << "lambda_1 not decreasing between n=" << n - 1 << " (" << out.lambda1.back() << ") and n=" << n << " ("
         << lam << ")";
      out.warnings.push_back(os.str());
    }
    out.lambda1.push_back(lam);
    if (lam > out.value) {
      out.value = lam;
      out.argmax_index = n;
      out.argmax_k = problem.wavenumber;
    }
  }
  if (out.lambda1.back() > 0.0)
    throw NumericalError("lambda_1 is still positive at the end of the sweep; increase max_index");
  return out;
}

nlohmann::json packet_manifest(const ModePacket& packet, double epsilon0, double delta, double t_delta) {
  nlohmann::json j;
  if (packet.count() > 0) {
    const auto& pr = packet.modes.front().problem;
    j["k"] = pr.wavenumber;
    j["mu"] = pr.viscosity;
    j["slip"] = {{"xi_minus", pr.slip.xi_minus}, {"xi_plus", pr.slip.xi_plus}};
  }
  j["lambdas"] = packet.lambdas();
  j["coefficients"] = packet.coefficients;
  j["epsilon0"] = epsilon0;
  j["delta"] = delta;
  j["T_delta"] = t_delta;
  return j;
}

}  // namespace slipns::modes
