#include "slipns/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "slipns/basis.hpp"
#include "slipns/critical.hpp"
#include "slipns/eigensolver.hpp"
#include "slipns/energy.hpp"
#include "slipns/linalg.hpp"
#include "slipns/modes.hpp"
#include "slipns/roots.hpp"
#include "slipns/stepper.hpp"

namespace slipns::verify {

namespace {

const std::vector<double> kGridK{0.5, 1.0, 2.0, 4.0, 8.0};
const std::vector<double> kGridXi{0.0, 0.5, 1.0, 3.0};

std::vector<SlipPair> slip_grid() {
  std::vector<SlipPair> out;
  for (double a : kGridXi)
    for (double b : kGridXi)
      if (a > 0.0 || b > 0.0) out.push_back({a, b});
  return out;
}

PropertyResult at_most(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured <= threshold, measured, threshold, std::move(detail)};
}

std::string describe(double k, const SlipPair& s) {
  std::ostringstream os;
  os.precision(17);
  os << "k=" << k << " slip=" << to_string(s);
  return os.str();
}

struct Suite {
  const VerifyOptions& opts;
  MuCFunction mu_c;
  std::mt19937_64 rng;
  std::vector<PropertyResult> out;

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

  void critical_suite() {
    // Strict decrease in k.
    int violations = 0;
    std::string first;
    for (int i = 0; i < 300; ++i) {
      const SlipPair s{uniform(0.0, 3.0), uniform(0.0, 3.0)};
      const double k1 = std::exp(uniform(-3.0, 3.0));
      const double k2 = k1 * std::exp(uniform(0.01, 1.0));
      if (!(mu_c(k1, s) > mu_c(k2, s))) {
        if (violations++ == 0) first = describe(k1, s);
      }
    }
    out.push_back(at_most("critical.monotone_in_k", violations, 0, first));

    // Exact swap symmetry.
    violations = 0;
    for (int i = 0; i < 100; ++i) {
      const double k = std::exp(uniform(-3.0, 3.0));
      const double a = uniform(0.0, 3.0), b = uniform(0.0, 3.0);
      if (mu_c(k, {a, b}) != mu_c(k, {b, a})) ++violations;
    }
    out.push_back(at_most("critical.swap_symmetry", violations, 0));

    // Variational maximum against the formula.
    const auto basis = numerics::build_basis(64);
    double worst = 0.0;
    std::string where;
    for (double k : kGridK)
      for (const auto& s : slip_grid()) {
        const double ref = mu_c(k, s);
        const double var = critical::mu_c_variational(k, s, basis);
        const double rel = std::abs(var - ref) / std::abs(ref);
        if (!(rel <= worst)) {
          worst = rel;
          where = describe(k, s);
        }
      }
    out.push_back(at_most("critical.variational_agreement", worst, 1e-6, where));

    double lim = 0.0, decay = 0.0, equal = 0.0;
    for (const auto& s : slip_grid()) {
      const double g = critical::mu_c_global(s);
      lim = std::max(lim, std::abs(mu_c(1e-4, s) - g));
      decay = std::max(decay, mu_c(50.0, s) / g);
    }
    for (double xi : {0.1, 0.5, 1.0, 3.0, 10.0})
      equal = std::max(equal, std::abs(critical::mu_c_global({xi, xi}) - xi) / xi);
    out.push_back(at_most("critical.small_k_limit", lim, 1e-3));
    out.push_back(at_most("critical.large_k_decay_ratio", decay, 0.02));
    out.push_back(at_most("critical.global_equal_slip", equal, 1e-12));
  }

  void numerics_suite() {
    double worst = 0.0;
    for (int n : {4, 8, 16, 32}) {
      const auto basis = numerics::build_basis(n);
      const int degree = 2 * n + 6;
      Eigen::VectorXd c(degree + 1);
      for (int j = 0; j <= degree; ++j) c[j] = uniform(-1.0, 1.0);
      const numerics::LegendreSeries poly(c);
      const auto& rule = basis.quadrature();
      Eigen::VectorXd vals(rule.nodes.size());
      for (Eigen::Index q = 0; q < vals.size(); ++q) vals[q] = poly(rule.nodes[q]);
      worst = std::max(worst, std::abs(rule.integrate(vals) - 2.0 * c[0]) / c.cwiseAbs().sum());
    }
    out.push_back(at_most("numerics.quadrature_exactness", worst, 1e-13));

    worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 6;
      Eigen::MatrixXd r(n, n), q(n, n), c(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          r(i, j) = uniform(-1, 1);
          q(i, j) = uniform(-1, 1);
          c(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * uniform(-1, 1);
        }
      const Eigen::MatrixXd b = r + r.transpose();
      const Eigen::MatrixXd a = q * q.transpose() + n * Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd b2 = c.transpose() * b * c, a2 = c.transpose() * a * c;
      const auto e1 = numerics::solve_generalized_symmetric(b, a);
      const auto e2 = numerics::solve_generalized_symmetric(0.5 * (b2 + b2.transpose()), 0.5 * (a2 + a2.transpose()));
      const double scale = e1.eigenvalues.cwiseAbs().maxCoeff();
      worst = std::max(worst, (e1.eigenvalues - e2.eigenvalues).cwiseAbs().maxCoeff() / scale);
    }
    out.push_back(at_most("numerics.congruence_invariance", worst, 1e-10));

    int outside = 0;
    double err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double root = uniform(-5, 5);
      const double lo = root - uniform(0.1, 3), hi = root + uniform(0.1, 3);
      const double x = numerics::find_root_bracketed([&](double t) { return (t - root) * (1 + t * t); }, lo, hi, 1e-12);
      if (x < lo || x > hi) ++outside;
      err = std::max(err, std::abs(x - root));
    }
    out.push_back(at_most("numerics.root_inside_bracket", outside, 0));
    out.push_back(at_most("numerics.root_accuracy", err, 1e-11));
  }

  void eigen_suite() {
    const auto basis64 = numerics::build_basis(64);
    const auto basis32 = numerics::build_basis(32);
    double mismatch = 0.0, var = 0.0, mesh = 0.0, strong = 0.0, bc = 0.0, norm = 0.0, orth = 0.0;
    int count_diff = 0, flip_fail = 0;
    std::string where;
    for (double k : {1.0, 2.0})
      for (const SlipPair& s : {SlipPair{1, 1}, SlipPair{0.5, 3}, SlipPair{0, 1}}) {
        const double muc = critical::mu_c_closed_form(k, s);
        for (double f : {0.5, 0.9, 1.1}) {
          const ModeProblem p{k, f * muc, s};
          const auto pencil = eigen::assemble(p, basis64);
          const auto sp = eigen::solve_spectrum(pencil);
          const auto roots = eigen::determinant_roots(p, eigen::default_lambda_max(p), 4096).roots;
          const auto pos = sp.positive_lambdas();
          if (pos.size() != roots.size()) {
            ++count_diff;
            where = describe(k, s);
          }
          for (std::size_t i = 0; i < std::min(pos.size(), roots.size()); ++i)
            mismatch = std::max(mismatch, std::abs(pos[i] - roots[i]) / roots[i]);
          if ((f < 1.0) != (sp.lambda1() > 0.0)) ++flip_fail;
          var = std::max(var, std::abs(eigen::lambda1_variational(p, basis64, opts.seed) - sp.lambda1()) /
                                  std::max(std::abs(sp.lambda1()), 1e-300));
          const auto pos32 = eigen::solve_spectrum(p, basis32).positive_lambdas();
          if (pos32.size() != pos.size()) ++count_diff;
          for (std::size_t i = 0; i < std::min(pos.size(), pos32.size()); ++i)
            mesh = std::max(mesh, std::abs(pos[i] - pos32[i]) / pos[i]);
          const int resolved = eigen::resolved_count(64);
          for (int i = 0; i < resolved; ++i) {
            const auto r = eigen::mode_residuals(sp, i);
            strong = std::max(strong, r.strong_l2);
            bc = std::max({bc, r.bc_upper, r.bc_lower});
            norm = std::max(norm, r.normalization);
          }
          orth = std::max(orth, eigen::orthogonality_defect(sp, pencil, resolved));
        }
      }
    out.push_back(at_most("eigen.oracle_count_mismatches", count_diff, 0, where));
    out.push_back(at_most("eigen.oracle_relative_mismatch", mismatch, 1e-8));
    out.push_back(at_most("eigen.sign_flip_failures", flip_fail, 0));
    out.push_back(at_most("eigen.variational_relative_mismatch", var, 1e-8));
    out.push_back(at_most("eigen.mesh_convergence", mesh, 1e-9));
    out.push_back(at_most("eigen.strong_residual", strong, 1e-6));
    out.push_back(at_most("eigen.boundary_residual", bc, 1e-8));
    out.push_back(at_most("eigen.normalization", norm, 1e-10));
    out.push_back(at_most("eigen.a_orthogonality", orth, 1e-8));
  }

  void modes_suite() {
    int violations = 0;
    double residual = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + static_cast<int>(uniform(0, 3));
      std::vector<modes::NormalMode> ms;
      std::vector<double> cs;
      for (int j = 0; j < n; ++j) {
        modes::NormalMode m;
        m.problem = {1.0, 0.5, {1, 1}};
        m.lambda = 0.1 + j + uniform(0, 0.9);
        ms.push_back(m);
        cs.push_back(uniform(0.2, 2.0));
      }
      const auto packet = modes::make_packet(ms, cs);
      const double delta = std::exp(uniform(std::log(1e-8), std::log(1e-4)));
      const double eps = 1e-2;
      const double t = modes::escape_time({packet, delta, eps});
      residual = std::max(residual, std::abs(delta * modes::growth_envelope(packet, t) - eps) / eps);
      if (!(modes::escape_time({packet, delta, 2 * eps}) > t)) ++violations;
      if (!(modes::escape_time({packet, 0.5 * delta, eps}) > t)) ++violations;
      auto bigger = packet;
      bigger.coefficients[0] *= 2.0;
      if (!(modes::escape_time({bigger, delta, eps}) < t)) ++violations;
    }
    out.push_back(at_most("modes.escape_time_monotonicity", violations, 0));
    out.push_back(at_most("modes.escape_time_residual", residual, 1e-10));
  }

  void sim_suite() {
    const ChannelConfig channel{1.0, 0.5};
    const SlipPair slip{1, 1};
    const auto cap = modes::compute_capital_lambda({channel, slip, 4}, channel.viscosity, 48);
    int fails = 0;
    double worst = -1e300;
    for (int trial = 0; trial < 20; ++trial) {
      auto psi = sim::random_streamfunction(4, 24, 1.0, 4, rng);
      const auto w = sim::velocity_from_streamfunction(psi);
      const auto c = sim::energy_inequality_check(w, cap.value, channel.viscosity, slip);
      if (!c.holds) ++fails;
      worst = std::max(worst, (c.lhs - c.rhs) / c.norm2);
    }
    out.push_back(at_most("sim.energy_inequality_failures", fails, 0));
    out.push_back(at_most("sim.energy_inequality_margin", worst, 1e-8));

    sim::SimConfig cfg;
    cfg.channel = channel;
    cfg.slip = slip;
    cfg.fourier_modes = 4;
    cfg.cheb_degree = 24;
    cfg.dt = 0.01;
    cfg.t_end = 0.2;
    cfg.diagnostics_stride = 1;
    cfg.cheb_degree = 32;
    // Random combination of normal modes: smooth and compatible with the walls.
    const auto basis = numerics::build_basis(32);
    sim::SpectralField2D psi(4, 32, 1.0);
    for (int n = 1; n <= 3; ++n) {
      const auto sp = eigen::solve_spectrum(ModeProblem::on_lattice(channel, n, slip), basis);
      std::vector<modes::NormalMode> ms;
      std::vector<double> cs;
      for (int j = 0; j < 3; ++j) {
        ms.push_back(modes::build_mode(sp, j));
        cs.push_back(uniform(-1.0, 1.0));
      }
      psi.data += sim::streamfunction_from_packet(modes::make_packet(ms, cs), 1e-2, 4, 32, 1.0).data;
    }
    sim::Stepper stepper(cfg);
    auto state = sim::make_state(psi);
    const auto res = stepper.run(state);
    double bc = 0.0, energy = 0.0;
    for (std::size_t i = 1; i < res.diagnostics.size(); ++i) {
      bc = std::max(bc, res.diagnostics.boundary_defect[i]);
      energy = std::max(energy, res.diagnostics.energy_residual[i] / std::pow(res.diagnostics.l2[i], 2));
    }
    out.push_back(at_most("sim.reality_defect", res.final_state.psi.reality_defect(), 1e-14));
    out.push_back(at_most("sim.boundary_defect", bc, 1e-8));
    out.push_back(at_most("sim.energy_identity_residual", energy, 1e-6));
  }
};

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : properties)
    props.push_back({{"name", p.name}, {"passed", p.passed}, {"measured", p.measured}, {"threshold", p.threshold},
                     {"margin", p.threshold - p.measured}, {"detail", p.detail}});
  return {{"seed", seed}, {"all_passed", all_passed()}, {"properties", props}};
}

VerifyReport run_verify(const VerifyOptions& opts) {
  Suite suite{opts, opts.mu_c ? opts.mu_c : MuCFunction(critical::mu_c_closed_form), std::mt19937_64(opts.seed), {}};
  suite.critical_suite();
  suite.numerics_suite();
  suite.eigen_suite();
  suite.modes_suite();
  suite.sim_suite();
  VerifyReport r;
  r.seed = opts.seed;
  r.properties = std::move(suite.out);
  return r;
}

}  // namespace slipns::verify
