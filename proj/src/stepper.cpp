#include "slipns/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slipns/checkpoint.hpp"
#include "slipns/legendre.hpp"

namespace slipns::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxCfl = 0.5;
constexpr double kInfluenceCondLimit = 1e12;

Eigen::MatrixXcd derivative_columns(const Eigen::MatrixXcd& data) {
  Eigen::MatrixXcd d(data.rows(), data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const Eigen::VectorXcd col = data.col(c);
    d.col(c) = numerics::chebyshev_derivative(col);
  }
  return d;
}

// Real operator applied to a complex vector, real and imaginary parts
// separately (keeps conjugate pairs exactly conjugate).
Eigen::VectorXcd apply(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd re = m * v.real();
  const Eigen::VectorXd im = m * v.imag();
  Eigen::VectorXcd out(re.size());
  for (Eigen::Index i = 0; i < re.size(); ++i) out[i] = cplx(re[i], im[i]);
  return out;
}

std::string time_string(double t) {
  std::ostringstream os;
  os.precision(10);
  os << t;
  return os.str();
}

}  // namespace

void validate(const SimConfig& cfg) {
  validate_channel(cfg.channel);
  validate_slip(cfg.slip);
  if (cfg.fourier_modes < 1) throw ValidationError("fourier_modes must be >= 1");
  if (cfg.cheb_degree < 8) throw ValidationError("cheb_degree must be >= 8");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("dt must be positive");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw ValidationError("t_end must be positive");
  if (cfg.diagnostics_stride < 1) throw ValidationError("diagnostics_stride must be >= 1");
}

FlowState make_state(const SpectralField2D& psi) {
  FlowState s;
  s.psi = psi;
  s.omega = SpectralField2D(psi.fourier_modes, psi.cheb_degree, psi.period_length);
  const Eigen::MatrixXcd d1 = derivative_columns(psi.data);
  const Eigen::MatrixXcd d2 = derivative_columns(d1);
  for (int n = -psi.fourier_modes; n <= psi.fourier_modes; ++n) {
    const double k = psi.wavenumber(n);
    const int c = n + psi.fourier_modes;
    s.omega.data.col(c) = n == 0 ? Eigen::VectorXcd(-d1.col(c)) : Eigen::VectorXcd(-(d2.col(c) - k * k * psi.data.col(c)));
  }
  s.tendency_prev = Eigen::MatrixXcd::Zero(psi.data.rows(), psi.data.cols());
  return s;
}

void RunDiagnostics::fill_growth_rate() {
  const std::size_t n = times.size();
  growth_rate.assign(n, 0.0);
  if (n < 2) return;
  auto slope = [&](std::size_t a, std::size_t b) {
    if (!(l2[a] > 0.0) || !(l2[b] > 0.0) || times[b] == times[a]) return 0.0;
    return (std::log(l2[b]) - std::log(l2[a])) / (times[b] - times[a]);
  };
  growth_rate[0] = slope(0, 1);
  growth_rate[n - 1] = slope(n - 2, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) growth_rate[i] = slope(i - 1, i + 1);
}

// Dense transforms between coefficients and the (padded) physical grid.
struct Stepper::Transforms {
  int nx = 0;
  Eigen::MatrixXcd eval_y;     // (Py+1) x (P+1): T_j at padded Lobatto nodes
  Eigen::MatrixXd analysis_y;  // (P+1) x (Py+1): truncated padded analysis
  Eigen::MatrixXcd to_x;       // (2M+1) x nx
  Eigen::MatrixXcd from_x;     // nx x (2M+1)
  double dy_min = 0.0;
  numerics::QuadratureRule rule;
  Eigen::MatrixXd eval_quad;   // Q x (P+1)
};

struct Stepper::ModeOps {
  Eigen::MatrixXd from_omega;     // n != 0: next omega; n = 0: next U
  Eigen::MatrixXd from_tendency;  // includes the factor dt
  Eigen::MatrixXd psi_from_omega;
  Eigen::MatrixXd psi_from_tendency;
};

struct Stepper::Ops {
  std::vector<ModeOps> modes;  // index |n|
};

Stepper::Stepper(SimConfig cfg) : cfg_(std::move(cfg)), grid_(cfg_.cheb_degree), tf_(std::make_unique<Transforms>()) {
  validate(cfg_);
  const int m = cfg_.fourier_modes, p = cfg_.cheb_degree;
  const int py = cfg_.dealias ? (3 * p + 1) / 2 : p;
  tf_->nx = cfg_.dealias ? 3 * m + 1 : 2 * m + 1;

  const Eigen::VectorXd pad_nodes = numerics::lobatto_nodes(py);
  std::vector<double> xs(pad_nodes.data(), pad_nodes.data() + pad_nodes.size());
  tf_->eval_y = numerics::chebyshev_evaluation(p, xs).cast<cplx>();
  const numerics::ChebyshevGrid pad(py);
  tf_->analysis_y = pad.analysis().topRows(p + 1);
  tf_->dy_min = 1.0 - std::cos(std::numbers::pi / py);

  const int nx = tf_->nx;
  tf_->to_x.resize(2 * m + 1, nx);
  tf_->from_x.resize(nx, 2 * m + 1);
  for (int n = 0; n <= m; ++n)
    for (int j = 0; j < nx; ++j) {
      const cplx e = std::polar(1.0, kTwoPi * static_cast<double>(n) * j / nx);
      tf_->to_x(m + n, j) = e;
      tf_->to_x(m - n, j) = std::conj(e);
      tf_->from_x(j, m + n) = std::conj(e) / static_cast<double>(nx);
      tf_->from_x(j, m - n) = e / static_cast<double>(nx);
    }

  tf_->rule = numerics::gauss_legendre(p + 4);
  std::vector<double> q(tf_->rule.nodes.data(), tf_->rule.nodes.data() + tf_->rule.nodes.size());
  tf_->eval_quad = numerics::chebyshev_evaluation(p, q);
}

Stepper::~Stepper() = default;

const Stepper::Ops& Stepper::ops_for(double dt) {
  auto it = cache_.find(dt);
  if (it != cache_.end()) return *it->second;
  if (cache_.size() > 16) cache_.clear();

  const int m = cfg_.fourier_modes, p = cfg_.cheb_degree;
  const double mu = cfg_.channel.viscosity;
  const double xp = cfg_.slip.xi_plus, xm = cfg_.slip.xi_minus;
  const Eigen::MatrixXd& d1 = grid_.d1();
  const Eigen::MatrixXd& d2 = grid_.d2();
  const Eigen::MatrixXd& syn = grid_.synthesis();
  const Eigen::MatrixXd& ana = grid_.analysis();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p + 1, p + 1);
  Eigen::MatrixXd z = id;
  z(0, 0) = 0.0;
  z(p, p) = 0.0;

  auto ops = std::make_unique<Ops>();
  ops->modes.resize(static_cast<std::size_t>(m + 1));

  {
    // Mean flow: CN diffusion with Robin rows mu U'(1) = xi_+ U(1), mu U'(-1) = -xi_- U(-1).
    Eigen::MatrixXd h = id - 0.5 * dt * mu * d2;
    h.row(0) = mu * d1.row(0);
    h(0, 0) -= xp;
    h.row(p) = mu * d1.row(p);
    h(p, p) += xm;
    const Eigen::MatrixXd hinv_z = h.partialPivLu().solve(z);
    const Eigen::MatrixXd expl = id + 0.5 * dt * mu * d2;
    auto& mo = ops->modes[0];
    mo.from_omega = ana * hinv_z * expl * syn;
    mo.from_tendency = dt * ana * hinv_z * syn;
  }

  Eigen::MatrixXd rows(2, p + 1);
  rows.row(0) = mu * d2.row(0) - xp * d1.row(0);
  rows.row(1) = mu * d2.row(p) + xm * d1.row(p);
  for (int n = 1; n <= m; ++n) {
    const double k = n / cfg_.channel.period_length;
    const Eigen::MatrixXd lap = d2 - k * k * id;
    Eigen::MatrixXd hw = id - 0.5 * dt * mu * lap;
    hw.row(0).setZero();
    hw(0, 0) = 1.0;
    hw.row(p).setZero();
    hw(p, p) = 1.0;
    Eigen::MatrixXd hp = lap;
    hp.row(0).setZero();
    hp(0, 0) = 1.0;
    hp.row(p).setZero();
    hp(p, p) = 1.0;
    const auto lu_w = hw.partialPivLu();
    const auto lu_p = hp.partialPivLu();

    // Particular part (zero wall vorticity) and the two homogeneous responses.
    const Eigen::MatrixXd s = lu_w.solve(z);
    const Eigen::MatrixXd t = -lu_p.solve(z * s);
    Eigen::MatrixXd w_h(p + 1, 2);
    w_h.col(0) = lu_w.solve(id.col(0));
    w_h.col(1) = lu_w.solve(id.col(p));
    const Eigen::MatrixXd p_h = -lu_p.solve(z * w_h);

    const Eigen::Matrix2d g = rows * p_h;
    const Eigen::JacobiSVD<Eigen::Matrix2d> svd(g);
    const double smax = svd.singularValues()[0], smin = svd.singularValues()[1];
    if (!(smin > 0.0) || smax / smin > kInfluenceCondLimit)
      throw NumericalError("influence matrix is ill-conditioned for mode n=" + std::to_string(n));
    const Eigen::MatrixXd corr = g.inverse() * (rows * t);
    const Eigen::MatrixXd mw = s - w_h * corr;
    const Eigen::MatrixXd mp = t - p_h * corr;
    const Eigen::MatrixXd expl = id + 0.5 * dt * mu * lap;

    auto& mo = ops->modes[static_cast<std::size_t>(n)];
    mo.from_omega = ana * mw * expl * syn;
    mo.from_tendency = dt * ana * mw * syn;
    mo.psi_from_omega = ana * mp * expl * syn;
    mo.psi_from_tendency = dt * ana * mp * syn;
  }
  const Ops& ref = *ops;
  cache_.emplace(dt, std::move(ops));
  return ref;
}

Eigen::MatrixXcd Stepper::tendency(const FlowState& s) const {
  const int m = cfg_.fourier_modes;
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(s.psi.data.rows(), s.psi.data.cols());
  if (cfg_.linearized) return x;

  Eigen::MatrixXcd u1 = derivative_columns(s.psi.data);
  u1.col(m) = s.psi.col(0);
  Eigen::MatrixXcd u2(s.psi.data.rows(), s.psi.data.cols());
  Eigen::MatrixXcd wx(s.psi.data.rows(), s.psi.data.cols());
  for (int n = -m; n <= m; ++n) {
    const double k = s.psi.wavenumber(n);
    u2.col(n + m) = n == 0 ? Eigen::VectorXcd::Zero(s.psi.data.rows()) : Eigen::VectorXcd(cplx(0.0, -k) * s.psi.col(n));
    wx.col(n + m) = cplx(0.0, k) * s.omega.col(n);
  }
  const Eigen::MatrixXcd wy = derivative_columns(s.omega.data);

  auto physical = [&](const Eigen::MatrixXcd& c) -> Eigen::MatrixXd { return (tf_->eval_y * c * tf_->to_x).real(); };
  const Eigen::MatrixXd pu1 = physical(u1), pu2 = physical(u2);
  const Eigen::MatrixXd adv = pu1.cwiseProduct(physical(wx)) + pu2.cwiseProduct(physical(wy));

  const Eigen::MatrixXcd adv_x = adv.cast<cplx>() * tf_->from_x;
  const Eigen::MatrixXcd adv_c = tf_->analysis_y.cast<cplx>() * adv_x;
  x = -adv_c;

  // Mean forcing -d2 <u1 u2>, with the x1 average taken on the padded grid.
  const Eigen::VectorXd flux = pu1.cwiseProduct(pu2).rowwise().mean();
  const Eigen::VectorXd flux_c = tf_->analysis_y * flux;
  const Eigen::VectorXd dflux = numerics::chebyshev_derivative(flux_c);
  x.col(m) = (-dflux).cast<cplx>();
  return x;
}

double Stepper::cfl(const FlowState& s, double dt) const {
  const int m = cfg_.fourier_modes;
  Eigen::MatrixXcd u1 = derivative_columns(s.psi.data);
  u1.col(m) = s.psi.col(0);
  Eigen::MatrixXcd u2 = Eigen::MatrixXcd::Zero(s.psi.data.rows(), s.psi.data.cols());
  for (int n = -m; n <= m; ++n)
    if (n != 0) u2.col(n + m) = cplx(0.0, -s.psi.wavenumber(n)) * s.psi.col(n);
  const Eigen::MatrixXd pu1 = (tf_->eval_y * u1 * tf_->to_x).real();
  const Eigen::MatrixXd pu2 = (tf_->eval_y * u2 * tf_->to_x).real();
  const double dx = kTwoPi * cfg_.channel.period_length / tf_->nx;
  return dt * (pu1.cwiseAbs() / dx + pu2.cwiseAbs() / tf_->dy_min).maxCoeff();
}

double Stepper::boundary_defect(const FlowState& s) const {
  const VelocityField v = velocity(s);
  const double mu = cfg_.channel.viscosity;
  double worst = 0.0;
  for (int n = -v.u1.fourier_modes; n <= v.u1.fourier_modes; ++n) {
    const Eigen::VectorXcd a = v.u1.col(n);
    const Eigen::VectorXcd da = numerics::chebyshev_derivative(a);
    const Eigen::VectorXcd b = v.u2.col(n);
    cplx a_top = 0, a_bot = 0, da_top = 0, da_bot = 0, b_top = 0, b_bot = 0;
    double sign = 1.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      a_top += a[j];
      da_top += da[j];
      b_top += b[j];
      a_bot += sign * a[j];
      da_bot += sign * da[j];
      b_bot += sign * b[j];
      sign = -sign;
    }
    worst = std::max({worst, std::abs(b_top), std::abs(b_bot), std::abs(mu * da_top - cfg_.slip.xi_plus * a_top),
                      std::abs(mu * da_bot + cfg_.slip.xi_minus * a_bot)});
  }
  return worst;
}

void Stepper::step(FlowState& s, double dt, StepReport* report) {
  if (!(dt > 0.0)) throw ValidationError("step size must be positive");
  if (!s.psi.same_shape(SpectralField2D(cfg_.fourier_modes, cfg_.cheb_degree, cfg_.channel.period_length)))
    throw ValidationError("state shape does not match the simulator configuration");
  const Ops& ops = ops_for(dt);
  const int m = cfg_.fourier_modes;

  const Eigen::MatrixXcd x = tendency(s);
  Eigen::MatrixXcd xs = x;
  if (s.has_prev) {
    const double r = dt / s.dt_prev;
    xs = (1.0 + 0.5 * r) * x - (0.5 * r) * s.tendency_prev;
  }

  const SpectralField2D psi_old = s.psi;
  for (int n = -m; n <= m; ++n) {
    const auto& mo = ops.modes[static_cast<std::size_t>(std::abs(n))];
    const Eigen::VectorXcd xn = xs.col(n + m);
    if (n == 0) {
      const Eigen::VectorXcd u = s.psi.col(0);
      const Eigen::VectorXcd u_next = apply(mo.from_omega, u) + apply(mo.from_tendency, xn);
      s.psi.col(0) = u_next;
      s.omega.col(0) = -numerics::chebyshev_derivative(u_next);
    } else {
      const Eigen::VectorXcd w = s.omega.col(n);
      s.omega.col(n) = apply(mo.from_omega, w) + apply(mo.from_tendency, xn);
      s.psi.col(n) = apply(mo.psi_from_omega, w) + apply(mo.psi_from_tendency, xn);
    }
  }
  s.tendency_prev = x;
  s.has_prev = true;
  s.dt_prev = dt;
  ++s.step;
  s.t += dt;

  if (!s.psi.data.allFinite() || !s.omega.data.allFinite() || s.psi.data.cwiseAbs().maxCoeff() > 1e100)
    throw BlowUpError("blow-up detected at t=" + time_string(s.t));

  if (report) {
    const double mu = cfg_.channel.viscosity;
    report->dt = dt;
    const double e0 = l2_norm(velocity_from_streamfunction(psi_old));
    const double e1 = l2_norm(velocity(s));
    report->energy_before = 0.5 * e0 * e0;
    report->energy_after = 0.5 * e1 * e1;
    SpectralField2D mid = s.psi;
    mid.data = 0.5 * (psi_old.data + s.psi.data);
    const VelocityField vm = velocity_from_streamfunction(mid);
    report->production_mid = boundary_production(vm, cfg_.slip);
    report->dissipation_mid = mu * gradient_energy(vm);
    // Work of the explicit term: 2 pi L sum_n Re int conj(psi_n) X_n (psi_0 = U).
    const Eigen::MatrixXcd pq = tf_->eval_quad.cast<cplx>() * mid.data;
    const Eigen::MatrixXcd xq = tf_->eval_quad.cast<cplx>() * xs;
    double work = 0.0;
    for (Eigen::Index c = 0; c < pq.cols(); ++c)
      for (Eigen::Index q = 0; q < pq.rows(); ++q)
        work += tf_->rule.weights[q] * (std::conj(pq(q, c)) * xq(q, c)).real();
    report->nonlinear_flux = -kTwoPi * cfg_.channel.period_length * work;
  }
}

Schedule make_schedule(double t0, double t_end, double dt, const std::vector<double>& stops) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  std::vector<double> targets;
  for (double t : stops)
    if (t > t0 && t < t_end) targets.push_back(t);
  targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());

  Schedule plan;
  double t = t0;
  for (double target : targets) {
    while (true) {
      const double rem = target - t;
      // Round-off remainders are absorbed instead of taking a sliver step.
      if (rem <= 1e-9 * dt) {
        if (!plan.times.empty() && rem > 0.0) plan.times.back() = target;
        t = std::max(t, target);
        break;
      }
      const bool land = rem <= dt * (1.0 + 1e-9);
      const double h = land ? rem : dt;
      t = land ? target : t + h;
      plan.sizes.push_back(h);
      plan.times.push_back(t);
      if (land) break;
    }
  }
  return plan;
}

void Stepper::record(RunDiagnostics& d, const FlowState& s, const StepReport* rep) const {
  const VelocityField v = velocity(s);
  const Norms nm = norms(v);
  d.times.push_back(s.t);
  d.l2.push_back(nm.l2);
  d.h1.push_back(nm.h1);
  d.h2.push_back(nm.h2);
  d.boundary_production.push_back(boundary_production(v, cfg_.slip));
  d.dissipation.push_back(cfg_.channel.viscosity * gradient_energy(v));
  d.energy_residual.push_back(rep ? rep->residual() : 0.0);
  d.nonlinear_flux.push_back(rep ? rep->nonlinear_flux : 0.0);
  d.boundary_defect.push_back(boundary_defect(s));
}

RunResult Stepper::run(FlowState s, const RunOptions& opts) {
  RunResult result;
  if (opts.check_cfl) {
    const double c = cfl(s, cfg_.dt);
    result.cfl = c;
    if (c > kMaxCfl)
      throw ValidationError("dt exceeds the advective stability bound (CFL " + time_string(c) + " > 0.5)");
  }
  RunDiagnostics& d = result.diagnostics;
  const Schedule plan = make_schedule(s.t, cfg_.t_end, cfg_.dt, opts.stop_times);
  if (s.step == 0) record(d, s, nullptr);
  if (opts.observer) opts.observer(s);

  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    const bool rec = i + 1 == plan.sizes.size() || (s.step + 1) % cfg_.diagnostics_stride == 0;
    StepReport rep;
    step(s, plan.sizes[i], rec ? &rep : nullptr);
    s.t = plan.times[i];
    if (rec) record(d, s, &rep);
    if (opts.observer) opts.observer(s);
    if (opts.checkpoint_every > 0 && !opts.checkpoint_path.empty() && s.step % opts.checkpoint_every == 0)
      save_checkpoint(opts.checkpoint_path, s, cfg_);
  }
  if (d.times.empty() || d.times.back() < s.t) record(d, s, nullptr);
  d.fill_growth_rate();
  result.final_state = std::move(s);
  return result;
}

}  // namespace slipns::sim
