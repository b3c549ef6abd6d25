#include "slipns/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

#include "slipns/basis.hpp"
#include "slipns/critical.hpp"
#include "slipns/csv.hpp"
#include "slipns/eigensolver.hpp"

namespace slipns::sim {

namespace {

double difference_l2(const FlowState& a, const FlowState& b) {
  SpectralField2D d = a.psi;
  d.data -= b.psi.data;
  return l2_norm(velocity_from_streamfunction(d));
}

}  // namespace

std::string delta_label(double delta) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << delta;
  return os.str();
}

PreparedExperiment prepare_experiment(const ExperimentSetup& setup) {
  validate(setup.sim);
  const auto& cfg = setup.sim;
  const double mu = cfg.channel.viscosity;
  if (mu >= critical::mu_c_global(cfg.slip)) throw StableRegimeError("stable regime: mu >= mu_c(slip), nothing to separate");
  const auto kc = critical::critical_index(cfg.channel, cfg.slip);
  if (!kc) throw StableRegimeError("stable regime: no unstable lattice wavenumber for this period length");

  PreparedExperiment p;
  p.setup = setup;
  const LatticeSweep sweep{cfg.channel, cfg.slip, *kc + 1};
  const auto cap = modes::compute_capital_lambda(sweep, mu, setup.basis_size);
  p.capital_lambda = cap.value;
  for (const auto& w : cap.warnings) p.notes.push_back(w);

  p.lattice_index = setup.lattice_index > 0 ? setup.lattice_index : cap.argmax_index;
  if (p.lattice_index > cfg.fourier_modes) throw ValidationError("packet wavenumber exceeds the Fourier truncation");
  const auto basis = numerics::build_basis(setup.basis_size);
  const ModeProblem problem = ModeProblem::on_lattice(cfg.channel, p.lattice_index, cfg.slip);
  p.wavenumber = problem.wavenumber;
  const auto spectrum = eigen::solve_spectrum(problem, basis);
  if (!(spectrum.lambda1() > 0.5 * p.capital_lambda))
    throw ValidationError("packet wavenumber must satisfy lambda_1(k) > Lambda / 2");

  p.full = modes::make_packet(spectrum, setup.max_modes);
  p.reduced = modes::reduced_packet(p.full);
  if (p.full.count() < setup.max_modes)
    p.notes.push_back("packet holds all " + std::to_string(p.full.count()) + " positive modes at this wavenumber");
  if (p.reduced.count() == 0) p.notes.push_back("reduced packet is empty: the second solution is the zero state");

  const SpectralField2D unit =
      streamfunction_from_packet(p.full, 1.0, cfg.fourier_modes, cfg.cheb_degree, cfg.channel.period_length);
  const Norms nm = norms(velocity_from_streamfunction(unit));
  p.unit_l2 = nm.l2;
  p.c1 = nm.h2;
  p.epsilon0 = setup.epsilon0.value_or(1e-2 * p.unit_l2);
  p.delta0 = setup.delta0.value_or(p.epsilon0);
  if (!(p.epsilon0 > 0.0) || !(p.delta0 > 0.0)) throw ValidationError("epsilon0 and delta0 must be positive");
  return p;
}

SeparationResult run_separation_experiment(const PreparedExperiment& prep, double delta, double t_fix) {
  SeparationResult r;
  r.delta = delta;
  r.t_fix = t_fix;
  r.constants.c1 = prep.c1;
  r.constants.delta0 = prep.delta0;
  const auto& base = prep.setup.sim;
  const int m = base.fourier_modes, p = base.cheb_degree;
  const double l = base.channel.period_length;

  r.t_delta = modes::escape_time({prep.full, delta, prep.epsilon0});
  if (t_fix > r.t_delta) throw ValidationError("t_fix must not exceed T^delta");

  SimConfig nl = base;
  nl.linearized = false;
  nl.t_end = r.t_delta;
  SimConfig lin = nl;
  lin.linearized = true;
  Stepper step_nl(nl), step_lin(lin);

  FlowState a = make_state(streamfunction_from_packet(prep.full, delta, m, p, l));
  FlowState b = make_state(streamfunction_from_packet(prep.reduced, delta, m, p, l));
  FlowState la = a, lb = b;

  const auto& last_mode = prep.full.modes.back();
  const double c_n = std::abs(prep.full.coefficients.back());
  const double h2_cap = 2.0 * prep.c1 * prep.delta0;

  auto observe = [&](double t) {
    const double f = delta * modes::growth_envelope(prep.full, t);
    for (const FlowState* s : {&a, &b}) {
      const Norms nm = norms(velocity(*s));
      if (nm.h2 > h2_cap && r.gate_h2) {
        r.gate_h2 = false;
        r.first_violation_h2 = t;
      }
      if (nm.l2 > 3.0 * prep.c1 * f && r.gate_l2) {
        r.gate_l2 = false;
        r.first_violation_l2 = t;
      }
      if (s == &a) r.constants.c2 = std::max(r.constants.c2, nm.h2 / f);
    }
    const double d_full = difference_l2(a, la);
    r.constants.c3 = std::max(r.constants.c3, d_full / (f * f));
    return d_full;
  };
  auto sample = [&](double t, double d_full) {
    r.series.push_back({t, difference_l2(a, b), difference_l2(la, lb), d_full, difference_l2(b, lb)});
  };

  try {
    r.cfl = step_nl.cfl(a, nl.dt);
    if (r.cfl > 0.5) throw ValidationError("dt exceeds the advective stability bound");
    const Schedule plan = make_schedule(0.0, r.t_delta, nl.dt, {t_fix});
    step_nl.record(r.diagnostics, a, nullptr);
    sample(0.0, observe(0.0));
    for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
      const double h = plan.sizes[i];
      const bool last = i + 1 == plan.sizes.size();
      const bool rec = last || (a.step + 1) % nl.diagnostics_stride == 0;
      StepReport rep;
      step_nl.step(a, h, rec ? &rep : nullptr);
      step_nl.step(b, h);
      step_lin.step(la, h);
      step_lin.step(lb, h);
      a.t = b.t = la.t = lb.t = plan.times[i];
      const double d_full = observe(a.t);
      const bool at_fix = a.t == t_fix;
      if (at_fix) r.d_at_fix = d_full;
      if (rec) {
        step_nl.record(r.diagnostics, a, &rep);
        const double n2 = r.diagnostics.l2.back() * r.diagnostics.l2.back();
        if (n2 > 0.0) r.max_energy_residual = std::max(r.max_energy_residual, rep.residual() / n2);
      }
      if (rec || at_fix) sample(a.t, d_full);
    }
    r.diagnostics.fill_growth_rate();
  } catch (const NumericalError& e) {
    r.error = e.what();
  } catch (const ValidationError& e) {
    r.error = e.what();
  }

  if (r.error.empty()) {
    r.separation = difference_l2(a, b);
    r.bound = 0.5 * delta * c_n * std::exp(last_mode.lambda * r.t_delta);
    r.separation_ok = r.separation >= r.bound;
    r.constants.c4 = modes::growth_envelope(prep.full, r.t_delta) / (c_n * std::exp(last_mode.lambda * r.t_delta));
    r.constants.m0 = r.separation / prep.epsilon0;
  }
  r.verdict = r.error.empty() && r.gate_h2 && r.gate_l2 && r.separation_ok;
  return r;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw ValidationError("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

SweepResult run_experiment_sweep(const ExperimentSetup& setup, const std::vector<double>& deltas, int threads) {
  if (deltas.empty()) throw ValidationError("need at least one delta");
  SweepResult sw;
  sw.prep = prepare_experiment(setup);
  std::vector<double> t_delta;
  for (double d : deltas) t_delta.push_back(modes::escape_time({sw.prep.full, d, sw.prep.epsilon0}));
  sw.t_fix = *std::min_element(t_delta.begin(), t_delta.end());
  // Each delta is independent; results land in their own slot, so the
  // thread count does not affect the output.
  sw.runs.resize(deltas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < deltas.size();) {
      try {
        sw.runs[i] = run_separation_experiment(sw.prep, deltas[i], sw.t_fix);
      } catch (const std::exception& e) {
        sw.runs[i].delta = deltas[i];
        sw.runs[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t extra = std::min<std::size_t>(deltas.size(), static_cast<std::size_t>(std::max(threads, 1))) - 1;
  for (std::size_t i = 0; i < extra; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<double> xs, ys;
  for (const auto& r : sw.runs)
    if (r.error.empty() && r.d_at_fix > 0.0) {
      xs.push_back(r.delta);
      ys.push_back(r.d_at_fix);
    }
  if (xs.size() >= 2) {
    sw.slope = log_log_slope(xs, ys);
    sw.slope_ok = std::abs(sw.slope - 2.0) <= 0.2;
  }

  std::vector<std::size_t> order(deltas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return deltas[i] > deltas[j]; });
  const double lam_n = sw.prep.full.modes.back().lambda;
  sw.escape_ok = order.size() >= 2;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double expected = std::log(deltas[order[i]] / deltas[order[i + 1]]) / lam_n;
    const double ratio = (t_delta[order[i + 1]] - t_delta[order[i]]) / expected;
    sw.escape_ratio.push_back(ratio);
    if (std::abs(ratio - 1.0) > 0.05) sw.escape_ok = false;
  }
  sw.all_ok = sw.slope_ok && sw.escape_ok;
  for (const auto& r : sw.runs) sw.all_ok = sw.all_ok && r.verdict;
  return sw;
}

namespace {

nlohmann::json constants_json(const MeasuredConstants& c) {
  return {{"C1", c.c1}, {"C2", c.c2}, {"C3", c.c3}, {"C4", c.c4}, {"delta0", c.delta0}, {"m0", c.m0}};
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::vector<std::string> write_experiment_outputs(const SweepResult& sweep, const std::string& out_dir,
                                                  const io::RunManifest& base) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> outputs;

  for (const auto& r : sweep.runs) {
    const std::string sub = "delta_" + delta_label(r.delta);
    const fs::path dir = fs::path(out_dir) / sub;
    fs::create_directories(dir);

    io::CsvWriter diag((dir / "diagnostics.csv").string(),
                       {"t", "l2", "h1", "h2", "boundary_production", "dissipation", "growth_rate"});
    const auto& d = r.diagnostics;
    for (std::size_t i = 0; i < d.size(); ++i)
      diag.row({d.times[i], d.l2[i], d.h1[i], d.h2[i], d.boundary_production[i], d.dissipation[i], d.growth_rate[i]});
    diag.close();

    io::CsvWriter sep((dir / "separation.csv").string(),
                      {"t", "sep_l2", "linear_prediction", "d_from_linear_full", "d_from_linear_reduced"});
    for (const auto& s : r.series) sep.row({s.t, s.sep_l2, s.linear_prediction, s.d_from_linear_full, s.d_from_linear_reduced});
    sep.close();

    io::RunManifest m = base;
    m.outputs = {sub + "/diagnostics.csv", sub + "/separation.csv"};
    m.truncated = !r.error.empty();
    m.details = {
        {"packet", modes::packet_manifest(sweep.prep.full, sweep.prep.epsilon0, r.delta, r.t_delta)},
        {"reduced_packet_size", sweep.prep.reduced.count()},
        {"t_fix", r.t_fix},
        {"separation", r.separation},
        {"bound", r.bound},
        {"d_from_linear_at_t_fix", r.d_at_fix},
        {"constants", constants_json(r.constants)},
        {"verdicts",
         {{"gate_h2", r.gate_h2},
          {"gate_l2", r.gate_l2},
          {"first_violation_h2", optional_json(r.first_violation_h2)},
          {"first_violation_l2", optional_json(r.first_violation_l2)},
          {"separation", r.separation_ok},
          {"overall", r.verdict}}},
        {"max_energy_residual_relative", r.max_energy_residual},
        {"cfl", r.cfl},
        {"error", r.error},
    };
    io::write_manifest(dir.string(), m);
    outputs.push_back(sub + "/manifest.json");
    outputs.push_back(sub + "/diagnostics.csv");
    outputs.push_back(sub + "/separation.csv");
  }

  io::CsvWriter summary((fs::path(out_dir) / "summary.csv").string(), {"delta", "T_delta", "separation", "bound", "verdict"});
  for (const auto& r : sweep.runs) summary.row({r.delta, r.t_delta, r.separation, r.bound, r.verdict ? 1.0 : 0.0});
  summary.close();
  outputs.push_back("summary.csv");

  nlohmann::json ex = {
      {"capital_lambda", sweep.prep.capital_lambda},
      {"lattice_index", sweep.prep.lattice_index},
      {"wavenumber", sweep.prep.wavenumber},
      {"packet_lambdas", sweep.prep.full.lambdas()},
      {"epsilon0", sweep.prep.epsilon0},
      {"delta0", sweep.prep.delta0},
      {"C1", sweep.prep.c1},
      {"t_fix", sweep.t_fix},
      {"gronwall_slope", sweep.slope},
      {"gronwall_slope_ok", sweep.slope_ok},
      {"escape_time_ratios", sweep.escape_ratio},
      {"escape_time_ok", sweep.escape_ok},
      {"all_ok", sweep.all_ok},
      {"notes", sweep.prep.notes},
  };
  io::write_text((fs::path(out_dir) / "experiment.json").string(), io::dump(ex));
  outputs.push_back("experiment.json");
  return outputs;
}

}  // namespace slipns::sim
