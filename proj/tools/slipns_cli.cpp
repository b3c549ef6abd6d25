// slipns: critical viscosity, spectra, mode fields, simulation and the
// nonlinear separation experiment for channel flow with Navier slip walls.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slipns/basis.hpp"
#include "slipns/checkpoint.hpp"
#include "slipns/config.hpp"
#include "slipns/critical.hpp"
#include "slipns/csv.hpp"
#include "slipns/eigensolver.hpp"
#include "slipns/experiment.hpp"
#include "slipns/manifest.hpp"
#include "slipns/modes.hpp"
#include "slipns/stepper.hpp"
#include "slipns/verify.hpp"

namespace fs = std::filesystem;
using namespace slipns;

namespace {

struct Globals {
  std::optional<std::string> config;
  std::uint64_t seed = 0;
  std::string out = "out";
  int threads = 1;
};

// Command-line values that override the resolved config.
struct ProblemArgs {
  std::vector<double> xi;
  std::optional<double> mu;
  std::optional<double> period;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& a) {
  cmd->add_option("--xi", a.xi, "slip coefficients xi_minus xi_plus")->expected(2);
  cmd->add_option("--mu", a.mu, "viscosity");
  cmd->add_option("--period", a.period, "period length L");
}

AppConfig resolve(const Globals& g, const ProblemArgs& a) {
  AppConfig cfg = load_config(g.config);
  if (!a.xi.empty()) cfg.slip = {a.xi[0], a.xi[1]};
  if (a.mu) cfg.channel.viscosity = *a.mu;
  if (a.period) cfg.channel.period_length = *a.period;
  validate_slip(cfg.slip);
  validate_channel(cfg.channel);
  return cfg;
}

io::RunManifest start_manifest(const std::string& command, const AppConfig& cfg, const Globals& g) {
  io::RunManifest m;
  m.command = command;
  m.config_digest = config_digest(cfg);
  m.details["config"] = to_json(cfg);
  m.details["seed"] = g.seed;
  fs::create_directories(g.out);
  return m;
}

std::string out_path(const Globals& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

sim::SimConfig sim_config(const AppConfig& cfg) {
  sim::SimConfig s;
  s.channel = cfg.channel;
  s.slip = cfg.slip;
  s.fourier_modes = cfg.simulation.fourier_modes;
  s.cheb_degree = cfg.simulation.cheb_degree;
  s.dt = cfg.simulation.dt;
  s.t_end = cfg.simulation.t_end;
  s.dealias = cfg.simulation.dealias;
  s.linearized = cfg.simulation.linearized;
  s.diagnostics_stride = cfg.simulation.diagnostics_stride;
  return s;
}

sim::ExperimentSetup experiment_setup(const AppConfig& cfg) {
  sim::ExperimentSetup e;
  e.sim = sim_config(cfg);
  e.lattice_index = cfg.initial.lattice_index;
  e.basis_size = cfg.initial.basis_size;
  e.max_modes = cfg.initial.max_modes;
  e.epsilon0 = cfg.experiment.epsilon0;
  e.delta0 = cfg.experiment.delta0;
  return e;
}

std::vector<double> log_space(double lo, double hi, int points) {
  std::vector<double> k(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) k[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  k.back() = hi;
  return k;
}

void check_range(const std::vector<double>& k, int points) {
  if (k.size() != 2 || !(k[0] > 0.0) || !(k[1] > k[0])) throw ValidationError("--k needs 0 < k_min < k_max");
  if (points < 2) throw ValidationError("--points must be at least 2");
}

// Packet used as initial data and for mode export: the experiment packet in
// the unstable regime, otherwise the leading mode of the requested wavenumber.
struct InitialPacket {
  int lattice_index = 1;
  modes::ModePacket packet;
  std::optional<double> epsilon0;
};

InitialPacket initial_packet(const AppConfig& cfg) {
  InitialPacket ip;
  if (cfg.channel.viscosity < critical::mu_c_global(cfg.slip) &&
      critical::critical_index(cfg.channel, cfg.slip)) {
    const auto prep = sim::prepare_experiment(experiment_setup(cfg));
    ip.lattice_index = prep.lattice_index;
    ip.packet = prep.full;
    ip.epsilon0 = prep.epsilon0;
    return ip;
  }
  ip.lattice_index = std::max(cfg.initial.lattice_index, 1);
  const auto basis = numerics::build_basis(cfg.initial.basis_size);
  const auto sp = eigen::solve_spectrum(ModeProblem::on_lattice(cfg.channel, ip.lattice_index, cfg.slip), basis);
  ip.packet = modes::make_packet({modes::build_mode(sp, 0)}, {1.0});
  return ip;
}

// ---------------------------------------------------------------- commands

int cmd_critical(const Globals& g, const ProblemArgs& a, std::vector<double> k, int points) {
  const AppConfig cfg = resolve(g, a);
  check_range(k, points);
  auto m = start_manifest("critical", cfg, g);
  {
    io::StageTimer t(m, "sample");
    const auto curve = critical::sample_curve(cfg.slip, k[0], k[1], points);
    io::CsvWriter w(out_path(g, "critical.csv"), {"k", "mu_c"});
    for (const auto& [kk, mu] : curve.samples) w.row({kk, mu});
    w.comment("mu_c_global=" + io::format_double(critical::mu_c_global(cfg.slip)));
    w.close();
  }
  m.outputs = {"critical.csv"};
  m.details["k_range"] = k;
  m.details["points"] = points;
  io::write_manifest(g.out, m);
  return 0;
}

int cmd_spectrum(const Globals& g, const ProblemArgs& a, double k, int n, int export_modes, int samples) {
  const AppConfig cfg = resolve(g, a);
  const ModeProblem problem = validate_problem({k, cfg.channel.viscosity, cfg.slip});
  auto m = start_manifest("spectrum", cfg, g);
  const auto basis = numerics::build_basis(n);
  eigen::Spectrum sp;
  {
    io::StageTimer t(m, "galerkin");
    sp = eigen::solve_spectrum(problem, basis);
  }
  eigen::DeterminantTrace trace;
  {
    io::StageTimer t(m, "oracle");
    trace = eigen::determinant_roots(problem, eigen::default_lambda_max(problem));
  }

  io::CsvWriter w(out_path(g, "spectrum.csv"), {"n", "lambda"});
  for (std::size_t i = 0; i < sp.pairs.size(); ++i) w.row({static_cast<double>(i + 1), sp.pairs[i].lambda});
  w.close();

  const auto pos = sp.positive_lambdas();
  double mismatch = 0.0;
  for (std::size_t i = 0; i < std::min(pos.size(), trace.roots.size()); ++i)
    mismatch = std::max(mismatch, std::abs(pos[i] - trace.roots[i]) / trace.roots[i]);
  const bool counts_agree = pos.size() == trace.roots.size();
  const bool ok = counts_agree && mismatch <= 1e-6;
  const nlohmann::json report = {{"positive_count_galerkin", pos.size()},
                                 {"positive_count_oracle", trace.roots.size()},
                                 {"max_rel_mismatch", mismatch},
                                 {"galerkin_positive", pos},
                                 {"oracle_roots", trace.roots},
                                 {"passed", ok}};
  io::write_text(out_path(g, "spectrum_report.json"), io::dump(report));

  const int count = std::min<int>(export_modes, static_cast<int>(sp.pairs.size()));
  std::vector<std::string> header{"n"};
  for (int j = 0; j < n; ++j) header.push_back("c" + std::to_string(j));
  io::CsvWriter coeffs(out_path(g, "eigenvectors.csv"), header);
  m.outputs = {"spectrum.csv", "spectrum_report.json", "eigenvectors.csv"};
  for (int i = 0; i < count; ++i) {
    std::vector<double> row{static_cast<double>(i + 1)};
    const auto& phi = sp.pairs[static_cast<std::size_t>(i)].phi;
    row.insert(row.end(), phi.data(), phi.data() + phi.size());
    coeffs.row(row);

    const auto mode = modes::build_mode(sp, i);
    const auto dphi = mode.phi.derivative();
    const std::string name = "eigenfunction_" + std::to_string(i + 1) + ".csv";
    io::CsvWriter f(out_path(g, name), {"x2", "phi", "phi_p", "psi"});
    for (int s = 0; s < samples; ++s) {
      const double x = -1.0 + 2.0 * s / (samples - 1);
      f.row({x, mode.phi(x), dphi(x), mode.psi(x)});
    }
    f.close();
    m.outputs.push_back(name);
  }
  coeffs.close();

  m.details["k"] = k;
  m.details["basis_size"] = n;
  m.details["report"] = "spectrum_report.json";
  io::write_manifest(g.out, m);
  if (!ok) {
    std::cerr << "error: Galerkin spectrum disagrees with the determinant oracle (mismatch " << mismatch
              << ", counts " << pos.size() << " vs " << trace.roots.size() << ")\n";
    return 4;
  }
  return 0;
}

int cmd_dispersion(const Globals& g, const ProblemArgs& a, std::vector<double> k, int points, int n) {
  const AppConfig cfg = resolve(g, a);
  check_range(k, points);
  auto m = start_manifest("dispersion", cfg, g);
  const auto basis = numerics::build_basis(n);
  {
    io::StageTimer t(m, "sweep");
    io::CsvWriter w(out_path(g, "dispersion.csv"), {"k", "lambda1", "mu_c"});
    for (double kk : log_space(k[0], k[1], points)) {
      const auto sp = eigen::solve_spectrum({kk, cfg.channel.viscosity, cfg.slip}, basis);
      w.row({kk, sp.lambda1(), critical::mu_c_closed_form(kk, cfg.slip)});
    }
    w.close();
  }
  m.outputs = {"dispersion.csv"};
  m.details["k_range"] = k;
  m.details["points"] = points;
  m.details["basis_size"] = n;
  io::write_manifest(g.out, m);
  return 0;
}

int cmd_modes(const Globals& g, const ProblemArgs& a, std::optional<int> lattice, int index, double t, int nx1,
              int nx2, bool chebyshev) {
  AppConfig cfg = resolve(g, a);
  if (lattice) cfg.initial.lattice_index = *lattice;
  auto m = start_manifest("modes", cfg, g);
  const auto basis = numerics::build_basis(cfg.initial.basis_size);
  const int n = lattice && *lattice > 0 ? *lattice : initial_packet(cfg).lattice_index;
  const auto sp = eigen::solve_spectrum(ModeProblem::on_lattice(cfg.channel, n, cfg.slip), basis);
  if (index < 0 || index >= static_cast<int>(sp.pairs.size())) throw ValidationError("--index out of range");
  const auto mode = modes::build_mode(sp, index);
  const modes::GridSpec grid{nx1, nx2, cfg.channel.period_length, chebyshev};
  {
    io::StageTimer timer(m, "sample");
    const auto f = modes::sample_field(mode, t, grid);
    io::CsvWriter w(out_path(g, "mode_field.csv"), {"x1", "x2", "u1", "u2", "q"});
    for (std::size_t i2 = 0; i2 < f.x2.size(); ++i2)
      for (std::size_t i1 = 0; i1 < f.x1.size(); ++i1)
        w.row({f.x1[i1], f.x2[i2], f.u1(i2, i1), f.u2(i2, i1), f.q(i2, i1)});
    w.close();
  }
  m.outputs = {"mode_field.csv"};

  if (sp.positive_count > 0) {
    const auto packet = modes::make_packet(sp, cfg.initial.max_modes);
    const double amplitude = cfg.initial.amplitude;
    double eps0 = 0.0;
    if (cfg.experiment.epsilon0) {
      eps0 = *cfg.experiment.epsilon0;
    } else {
      const auto psi = sim::streamfunction_from_packet(packet, 1.0, cfg.simulation.fourier_modes,
                                                       cfg.simulation.cheb_degree, cfg.channel.period_length);
      eps0 = 1e-2 * sim::norms(sim::velocity_from_streamfunction(psi)).l2;
    }
    const double t_delta = modes::escape_time({packet, amplitude, eps0});
    io::write_text(out_path(g, "packet.json"), io::dump(modes::packet_manifest(packet, eps0, amplitude, t_delta)));
    m.outputs.push_back("packet.json");
  }
  m.details["lattice_index"] = n;
  m.details["mode_index"] = index;
  m.details["lambda"] = mode.lambda;
  m.details["t"] = t;
  io::write_manifest(g.out, m);
  return 0;
}

int cmd_simulate(const Globals& g, const ProblemArgs& a, const std::optional<std::string>& resume,
                 std::int64_t checkpoint_every) {
  const AppConfig cfg = resolve(g, a);
  const sim::SimConfig sc = sim_config(cfg);
  sim::validate(sc);
  auto m = start_manifest("simulate", cfg, g);

  sim::FlowState state;
  if (resume) {
    state = sim::load_checkpoint(*resume, sc);
    m.details["resumed_from"] = fs::path(*resume).filename().string();
    m.details["resumed_at"] = state.t;
  } else {
    io::StageTimer t(m, "initial");
    const auto ip = initial_packet(cfg);
    state = sim::make_state(sim::streamfunction_from_packet(ip.packet, cfg.initial.amplitude, sc.fourier_modes,
                                                            sc.cheb_degree, sc.channel.period_length));
    m.details["lattice_index"] = ip.lattice_index;
    m.details["packet_lambdas"] = ip.packet.lambdas();
  }
  if (!(sc.t_end > state.t)) throw ValidationError("t_end must exceed the start time");

  sim::Stepper stepper(sc);
  sim::RunOptions opts;
  if (checkpoint_every > 0) {
    opts.checkpoint_path = out_path(g, "checkpoint_running.bin");
    opts.checkpoint_every = checkpoint_every;
  }
  sim::RunResult res;
  std::string error;
  {
    io::StageTimer t(m, "run");
    try {
      res = stepper.run(state, opts);
    } catch (const sim::BlowUpError& e) {
      error = e.what();
    }
  }
  if (!error.empty()) {
    m.truncated = true;
    m.details["error"] = error;
    io::write_manifest(g.out, m);
    std::cerr << "error: " << error << "\n";
    return 5;
  }

  const auto& d = res.diagnostics;
  io::CsvWriter w(out_path(g, "diagnostics.csv"),
                  {"t", "l2", "h1", "h2", "boundary_production", "dissipation", "growth_rate"});
  for (std::size_t i = 0; i < d.size(); ++i)
    w.row({d.times[i], d.l2[i], d.h1[i], d.h2[i], d.boundary_production[i], d.dissipation[i], d.growth_rate[i]});
  w.close();
  sim::save_checkpoint(out_path(g, "checkpoint.bin"), res.final_state, sc);
  m.outputs = {"diagnostics.csv", "checkpoint.bin"};
  if (checkpoint_every > 0) m.outputs.push_back("checkpoint_running.bin");

  double energy = 0.0, bc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.l2[i] > 0.0) energy = std::max(energy, d.energy_residual[i] / (d.l2[i] * d.l2[i]));
    bc = std::max(bc, d.boundary_defect[i]);
  }
  m.details["final_time"] = res.final_state.t;
  m.details["steps"] = res.final_state.step;
  m.details["cfl"] = res.cfl;
  m.details["max_energy_residual_relative"] = energy;
  m.details["max_boundary_defect"] = bc;
  io::write_manifest(g.out, m);
  return 0;
}

int cmd_experiment(const Globals& g, const ProblemArgs& a, const std::vector<double>& deltas,
                   std::optional<double> epsilon0) {
  AppConfig cfg = resolve(g, a);
  if (!deltas.empty()) cfg.experiment.deltas = deltas;
  if (epsilon0) cfg.experiment.epsilon0 = epsilon0;
  for (double d : cfg.experiment.deltas)
    if (!(d > 0.0)) throw ValidationError("deltas must be positive");
  if (!(cfg.channel.viscosity < critical::mu_c_global(cfg.slip))) {
    std::cerr << "stable regime: mu = " << cfg.channel.viscosity << " >= mu_c(slip) = " << critical::mu_c_global(cfg.slip)
              << ", no unstable modes; nothing to simulate\n";
    return 3;
  }
  auto m = start_manifest("experiment", cfg, g);
  sim::SweepResult sweep;
  {
    io::StageTimer t(m, "sweep");
    sweep = sim::run_experiment_sweep(experiment_setup(cfg), cfg.experiment.deltas, g.threads);
  }
  m.outputs = sim::write_experiment_outputs(sweep, g.out, m);
  m.details["all_ok"] = sweep.all_ok;
  io::write_manifest(g.out, m);
  for (const auto& r : sweep.runs)
    if (!r.error.empty()) std::cerr << "delta " << r.delta << ": " << r.error << "\n";
  return sweep.all_ok ? 0 : 6;
}

int cmd_verify(const Globals& g) {
  verify::VerifyOptions opts;
  opts.seed = g.seed;
  const AppConfig cfg = load_config(g.config);
  auto m = start_manifest("verify", cfg, g);
  verify::VerifyReport report;
  {
    io::StageTimer t(m, "suite");
    report = verify::run_verify(opts);
  }
  io::write_text(out_path(g, "verify.json"), io::dump(report.to_json()));
  m.outputs = {"verify.json"};
  m.details["all_passed"] = report.all_passed();
  io::write_manifest(g.out, m);
  for (const auto& p : report.properties)
    if (!p.passed) std::cerr << "FAIL " << p.name << ": measured " << p.measured << " > " << p.threshold << "\n";
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slip-wall channel flow: critical viscosity, normal modes and time stepping"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file (environment variables " + std::string(kEnvPrefix) +
                                           "* override its keys)");
  app.add_option("--seed", g.seed, "seed for all randomness");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  ProblemArgs pa;
  std::vector<double> k_range{0.1, 10.0};
  int points = 50;
  int basis_size = 64;

  auto* critical = app.add_subcommand("critical", "critical viscosity curve mu_c(k)");
  add_problem_options(critical, pa);
  critical->add_option("--k", k_range, "k_min k_max")->expected(2);
  critical->add_option("--points", points, "number of log-spaced samples");

  double k = 1.0;
  int export_modes = 3, samples = 201;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of one mode problem, checked against the determinant");
  add_problem_options(spectrum, pa);
  spectrum->add_option("--k", k, "wavenumber");
  spectrum->add_option("-N,--basis", basis_size, "Galerkin basis size");
  spectrum->add_option("--export", export_modes, "eigenfunctions to export");
  spectrum->add_option("--samples", samples, "x2 samples per eigenfunction")->check(CLI::Range(2, 1000000));

  auto* dispersion = app.add_subcommand("dispersion", "lambda_1(k) sweep");
  add_problem_options(dispersion, pa);
  dispersion->add_option("--k", k_range, "k_min k_max")->expected(2);
  dispersion->add_option("--points", points, "number of log-spaced samples");
  dispersion->add_option("-N,--basis", basis_size, "Galerkin basis size");

  std::optional<int> lattice;
  int index = 0, nx1 = 32, nx2 = 33;
  double t = 0.0;
  bool chebyshev = false;
  auto* modes_cmd = app.add_subcommand("modes", "sample one normal-mode velocity field");
  add_problem_options(modes_cmd, pa);
  modes_cmd->add_option("--n", lattice, "lattice index (k = n / L); default: most unstable");
  modes_cmd->add_option("--index", index, "mode index, 0 = largest lambda");
  modes_cmd->add_option("--t", t, "time");
  modes_cmd->add_option("--nx1", nx1)->check(CLI::PositiveNumber);
  modes_cmd->add_option("--nx2", nx2)->check(CLI::Range(2, 1000000));
  modes_cmd->add_flag("--chebyshev", chebyshev, "Lobatto points in x2");

  std::optional<std::string> resume;
  std::int64_t checkpoint_every = 0;
  auto* simulate = app.add_subcommand("simulate", "time-step the Navier-Stokes equations from a mode packet");
  add_problem_options(simulate, pa);
  simulate->add_option("--resume", resume, "checkpoint to continue from");
  simulate->add_option("--checkpoint-every", checkpoint_every, "write checkpoint_running.bin every N steps");

  std::vector<double> deltas;
  std::optional<double> epsilon0;
  auto* experiment = app.add_subcommand("experiment", "nonlinear separation experiment over a list of deltas");
  add_problem_options(experiment, pa);
  experiment->add_option("--delta", deltas, "initial amplitudes");
  experiment->add_option("--epsilon0", epsilon0, "escape threshold");

  auto* verify_cmd = app.add_subcommand("verify", "property suite of every module");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (critical->parsed()) return cmd_critical(g, pa, k_range, points);
    if (spectrum->parsed()) return cmd_spectrum(g, pa, k, basis_size, export_modes, samples);
    if (dispersion->parsed()) return cmd_dispersion(g, pa, k_range, points, basis_size);
    if (modes_cmd->parsed()) return cmd_modes(g, pa, lattice, index, t, nx1, nx2, chebyshev);
    if (simulate->parsed()) return cmd_simulate(g, pa, resume, checkpoint_every);
    if (experiment->parsed()) return cmd_experiment(g, pa, deltas, epsilon0);
    if (verify_cmd->parsed()) return cmd_verify(g);
  } catch (const sim::StableRegimeError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
