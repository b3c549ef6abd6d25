#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "slipns/checkpoint.hpp"
#include "slipns/critical.hpp"
#include "slipns/energy.hpp"
#include "slipns/stepper.hpp"

using namespace slipns;
using namespace slipns::sim;

namespace {

const numerics::DirichletBasis& basis48() {
  static const auto b = numerics::build_basis(48);
  return b;
}

SimConfig small_config(double mu, SlipPair slip, int m, int p) {
  SimConfig c;
  c.channel = {1.0, mu};
  c.slip = slip;
  c.fourier_modes = m;
  c.cheb_degree = p;
  c.dt = 0.01;
  c.t_end = 1.0;
  c.diagnostics_stride = 1;
  return c;
}

modes::NormalMode mode_at(double mu, SlipPair slip, int n, int index) {
  const auto s = eigen::solve_spectrum(ModeProblem::on_lattice({1.0, mu}, n, slip), basis48());
  return modes::build_mode(s, index);
}

SpectralField2D single_mode_psi(const modes::NormalMode& m, double delta, int mm, int p) {
  return streamfunction_from_packet(modes::make_packet({m}, {1.0}), delta, mm, p, 1.0);
}

double fitted_rate(const RunDiagnostics& d, double t_max) {
  double st = 0, sy = 0, stt = 0, sty = 0, n = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.times[i] > t_max + 1e-12) break;
    const double y = std::log(d.l2[i]);
    st += d.times[i];
    sy += y;
    stt += d.times[i] * d.times[i];
    sty += d.times[i] * y;
    n += 1;
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace

TEST_CASE("norm of sin(x1)(1 - x2^2) and of the zero field") {
  VelocityField v{SpectralField2D(2, 8, 1.0), SpectralField2D(2, 8, 1.0)};
  // 1 - x^2 = T0/2 - T2/2 and sin x = (e^{ix} - e^{-ix}) / 2i.
  Eigen::VectorXcd prof = Eigen::VectorXcd::Zero(9);
  prof[0] = 0.5;
  prof[2] = -0.5;
  v.u1.col(1) = cplx(0, -0.5) * prof;
  v.u1.col(-1) = cplx(0, 0.5) * prof;
  const double expected = std::sqrt(M_PI * 16.0 / 15.0);
  CHECK(norms(v).l2 == doctest::Approx(expected).epsilon(1e-14));
  CHECK(l2_norm_physical(v) == doctest::Approx(expected).epsilon(1e-13));

  const VelocityField zero{SpectralField2D(2, 8, 1.0), SpectralField2D(2, 8, 1.0)};
  const auto z = norms(zero);
  CHECK(z.l2 == 0.0);
  CHECK(z.h1 == 0.0);
  CHECK(z.h2 == 0.0);
}

TEST_CASE("Parseval: coefficient and physical-space norms agree on random fields") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = random_streamfunction(6, 20, 1.5, 5, rng);
    const auto v = velocity_from_streamfunction(psi);
    CHECK(std::abs(l2_norm(v) - l2_norm_physical(v)) <= 1e-12 * l2_norm(v));
    CHECK(divergence_max(v) <= 1e-10 * l2_norm(v));
    CHECK(psi.reality_defect() == 0.0);
  }
}

TEST_CASE("zero state is a fixed point") {
  auto cfg = small_config(0.5, {1, 1}, 4, 16);
  Stepper st(cfg);
  auto s = make_state(SpectralField2D(4, 16, 1.0));
  for (int i = 0; i < 5; ++i) st.step(s, 0.01);
  CHECK(s.psi.data.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.omega.data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linearized runs reproduce every resolved positive eigenvalue") {
  // mu = 0.1 at k = 1 has two unstable modes.
  const double mu = 0.1;
  const SlipPair slip{1, 1};
  const auto s = eigen::solve_spectrum(ModeProblem::on_lattice({1.0, mu}, 1, slip), basis48());
  REQUIRE(s.positive_count >= 2);
  for (int i = 0; i < s.positive_count; ++i) {
    const auto m = modes::build_mode(s, i);
    auto cfg = small_config(mu, slip, 2, 48);
    cfg.linearized = true;
    cfg.dt = 0.2 / m.lambda / 20;
    cfg.t_end = 2.0 / m.lambda;
    Stepper st(cfg);
    const auto res = st.run(make_state(single_mode_psi(m, 1e-3, 2, 48)));
    CHECK(std::abs(fitted_rate(res.diagnostics, cfg.t_end) - m.lambda) <= 0.01 * m.lambda);
    const auto& d = res.diagnostics;
    CHECK(std::abs(d.l2.back() / d.l2.front() - std::exp(m.lambda * cfg.t_end)) <=
          0.01 * std::exp(m.lambda * cfg.t_end));
  }
}

TEST_CASE("linearized evolution of a packet is the sum of single-mode evolutions") {
  const double mu = 0.1;
  const auto s = eigen::solve_spectrum(ModeProblem::on_lattice({1.0, mu}, 1, {1, 1}), basis48());
  const auto m0 = modes::build_mode(s, 0), m1 = modes::build_mode(s, 1);
  auto cfg = small_config(mu, {1, 1}, 2, 40);
  cfg.linearized = true;
  cfg.t_end = 1.0;
  Stepper st(cfg);
  const auto both = st.run(make_state(streamfunction_from_packet(modes::make_packet({m0, m1}, {0.7, 1.3}), 1e-3, 2, 40, 1.0)));
  const auto a = st.run(make_state(streamfunction_from_packet(modes::make_packet({m0}, {0.7}), 1e-3, 2, 40, 1.0)));
  const auto b = st.run(make_state(streamfunction_from_packet(modes::make_packet({m1}, {1.3}), 1e-3, 2, 40, 1.0)));
  const Eigen::MatrixXcd sum = a.final_state.psi.data + b.final_state.psi.data;
  CHECK((both.final_state.psi.data - sum).norm() <= 1e-6 * sum.norm());
}

TEST_CASE("tiny nonlinear runs track the linearized run") {
  const auto m = mode_at(0.5, {1, 1}, 1, 0);
  auto cfg = small_config(0.5, {1, 1}, 8, 32);
  cfg.t_end = 2.0;
  const auto psi = single_mode_psi(m, 1e-7, 8, 32);
  Stepper nl(cfg);
  const auto a = nl.run(make_state(psi));
  cfg.linearized = true;
  Stepper lin(cfg);
  const auto b = lin.run(make_state(psi));
  REQUIRE(a.diagnostics.size() == b.diagnostics.size());
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i) {
    CHECK(a.diagnostics.l2[i] <= 1e-5);
    CHECK(std::abs(a.diagnostics.l2[i] - b.diagnostics.l2[i]) <= 1e-3 * b.diagnostics.l2[i]);
  }
}

TEST_CASE("slip conditions, reality and the energy identity hold at every recorded step") {
  std::mt19937_64 rng(12);
  const double mu = 0.5;
  const SlipPair slip{0.5, 2};
  auto cfg = small_config(mu, slip, 6, 32);
  cfg.t_end = 0.5;
  SpectralField2D psi(6, 32, 1.0);
  for (int n = 1; n <= 3; ++n) {
    const auto s = eigen::solve_spectrum(ModeProblem::on_lattice(cfg.channel, n, slip), basis48());
    for (int j = 0; j < 2; ++j) {
      std::uniform_real_distribution<double> u(-1, 1);
      psi.data += single_mode_psi(modes::build_mode(s, j), 0.05 * u(rng), 6, 32).data;
    }
  }
  Stepper st(cfg);
  double worst_reality = 0.0;
  RunOptions opts;
  opts.observer = [&](const FlowState& s) { worst_reality = std::max(worst_reality, s.psi.reality_defect()); };
  const auto res = st.run(make_state(psi), opts);
  const auto& d = res.diagnostics;
  for (std::size_t i = 1; i < d.size(); ++i) {
    CHECK(d.boundary_defect[i] <= 1e-8);
    CHECK(d.energy_residual[i] <= 1e-6 * d.l2[i] * d.l2[i]);
  }
  CHECK(worst_reality <= 1e-12);
  const auto v = velocity(res.final_state);
  CHECK(divergence_max(v) <= 1e-10);
  CHECK(st.boundary_defect(res.final_state) <= 1e-8);
}

TEST_CASE("mean shear follows the exact Robin diffusion") {
  // U0 = 3 + x^2 satisfies mu U' = +-xi U at +-1 for mu = 2, xi = 1.
  const double mu = 2.0;
  const SlipPair slip{1, 1};
  auto cfg = small_config(mu, slip, 2, 16);
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.diagnostics_stride = 50;
  SpectralField2D psi(2, 16, 1.0);
  psi.col(0)[0] = 3.5;
  psi.col(0)[2] = 0.5;
  Stepper st(cfg);
  const auto res = st.run(make_state(psi));
  const oracle::MeanShear ref(mu, slip.xi_minus, slip.xi_plus, [](double x) { return 3 + x * x; });
  // Top mean mode cosh(a x) with a tanh a = xi / mu; it grows for every mu when xi > 0.
  const double a = oracle::bisect([&](double s) { return s * std::tanh(s) - 0.5; }, 0.1, 2.0);
  CHECK(ref.top_rate() == doctest::Approx(mu * a * a).epsilon(1e-10));
  const auto& d = res.diagnostics;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double sim = d.l2[i] * d.l2[i] / (2 * M_PI);
    CHECK(std::abs(sim - ref.l2_squared(d.times[i])) <= 1e-5 * ref.l2_squared(d.times[i]));
    if (i > 0) CHECK(d.l2[i] > d.l2[i - 1]);
  }
}

TEST_CASE("top mean mode grows at its exact rate") {
  const double mu = 0.5;
  const SlipPair slip{1, 1};
  const oracle::MeanShear ref(mu, 1, 1, [](double x) { return 1 + x * x; });
  CHECK(ref.top_rate() > 0.0);
  auto cfg = small_config(mu, slip, 2, 24);
  cfg.t_end = 0.5;
  SpectralField2D psi(2, 24, 1.0);
  const numerics::LegendreSeries top(ref.top_mode_legendre());
  psi.col(0) = chebyshev_from_legendre(top, 24).cast<cplx>();
  Stepper st(cfg);
  const auto res = st.run(make_state(psi));
  CHECK(fitted_rate(res.diagnostics, 0.5) == doctest::Approx(ref.top_rate()).epsilon(1e-3));
}

TEST_CASE("energy inequality") {
  const ChannelConfig c{1.0, 0.5};
  const SlipPair slip{1, 1};
  const auto cap = modes::compute_capital_lambda({c, slip, 4}, c.viscosity, 48);

  SUBCASE("the most unstable mode attains lambda_1") {
    const auto m = mode_at(0.5, slip, 1, 0);
    const auto w = velocity_from_streamfunction(single_mode_psi(m, 1.0, 2, 48));
    const auto e = energy_inequality_check(w, cap.value, c.viscosity, slip);
    CHECK(std::abs(e.lhs - m.lambda * e.norm2) <= 1e-6 * e.norm2);
    CHECK(e.holds);
  }
  SUBCASE("stable wavenumber") {
    const auto m = mode_at(0.5, slip, 3, 0);
    const auto w = velocity_from_streamfunction(single_mode_psi(m, 1.0, 4, 48));
    const auto e = energy_inequality_check(w, cap.value, c.viscosity, slip);
    CHECK(e.lhs < 0.0);
    CHECK(e.rhs >= 0.0);
    CHECK(e.holds);
  }
  SUBCASE("random fields without a mean flow") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
      const auto w = velocity_from_streamfunction(random_streamfunction(6, 24, 1.0, 6, rng));
      CHECK(energy_inequality_check(w, cap.value, c.viscosity, slip).holds);
    }
  }
  SUBCASE("a mean shear violates the bound") {
    // The bound maximizes over nonzero wavenumbers only; the n = 0 shear has
    // its own, larger growth rate.
    const oracle::MeanShear ref(c.viscosity, 1, 1, [](double x) { return 1.0 + 0 * x; });
    SpectralField2D psi(2, 24, 1.0);
    psi.col(0) = chebyshev_from_legendre(numerics::LegendreSeries(ref.top_mode_legendre()), 24).cast<cplx>();
    const auto e = energy_inequality_check(velocity_from_streamfunction(psi), cap.value, c.viscosity, slip);
    CHECK_FALSE(e.holds);
    CHECK(e.lhs / e.norm2 == doctest::Approx(ref.top_rate()).epsilon(1e-6));
  }
  SUBCASE("rejects fields that are not divergence free or leave the walls") {
    VelocityField w{SpectralField2D(2, 8, 1.0), SpectralField2D(2, 8, 1.0)};
    w.u2.col(1)[0] = 1.0;
    w.u2.col(-1)[0] = 1.0;
    CHECK_THROWS_AS(energy_inequality_check(w, cap.value, c.viscosity, slip), ValidationError);
  }
}

TEST_CASE("second-order convergence in dt") {
  const auto m = mode_at(0.5, {1, 1}, 1, 0);
  const auto psi = single_mode_psi(m, 0.05, 6, 24);
  std::vector<double> finals;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) {
    auto cfg = small_config(0.5, {1, 1}, 6, 24);
    cfg.dt = dt;
    cfg.t_end = 1.0;
    cfg.diagnostics_stride = 1000;
    Stepper st(cfg);
    finals.push_back(st.run(make_state(psi)).diagnostics.l2.back());
  }
  const double s1 = std::log2(std::abs(finals[0] - finals[1]) / std::abs(finals[1] - finals[2]));
  const double s2 = std::log2(std::abs(finals[1] - finals[2]) / std::abs(finals[2] - finals[3]));
  MESSAGE("dt slopes " << s1 << " " << s2);
  CHECK(std::abs(s2 - 2.0) <= 0.3);
}

TEST_CASE("schedule lands exactly on stop times") {
  const auto p = make_schedule(0.0, 1.0, 0.3, {0.5});
  CHECK(p.times == std::vector<double>{0.3, 0.5, 0.8, 1.0});
  double sum = 0;
  for (double h : p.sizes) sum += h;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  const auto q = make_schedule(0.0, 0.3, 0.1, {});
  CHECK(q.sizes.size() == 3);
  CHECK(q.times.back() == 0.3);
  CHECK_THROWS_AS(make_schedule(0.0, 1.0, 0.0, {}), ValidationError);
}

TEST_CASE("configuration and stability checks") {
  auto cfg = small_config(0.5, {1, 1}, 4, 16);
  cfg.cheb_degree = 4;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = small_config(0.5, {1, 1}, 4, 16);
  cfg.dt = 1.0;
  const auto m = mode_at(0.5, {1, 1}, 1, 0);
  Stepper st(cfg);
  CHECK_THROWS_AS(st.run(make_state(single_mode_psi(m, 50.0, 4, 16))), ValidationError);

  auto bad = make_state(single_mode_psi(m, 1.0, 4, 16));
  bad.psi.data(0, 5) = cplx(std::nan(""), 0);
  bad.omega.data(0, 5) = cplx(std::nan(""), 0);
  Stepper st2(small_config(0.5, {1, 1}, 4, 16));
  CHECK_THROWS_AS(st2.step(bad, 0.01), BlowUpError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "slipns_test_ckpt";
  fs::create_directories(dir);
  const auto path = (dir / "a.bin").string();
  auto cfg = small_config(0.5, {1, 2}, 4, 16);
  cfg.t_end = 0.05;
  Stepper st(cfg);
  const auto m = mode_at(0.5, {1, 2}, 1, 0);
  const auto res = st.run(make_state(single_mode_psi(m, 0.1, 4, 16)));
  save_checkpoint(path, res.final_state, cfg);
  CHECK(fs::file_size(path) == 64 + 24 + 3 * 17 * 9 * 16);

  const auto back = load_checkpoint(path, cfg);
  CHECK(back.psi.data == res.final_state.psi.data);
  CHECK(back.omega.data == res.final_state.omega.data);
  CHECK(back.tendency_prev == res.final_state.tendency_prev);
  CHECK(back.t == res.final_state.t);
  CHECK(back.step == res.final_state.step);
  CHECK(back.dt_prev == res.final_state.dt_prev);
  CHECK(back.has_prev == res.final_state.has_prev);

  const auto h = read_checkpoint_header(path);
  CHECK(h.fourier_modes == 4);
  CHECK(h.cheb_degree == 16);
  CHECK(h.xi_plus == 2.0);
  CHECK(h.t == res.final_state.t);
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::memcmp(magic, "SLIPSIM1", 8) == 0);

  auto other = cfg;
  other.channel.viscosity = 0.4;
  CHECK_THROWS_AS(load_checkpoint(path, other), ValidationError);
  other = cfg;
  other.fourier_modes = 5;
  CHECK_THROWS_AS(load_checkpoint(path, other), ValidationError);

  const auto trunc = (dir / "t.bin").string();
  fs::copy_file(path, trunc, fs::copy_options::overwrite_existing);
  fs::resize_file(trunc, fs::file_size(path) - 8);
  CHECK_THROWS_AS(load_checkpoint(trunc, cfg), ValidationError);
  fs::resize_file(trunc, fs::file_size(path) + 8);
  CHECK_THROWS_AS(load_checkpoint(trunc, cfg), ValidationError);
  {
    std::fstream f(trunc, std::ios::binary | std::ios::in | std::ios::out);
    f.write("XLIPSIM1", 8);
  }
  CHECK_THROWS_AS(read_checkpoint_header(trunc), ValidationError);
}

TEST_CASE("restart from a checkpoint reproduces the straight run bit for bit") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "slipns_test_restart";
  fs::create_directories(dir);
  auto cfg = small_config(0.5, {1, 1}, 6, 24);
  cfg.t_end = 0.5;
  cfg.diagnostics_stride = 5;
  const auto m = mode_at(0.5, {1, 1}, 1, 0);
  const auto init = make_state(single_mode_psi(m, 0.2, 6, 24));

  Stepper a(cfg);
  RunOptions opts;
  opts.checkpoint_path = (dir / "mid.bin").string();
  opts.checkpoint_every = 20;
  const auto straight = a.run(init, opts);

  // The last checkpoint written is at step 40; resume from it.
  Stepper b(cfg);
  const auto mid = load_checkpoint(opts.checkpoint_path, cfg);
  CHECK(mid.step == 40);
  const auto resumed = b.run(mid);

  CHECK(resumed.final_state.psi.data == straight.final_state.psi.data);
  CHECK(resumed.final_state.t == straight.final_state.t);
  const auto& ds = straight.diagnostics;
  const auto& dr = resumed.diagnostics;
  REQUIRE(dr.size() >= 2);
  const std::size_t offset = ds.size() - dr.size();
  for (std::size_t i = 0; i < dr.size(); ++i) {
    CHECK(dr.times[i] == ds.times[offset + i]);
    CHECK(dr.l2[i] == ds.l2[offset + i]);
    CHECK(dr.h2[i] == ds.h2[offset + i]);
    CHECK(dr.boundary_production[i] == ds.boundary_production[offset + i]);
  }
}
