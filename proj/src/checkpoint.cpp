#include "slipns/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace slipns::sim {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  static_assert(sizeof(T) == 8);
  out.write(reinterpret_cast<const char*>(&v), 8);
}

template <typename T>
T get(std::ifstream& in) {
  static_assert(sizeof(T) == 8);
  T v{};
  in.read(reinterpret_cast<char*>(&v), 8);
  if (!in) throw ValidationError("checkpoint is truncated");
  return v;
}

void put_array(std::ofstream& out, const Eigen::MatrixXcd& m) {
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
}

void get_array(std::ifstream& in, Eigen::MatrixXcd& m) {
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
  if (!in) throw ValidationError("checkpoint is truncated");
}

CheckpointHeader read_header(std::ifstream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) throw ValidationError("not a checkpoint file (bad magic)");
  CheckpointHeader h;
  h.fourier_modes = static_cast<int>(get<std::int64_t>(in));
  h.cheb_degree = static_cast<int>(get<std::int64_t>(in));
  h.period_length = get<double>(in);
  h.viscosity = get<double>(in);
  h.xi_minus = get<double>(in);
  h.xi_plus = get<double>(in);
  h.t = get<double>(in);
  return h;
}

}  // namespace

void save_checkpoint(const std::string& path, const FlowState& s, const SimConfig& cfg) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open checkpoint for writing: " + path);
  out.write(kCheckpointMagic, 8);
  put<std::int64_t>(out, cfg.fourier_modes);
  put<std::int64_t>(out, cfg.cheb_degree);
  put<double>(out, cfg.channel.period_length);
  put<double>(out, cfg.channel.viscosity);
  put<double>(out, cfg.slip.xi_minus);
  put<double>(out, cfg.slip.xi_plus);
  put<double>(out, s.t);
  put<std::int64_t>(out, s.step);
  put<double>(out, s.dt_prev);
  put<std::int64_t>(out, s.has_prev ? 1 : 0);
  put_array(out, s.psi.data);
  put_array(out, s.omega.data);
  put_array(out, s.tendency_prev);
  if (!out) throw ValidationError("failed writing checkpoint: " + path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  return read_header(in);
}

FlowState load_checkpoint(const std::string& path, const SimConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  const CheckpointHeader h = read_header(in);
  if (h.fourier_modes != cfg.fourier_modes || h.cheb_degree != cfg.cheb_degree ||
      h.period_length != cfg.channel.period_length || h.viscosity != cfg.channel.viscosity ||
      h.xi_minus != cfg.slip.xi_minus || h.xi_plus != cfg.slip.xi_plus)
    throw ValidationError("checkpoint header does not match the configuration");

  FlowState s;
  s.t = h.t;
  s.step = get<std::int64_t>(in);
  s.dt_prev = get<double>(in);
  s.has_prev = get<std::int64_t>(in) != 0;
  s.psi = SpectralField2D(h.fourier_modes, h.cheb_degree, h.period_length);
  s.omega = SpectralField2D(h.fourier_modes, h.cheb_degree, h.period_length);
  s.tendency_prev = Eigen::MatrixXcd::Zero(h.cheb_degree + 1, 2 * h.fourier_modes + 1);
  get_array(in, s.psi.data);
  get_array(in, s.omega.data);
  get_array(in, s.tendency_prev);
  if (in.peek() != std::ifstream::traits_type::eof()) throw ValidationError("checkpoint has trailing bytes");
  return s;
}

}  // namespace slipns::sim
