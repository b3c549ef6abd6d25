#pragma once

#include <string>

#include "slipns/stepper.hpp"

namespace slipns::sim {

/// Flat binary checkpoint. A 64-byte header of little-endian 8-byte fields
///   "SLIPSIM1" (magic; trailing digit is the format version), M, P, L, mu,
///   xi_-, xi_+, t
/// is followed by step, dt_prev, has_prev and the psi, omega and previous
/// tendency arrays (column-major, real/imaginary interleaved).
inline constexpr char kCheckpointMagic[9] = "SLIPSIM1";

struct CheckpointHeader {
  int fourier_modes = 0;
  int cheb_degree = 0;
  double period_length = 0.0;
  double viscosity = 0.0;
  double xi_minus = 0.0;
  double xi_plus = 0.0;
  double t = 0.0;
};

void save_checkpoint(const std::string& path, const FlowState& s, const SimConfig& cfg);

/// Throws ValidationError on a bad magic, truncated file or a header that
/// disagrees with cfg.
FlowState load_checkpoint(const std::string& path, const SimConfig& cfg);
CheckpointHeader read_checkpoint_header(const std::string& path);

}  // namespace slipns::sim
