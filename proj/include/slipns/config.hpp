#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipns/core.hpp"

namespace slipns {

/// Raised for malformed configuration; the message names the offending key.
class ConfigError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

struct SimulationSettings {
  int fourier_modes = 32;     // M: modes n = -M..M in x1
  int cheb_degree = 64;       // P: Chebyshev degree in x2
  double dt = 0.01;
  double t_end = 1.0;
  bool dealias = true;
  bool linearized = false;
  int diagnostics_stride = 10;
};

struct InitialSettings {
  double amplitude = 1e-6;    // delta multiplying the unit packet
  int lattice_index = 0;      // 0 selects the wavenumber maximizing lambda_1
  int basis_size = 64;
  int max_modes = 8;
};

struct ExperimentSettings {
  std::vector<double> deltas{1e-5, 1e-6, 1e-7};
  std::optional<double> epsilon0;  // default: 1e-2 * ||u^N(0)||_L2
  std::optional<double> delta0;    // default: epsilon0
};

struct AppConfig {
  ChannelConfig channel;
  SlipPair slip;
  SimulationSettings simulation;
  InitialSettings initial;
  ExperimentSettings experiment;
};

/// Environment variables starting with this prefix override config keys:
/// SLIPNS_VISCOSITY=0.3, SLIPNS_SLIP__XI_PLUS=2 ("__" separates sections).
inline constexpr const char* kEnvPrefix = "SLIPNS_";

AppConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const AppConfig& cfg);

/// Applies overrides (already stripped of the prefix, e.g. "SLIP__XI_PLUS")
/// to a raw config document.
void apply_overrides(nlohmann::json& doc, const std::map<std::string, std::string>& overrides);
std::map<std::string, std::string> environment_overrides();

/// Reads a JSON config file (missing path means all defaults), applies the
/// environment overrides and validates the result.
AppConfig load_config(const std::optional<std::string>& path);

/// SHA-256 hex digest of the canonical serialization of the resolved config.
std::string config_digest(const AppConfig& cfg);
std::string sha256_hex(const std::string& bytes);

}  // namespace slipns
