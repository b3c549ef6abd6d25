#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace slipns::io {

inline constexpr const char* kToolVersion = "slipns 1.0.0";

/// Record of one CLI invocation. manifest.json holds everything except the
/// wall-clock timings, which go to timings.json so that repeated runs give
/// byte-identical manifests.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string tool_version = kToolVersion;
  std::vector<std::string> outputs;  // relative to the output directory
  std::map<std::string, double> timings;
  nlohmann::json details = nlohmann::json::object();
  bool truncated = false;  // the run stopped early on an error
};

nlohmann::json to_json(const RunManifest& m);

/// Writes <dir>/manifest.json and <dir>/timings.json.
void write_manifest(const std::string& dir, const RunManifest& m);

/// Accumulates wall-clock seconds per named stage.
class StageTimer {
public:
  explicit StageTimer(RunManifest& m, std::string stage);
  ~StageTimer();
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

private:
  RunManifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace slipns::io
