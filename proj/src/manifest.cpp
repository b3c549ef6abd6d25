#include "slipns/manifest.hpp"

#include <filesystem>

#include "slipns/csv.hpp"

namespace slipns::io {

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_digest"] = m.config_digest;
  j["tool_version"] = m.tool_version;
  j["outputs"] = m.outputs;
  j["truncated"] = m.truncated;
  j["details"] = m.details;
  return j;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_manifest(const std::string& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  write_text((std::filesystem::path(dir) / "manifest.json").string(), dump(to_json(m)));
  nlohmann::json t(m.timings);
  write_text((std::filesystem::path(dir) / "timings.json").string(), dump(t));
}

StageTimer::StageTimer(RunManifest& m, std::string stage)
    : manifest_(m), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}

StageTimer::~StageTimer() {
  manifest_.timings[stage_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

}  // namespace slipns::io
