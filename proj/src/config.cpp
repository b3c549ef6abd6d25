#include "slipns/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>

extern char** environ;

namespace slipns {

using nlohmann::json;

namespace {

const json& require_object(const json& node, const std::string& key) {
  if (!node.is_object()) throw ConfigError("config key '" + key + "': expected a section");
  return node;
}

void reject_unknown(const json& node, const std::string& prefix, const std::set<std::string>& known) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (!known.count(it.key()))
      throw ConfigError("config key '" + prefix + it.key() + "': unknown key");
  }
}

double read_number(const json& node, const std::string& name, const std::string& path, double fallback) {
  if (!node.contains(name)) return fallback;
  const json& v = node.at(name);
  if (!v.is_number()) throw ConfigError("config key '" + path + "': expected a number");
  return v.get<double>();
}

int read_int(const json& node, const std::string& name, const std::string& path, int fallback) {
  if (!node.contains(name)) return fallback;
  const json& v = node.at(name);
  if (!v.is_number_integer()) throw ConfigError("config key '" + path + "': expected an integer");
  return v.get<int>();
}

bool read_bool(const json& node, const std::string& name, const std::string& path, bool fallback) {
  if (!node.contains(name)) return fallback;
  const json& v = node.at(name);
  if (!v.is_boolean()) throw ConfigError("config key '" + path + "': expected true or false");
  return v.get<bool>();
}

std::optional<double> read_optional(const json& node, const std::string& name, const std::string& path) {
  if (!node.contains(name) || node.at(name).is_null()) return std::nullopt;
  return read_number(node, name, path, 0.0);
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError("config key '" + path + "': must be positive");
}

void positive(int v, const std::string& path) {
  if (v <= 0) throw ConfigError("config key '" + path + "': must be a positive integer");
}

json parse_scalar(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

}  // namespace

AppConfig parse_config(const json& doc) {
  AppConfig cfg;
  require_object(doc, "<root>");
  reject_unknown(doc, "", {"period_length", "viscosity", "slip", "simulation", "initial", "experiment"});

  cfg.channel.period_length = read_number(doc, "period_length", "period_length", cfg.channel.period_length);
  cfg.channel.viscosity = read_number(doc, "viscosity", "viscosity", cfg.channel.viscosity);
  positive(cfg.channel.period_length, "period_length");
  positive(cfg.channel.viscosity, "viscosity");

  if (doc.contains("slip")) {
    const json& s = require_object(doc.at("slip"), "slip");
    reject_unknown(s, "slip.", {"xi_minus", "xi_plus"});
    cfg.slip.xi_minus = read_number(s, "xi_minus", "slip.xi_minus", 0.0);
    cfg.slip.xi_plus = read_number(s, "xi_plus", "slip.xi_plus", 0.0);
    if (cfg.slip.xi_minus < 0.0) throw ConfigError("config key 'slip.xi_minus': must be nonnegative");
    if (cfg.slip.xi_plus < 0.0) throw ConfigError("config key 'slip.xi_plus': must be nonnegative");
  }

  if (doc.contains("simulation")) {
    const json& s = require_object(doc.at("simulation"), "simulation");
    reject_unknown(s, "simulation.",
                   {"fourier_modes", "cheb_degree", "dt", "t_end", "dealias", "linearized", "diagnostics_stride"});
    auto& sim = cfg.simulation;
    sim.fourier_modes = read_int(s, "fourier_modes", "simulation.fourier_modes", sim.fourier_modes);
    sim.cheb_degree = read_int(s, "cheb_degree", "simulation.cheb_degree", sim.cheb_degree);
    sim.dt = read_number(s, "dt", "simulation.dt", sim.dt);
    sim.t_end = read_number(s, "t_end", "simulation.t_end", sim.t_end);
    sim.dealias = read_bool(s, "dealias", "simulation.dealias", sim.dealias);
    sim.linearized = read_bool(s, "linearized", "simulation.linearized", sim.linearized);
    sim.diagnostics_stride = read_int(s, "diagnostics_stride", "simulation.diagnostics_stride", sim.diagnostics_stride);
    positive(sim.fourier_modes, "simulation.fourier_modes");
    if (sim.cheb_degree < 8) throw ConfigError("config key 'simulation.cheb_degree': must be >= 8");
    positive(sim.dt, "simulation.dt");
    positive(sim.t_end, "simulation.t_end");
    positive(sim.diagnostics_stride, "simulation.diagnostics_stride");
  }

  if (doc.contains("initial")) {
    const json& s = require_object(doc.at("initial"), "initial");
    reject_unknown(s, "initial.", {"amplitude", "lattice_index", "basis_size", "max_modes"});
    auto& ini = cfg.initial;
    ini.amplitude = read_number(s, "amplitude", "initial.amplitude", ini.amplitude);
    ini.lattice_index = read_int(s, "lattice_index", "initial.lattice_index", ini.lattice_index);
    ini.basis_size = read_int(s, "basis_size", "initial.basis_size", ini.basis_size);
    ini.max_modes = read_int(s, "max_modes", "initial.max_modes", ini.max_modes);
    positive(ini.amplitude, "initial.amplitude");
    if (ini.lattice_index < 0) throw ConfigError("config key 'initial.lattice_index': must be >= 0");
    if (ini.basis_size < 8) throw ConfigError("config key 'initial.basis_size': must be >= 8");
    positive(ini.max_modes, "initial.max_modes");
  }

  if (doc.contains("experiment")) {
    const json& s = require_object(doc.at("experiment"), "experiment");
    reject_unknown(s, "experiment.", {"deltas", "epsilon0", "delta0"});
    auto& ex = cfg.experiment;
    if (s.contains("deltas")) {
      const json& d = s.at("deltas");
      if (!d.is_array() || d.empty())
        throw ConfigError("config key 'experiment.deltas': expected a nonempty array of numbers");
      ex.deltas.clear();
      for (const auto& v : d) {
        if (!v.is_number() || !(v.get<double>() > 0.0))
          throw ConfigError("config key 'experiment.deltas': entries must be positive numbers");
        ex.deltas.push_back(v.get<double>());
      }
    }
    ex.epsilon0 = read_optional(s, "epsilon0", "experiment.epsilon0");
    ex.delta0 = read_optional(s, "delta0", "experiment.delta0");
    if (ex.epsilon0) positive(*ex.epsilon0, "experiment.epsilon0");
    if (ex.delta0) positive(*ex.delta0, "experiment.delta0");
  }
  return cfg;
}

json to_json(const AppConfig& cfg) {
  json doc;
  doc["period_length"] = cfg.channel.period_length;
  doc["viscosity"] = cfg.channel.viscosity;
  doc["slip"] = {{"xi_minus", cfg.slip.xi_minus}, {"xi_plus", cfg.slip.xi_plus}};
  const auto& sim = cfg.simulation;
  doc["simulation"] = {{"fourier_modes", sim.fourier_modes}, {"cheb_degree", sim.cheb_degree},
                       {"dt", sim.dt},
                       {"t_end", sim.t_end},
                       {"dealias", sim.dealias},
                       {"linearized", sim.linearized},
                       {"diagnostics_stride", sim.diagnostics_stride}};
  const auto& ini = cfg.initial;
  doc["initial"] = {{"amplitude", ini.amplitude}, {"lattice_index", ini.lattice_index},
                    {"basis_size", ini.basis_size}, {"max_modes", ini.max_modes}};
  const auto& ex = cfg.experiment;
  doc["experiment"] = {{"deltas", ex.deltas},
                       {"epsilon0", ex.epsilon0 ? json(*ex.epsilon0) : json(nullptr)},
                       {"delta0", ex.delta0 ? json(*ex.delta0) : json(nullptr)}};
  return doc;
}

void apply_overrides(json& doc, const std::map<std::string, std::string>& overrides) {
  for (const auto& [name, value] : overrides) {
    std::string path = name;
    std::transform(path.begin(), path.end(), path.begin(), [](unsigned char c) { return std::tolower(c); });
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const std::size_t sep = path.find("__", start);
      const std::string part = path.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
      if (part.empty()) throw ConfigError("environment override '" + name + "': empty key segment");
      if (sep == std::string::npos) {
        (*node)[part] = parse_scalar(value);
        break;
      }
      if (!node->contains(part)) (*node)[part] = json::object();
      node = &(*node)[part];
      start = sep + 2;
    }
  }
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  const std::string prefix = kEnvPrefix;
  for (char** env = environ; env && *env; ++env) {
    const std::string entry = *env;
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    out[entry.substr(prefix.size(), eq - prefix.size())] = entry.substr(eq + 1);
  }
  return out;
}

AppConfig load_config(const std::optional<std::string>& path) {
  json doc = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file '" + *path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + *path + "': " + e.what());
    }
  }
  apply_overrides(doc, environment_overrides());
  return parse_config(doc);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string config_digest(const AppConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

}  // namespace slipns
