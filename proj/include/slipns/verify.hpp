#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipns/core.hpp"

namespace slipns::verify {

using MuCFunction = std::function<double(double, const SlipPair&)>;

struct PropertyResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst observed value of the checked quantity
  double threshold = 0.0;  // gate it is compared against
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  MuCFunction mu_c;  // empty: the closed form
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Runs the invariant suites of every module. Deterministic for a given seed.
VerifyReport run_verify(const VerifyOptions& opts);

}  // namespace slipns::verify
