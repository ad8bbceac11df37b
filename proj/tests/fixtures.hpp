#pragma once

#include "mmwshare/harness.hpp"

// Default scenario geometry, built once per test binary.
inline const mmwshare::ScenarioContext& default_context() {
  static const mmwshare::ScenarioContext ctx = mmwshare::ScenarioContext::build(mmwshare::ScenarioConfig{});
  return ctx;
}
