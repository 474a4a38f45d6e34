// SPDX-License-Identifier: Apache-2.0
//
// Seeded generator of small, valid apps with matching traces, plus the
// property checks run over them.

#pragma once

#include <cstdint>
#include <string>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/runtime.hpp"

namespace thinkahead::fixtures {

struct RandomCase {
  ir::App app;
  runtime::Trace trace;
  runtime::NetModel net;
};

inline constexpr const char* kRandomFetchMethod = "fetch";

RandomCase random_case(std::uint32_t seed);

struct PropertyReport {
  std::size_t cases = 0;
  std::size_t demands = 0;
  std::size_t checked_definitions = 0;
  std::size_t transparency_violations = 0;
  std::size_t duplicate_fetch_violations = 0;
  std::size_t determinism_violations = 0;
  std::size_t soundness_violations = 0;
  std::string first_failure;

  bool cache_properties_hold() const {
    return transparency_violations == 0 && duplicate_fetch_violations == 0 &&
           determinism_violations == 0;
  }
};

// Runs seeds [first_seed, first_seed + count) through analysis,
// instrumentation and both runs.
PropertyReport check_properties(std::uint32_t first_seed, std::size_t count);

}  // namespace thinkahead::fixtures
