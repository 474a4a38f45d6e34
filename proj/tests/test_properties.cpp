// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "random_app.hpp"
#include "thinkahead/app_ir.hpp"

using namespace thinkahead;

TEST(Properties, GeneratorIsSeededAndValid) {
  for (std::uint32_t seed = 1; seed <= 50; ++seed) {
    auto a = fixtures::random_case(seed);
    auto b = fixtures::random_case(seed);
    EXPECT_TRUE(ir::validate(a.app).empty()) << seed;
    EXPECT_EQ(ir::print_app(a.app), ir::print_app(b.app));
    EXPECT_EQ(a.trace, b.trace);
  }
}

TEST(Properties, TransparencyDuplicateFetchAndDeterminism) {
  auto rep = fixtures::check_properties(5000, 200);
  EXPECT_EQ(rep.cases, 200u);
  EXPECT_GT(rep.demands, 0u);
  EXPECT_EQ(rep.transparency_violations, 0u) << rep.first_failure;
  EXPECT_EQ(rep.duplicate_fetch_violations, 0u) << rep.first_failure;
  EXPECT_EQ(rep.determinism_violations, 0u) << rep.first_failure;
  EXPECT_TRUE(rep.cache_properties_hold());
}

TEST(Properties, StringAnalysisSoundness) {
  auto rep = fixtures::check_properties(9000, 200);
  EXPECT_GT(rep.checked_definitions, 0u);
  EXPECT_EQ(rep.soundness_violations, 0u) << rep.first_failure;
}
