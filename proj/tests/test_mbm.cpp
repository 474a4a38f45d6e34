// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/mbm.hpp"
#include "thinkahead/string_analysis.hpp"

using namespace thinkahead;
using mbm::Placement;
using mbm::Prefetchability;

namespace {

constexpr Placement B = Placement::kBefore;
constexpr Placement A = Placement::kAfter;

// Independent labelling by brute force over the definition: walk every spot
// and track whether each value has been seen Before, and whether any spot
// falls After.
Prefetchability brute_label(const mbm::CaseConfig& c) {
  int values_with_before = 0;
  int after_spots = 0;
  for (const auto& v : c.values) {
    int before = 0;
    for (auto p : v) {
      before += p == B;
      after_spots += p == A;
    }
    values_with_before += before > 0;
  }
  if (values_with_before < c.k()) return Prefetchability::kNonPrefetchable;
  return after_spots == 0 ? Prefetchability::kHit : Prefetchability::kNonHit;
}

}  // namespace

TEST(Mbm, ClassifyExamples) {
  EXPECT_EQ(mbm::classify({}), Prefetchability::kHit);  // static URL, case 0
  EXPECT_EQ(mbm::classify({{{B}}}), Prefetchability::kHit);
  EXPECT_EQ(mbm::classify({{{A}}}), Prefetchability::kNonPrefetchable);
  EXPECT_EQ(mbm::classify({{{B, A}}}), Prefetchability::kNonHit);
  EXPECT_EQ(mbm::classify({{{B}, {A, A}}}), Prefetchability::kNonPrefetchable);
  EXPECT_EQ(mbm::classify({{{B, B}, {B, B}}}), Prefetchability::kHit);
}

// Spot-check labels: case 2 NP, case 13 NH, case 16 H.
TEST(Mbm, FigureLabels) {
  EXPECT_EQ(mbm::classify(mbm::case_config(2)), Prefetchability::kNonPrefetchable);
  EXPECT_EQ(mbm::classify(mbm::case_config(13)), Prefetchability::kNonHit);
  EXPECT_EQ(mbm::classify(mbm::case_config(16)), Prefetchability::kHit);
  EXPECT_EQ(mbm::case_config(16).d(), (std::vector<int>{2, 2}));
  EXPECT_EQ(mbm::case_config(0).k(), 0);
  EXPECT_EQ(mbm::case_config(1), (mbm::CaseConfig{{{B}}}));
}

TEST(Mbm, HitSetIsExact) {
  std::set<int> hits;
  for (int id = 0; id < mbm::kCaseCount; ++id) {
    if (mbm::classify(mbm::case_config(id)) == Prefetchability::kHit) hits.insert(id);
  }
  EXPECT_EQ(hits, (std::set<int>{0, 1, 3, 6, 10, 16}));
}

TEST(Mbm, ConfigsAreDistinctAndAgreeWithBruteForce) {
  std::set<std::string> seen;
  for (int id = 0; id < mbm::kCaseCount; ++id) {
    auto c = mbm::case_config(id);
    EXPECT_TRUE(seen.insert(c.describe()).second) << id;
    EXPECT_EQ(mbm::classify(c), brute_label(c)) << id;
    EXPECT_LE(c.k(), 2);
    for (int d : c.d()) {
      EXPECT_GE(d, 1);
      EXPECT_LE(d, 2);
    }
  }
  EXPECT_THROW(mbm::case_config(25), std::out_of_range);
  EXPECT_THROW(mbm::case_config(-1), std::out_of_range);
}

TEST(Mbm, GeneratedAppPlacesSpotsAsConfigured) {
  for (int id = 0; id < mbm::kCaseCount; ++id) {
    auto gc = mbm::generate_case(id, 1000, 2000);
    EXPECT_TRUE(ir::validate(gc.app).empty()) << id;
    auto map = analysis::analyze_urls(gc.app);
    const auto& parts = map.at(gc.url_id);
    ASSERT_EQ(static_cast<int>(parts.size()), 1 + 2 * gc.config.k()) << id;
    for (int i = 0; i < gc.config.k(); ++i) {
      const auto& spots = parts[2 + 2 * i].spots;
      const auto& want = gc.config.values[i];
      ASSERT_EQ(spots.size(), want.size()) << id;
      for (std::size_t j = 0; j < want.size(); ++j) {
        EXPECT_EQ(spots[j].container, want[j] == B ? "onCreate" : "onClick")
            << "case " << id << " value " << i << " spot " << j;
        EXPECT_EQ(spots[j].ordinal, static_cast<int>(j + 1));
      }
    }
    // After-spot values differ from every Before value.
    for (const auto& [tag, v] : gc.trace[1].inputs) EXPECT_EQ(v[0], 'a');
    for (const auto& [tag, v] : gc.trace[0].inputs) EXPECT_EQ(v[0], 'b');
    EXPECT_EQ(gc.trace[1].think_ms, 2000);
  }
}

TEST(Mbm, BenchmarkOutcomesMatchClassification) {
  for (std::int64_t think : {0, 300, 999, 1000, 2000}) {
    auto rep = mbm::run_benchmark(1000, think);
    ASSERT_EQ(rep.cases.size(), 25u);
    for (const auto& r : rep.cases) {
      EXPECT_EQ(r.observed, r.expected) << "case " << r.id << " think " << think;
    }
    EXPECT_EQ(rep.accuracy.precision(), 1.0);
    EXPECT_EQ(rep.accuracy.recall(), 1.0);
  }
}

TEST(Mbm, VirtualTimeReductions) {
  auto rep = mbm::run_benchmark(1000, 2000);
  for (const auto& r : rep.cases) {
    EXPECT_EQ(r.orig_ms, 1000);
    if (r.expected == Prefetchability::kHit) {
      EXPECT_EQ(r.reduction_pct, 100.0) << r.id;
      EXPECT_EQ(r.served_from, runtime::ServedFrom::kCache);
    } else {
      EXPECT_EQ(r.reduction_pct, 0.0) << r.id;
    }
  }
  EXPECT_FALSE(rep.cases[0].has_send_definition);
  EXPECT_TRUE(rep.cases[1].has_send_definition);
}

// Cost arithmetic: Red = (Orig - (SD + TP + FFP)) / Orig. Case 1 with
// SD 0, TP 5, FFP 0, Orig 15495 -> 99.97%.
TEST(Mbm, CostArithmeticWithConfiguredCosts) {
  auto rep = mbm::run_benchmark(15495, 20000, {0, 5, 0});
  const auto& c1 = rep.cases[1];
  EXPECT_EQ(c1.sd_ms, 0);
  EXPECT_EQ(c1.tp_ms, 5);
  EXPECT_EQ(c1.ffp_ms, 0);
  EXPECT_EQ(c1.opt_ms, 5);
  EXPECT_NEAR(c1.reduction_pct, 99.97, 0.005);
}

TEST(Mbm, OverheadShowsAsNegativeReduction) {
  auto rep = mbm::run_benchmark(1000, 2000, {3, 4, 5});
  for (const auto& r : rep.cases) {
    if (r.expected == Prefetchability::kHit) {
      EXPECT_EQ(r.opt_ms, r.sd_ms + r.tp_ms + r.ffp_ms) << r.id;
      EXPECT_DOUBLE_EQ(r.reduction_pct, (1000.0 - r.opt_ms) / 10.0) << r.id;
    } else {
      EXPECT_LT(r.reduction_pct, 0.0) << r.id;
      EXPECT_EQ(r.ffp_ms, 1000 + 5) << r.id;
      EXPECT_EQ(r.opt_ms, r.sd_ms + r.tp_ms + r.ffp_ms) << r.id;
    }
  }
}

TEST(Mbm, TsvLayout) {
  auto tsv = mbm::to_tsv(mbm::run_benchmark(1000, 2000));
  std::istringstream in(tsv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "Case\tSD\tTP\tFFP\tOrig\tOpt\tRed/OH\tExpected\tObserved");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (rows == 1) EXPECT_EQ(line, "0\tN/A\t0\t0\t1000\t0\t100.00%\tH\tH");
    if (rows == 3) EXPECT_EQ(line, "2\t0\t0\t1000\t1000\t1000\t0.00%\tNP\tNP");
  }
  EXPECT_EQ(rows, 25);
}

TEST(Mbm, RejectsNonPositiveLatency) {
  EXPECT_THROW(mbm::run_benchmark(0, 100), std::invalid_argument);
}
