/*
 * Copyright 2026 The erx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "erx/explainer.hpp"

#include <gtest/gtest.h>

#include "testkit.hpp"

namespace erx {
namespace {

using testkit::FlipPattern;
using testkit::UpwardClosure;

constexpr std::uint32_t N = 1, D = 2, P = 4;

Explanation ExplainScenario(const testkit::ScriptedScenario& s, ExplainerConfig config) {
  Prediction target = PredictPair(*s.oracle, s.target_pair);
  return Explain(*s.oracle, target, *s.dataset, config);
}

void ExpectMatchesBruteForce(const testkit::ScriptedScenario& s, const Explanation& e) {
  auto brute = testkit::BruteForceExplain(*s.oracle, *s.dataset, s.target_pair);
  for (int side = 0; side < 2; ++side) {
    const SideCounters& c = side == 0 ? e.u : e.v;
    ASSERT_EQ(static_cast<std::uint64_t>(c.triangles), brute.triangles[side]);
    EXPECT_EQ(c.flips, brute.flips[side]);
    EXPECT_EQ(c.necessity, brute.necessity[side]);
    EXPECT_EQ(c.sufficiency, brute.sufficiency[side]);
    for (std::size_t a = 0; a < c.saliency.size(); ++a) {
      EXPECT_DOUBLE_EQ(c.saliency[a], brute.Phi(side, static_cast<int>(a)));
    }
  }
  ASSERT_EQ(e.astar_side.has_value(), brute.astar_side.has_value());
  if (brute.astar_side) {
    EXPECT_EQ(*e.astar_side == Side::kU ? 0 : 1, *brute.astar_side);
    EXPECT_EQ(e.astar.bits(), brute.astar);
    EXPECT_DOUBLE_EQ(e.chistar, brute.chistar.value());
  }
}

TEST(ExplainerTest, WorkedExample) {
  auto s = testkit::MakeScriptedScenario(testkit::WorkedExamplePatterns(),
                                         {"name", "description", "price"});
  Explanation e = ExplainScenario(s, s.Config());
  EXPECT_TRUE(e.target.label);
  EXPECT_EQ(e.u.triangles, 4);
  EXPECT_EQ(e.v.triangles, 0);
  EXPECT_EQ(e.u.flips, 19u);
  EXPECT_EQ(e.u.necessity, (std::vector<std::uint64_t>{15, 12, 11}));
  EXPECT_DOUBLE_EQ(e.Saliency(Side::kU, "name"), 15.0 / 19.0);
  EXPECT_DOUBLE_EQ(e.Saliency(Side::kU, "description"), 12.0 / 19.0);
  EXPECT_DOUBLE_EQ(e.Saliency(Side::kU, "price"), 11.0 / 19.0);
  EXPECT_DOUBLE_EQ(e.Chi(Side::kU, AttributeSet(N)), 0.75);
  EXPECT_DOUBLE_EQ(e.Chi(Side::kU, AttributeSet(D)), 0.25);
  EXPECT_DOUBLE_EQ(e.Chi(Side::kU, AttributeSet(P)), 0.0);
  EXPECT_DOUBLE_EQ(e.Chi(Side::kU, AttributeSet(N | D)), 1.0);
  EXPECT_DOUBLE_EQ(e.Chi(Side::kU, AttributeSet(N | P)), 1.0);
  EXPECT_DOUBLE_EQ(e.Chi(Side::kU, AttributeSet(D | P)), 0.75);
  ASSERT_EQ(e.astar_side, Side::kU);
  EXPECT_EQ(e.astar.bits(), N | D);
  EXPECT_DOUBLE_EQ(e.chistar, 1.0);
  EXPECT_EQ(e.counterfactuals.size(), 4u);
  EXPECT_EQ(e.diagnostics.cf_qualifying, 4u);
  EXPECT_EQ(e.diagnostics.cf_validated, 4u);
  EXPECT_EQ(e.diagnostics.tagging.performed, 3u + 4u + 4u + 6u);
  EXPECT_EQ(e.diagnostics.tagging.expected, 24u);
  EXPECT_EQ(e.diagnostics.right.shortfall, 4);
  for (const auto& cf : e.counterfactuals) {
    EXPECT_EQ(cf.side, Side::kU);
    EXPECT_EQ(cf.changed.bits(), N | D);
    EXPECT_FALSE(LabelOf(cf.score));
    EXPECT_EQ(cf.pair.left.value("price"), "u2");
    EXPECT_NE(cf.pair.left.value("name"), "u0");
  }
  ExpectMatchesBruteForce(s, e);
}

TEST(ExplainerTest, PruningDoesNotChangeMonotoneResults) {
  auto s = testkit::MakeScriptedScenario(testkit::WorkedExamplePatterns());
  Explanation pruned = ExplainScenario(s, s.Config(true));
  Explanation full = ExplainScenario(s, s.Config(false));
  EXPECT_EQ(pruned.u.sufficiency, full.u.sufficiency);
  EXPECT_EQ(pruned.u.necessity, full.u.necessity);
  EXPECT_EQ(full.diagnostics.tagging.performed, 24u);
  EXPECT_LT(pruned.diagnostics.tagging.performed, full.diagnostics.tagging.performed);
}

TEST(ExplainerTest, MatchesBruteForceOnRandomMonotoneFunctions) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 60; ++round) {
    const int l = 2 + static_cast<int>(rng() % 3);
    const int count = 1 + static_cast<int>(rng() % 8);
    std::vector<FlipPattern> patterns;
    for (int t = 0; t < count; ++t) {
      patterns.push_back(testkit::RandomMonotone(l, rng));
    }
    auto s = testkit::MakeScriptedScenario(patterns);
    Explanation e = ExplainScenario(s, s.Config(true, round));
    SCOPED_TRACE("round " + std::to_string(round));
    ExpectMatchesBruteForce(s, e);
    for (std::uint32_t a = 0; a < (1u << l); ++a) {
      for (std::uint32_t b = 0; b < (1u << l); ++b) {
        if ((a & b) == a) {
          EXPECT_LE(e.Chi(Side::kU, AttributeSet(a)), e.Chi(Side::kU, AttributeSet(b)));
        }
      }
    }
  }
}

TEST(ExplainerTest, OnlyFullSchemaFlips) {
  auto s = testkit::MakeScriptedScenario({UpwardClosure(3, {})});
  Explanation e = ExplainScenario(s, s.Config());
  EXPECT_EQ(e.u.flips, 1u);
  for (double phi : e.u.saliency) EXPECT_DOUBLE_EQ(phi, 1.0);
  EXPECT_FALSE(e.astar_side.has_value());
  EXPECT_TRUE(e.counterfactuals.empty());
  EXPECT_TRUE(e.diagnostics.full_schema_only);
}

TEST(ExplainerTest, NoTrianglesMeansNoExplanation) {
  auto s = testkit::MakeScriptedScenario(testkit::WorkedExamplePatterns());
  FunctionClassifier constant([](const RecordPair&) { return 0.9; });
  Prediction target = PredictPair(constant, s.target_pair);
  try {
    Explain(constant, target, *s.dataset, s.Config());
    FAIL();
  } catch (const ExplanationUnavailableError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExplanationUnavailable);
    EXPECT_EQ(e.diagnostics().left.shortfall, 4);
  }
}

TEST(ExplainerTest, CounterfactualCapIsSeededSubsample) {
  std::vector<FlipPattern> patterns(12, UpwardClosure(3, {N}));
  auto s = testkit::MakeScriptedScenario(patterns);
  ExplainerConfig config = s.Config();
  config.cf_cap = 3;
  Explanation a = ExplainScenario(s, config);
  EXPECT_EQ(a.astar.bits(), N);
  EXPECT_EQ(a.diagnostics.cf_validated, 12u);
  ASSERT_EQ(a.counterfactuals.size(), 3u);
  Explanation b = ExplainScenario(s, config);
  auto supports = [](const Explanation& e) {
    std::vector<std::string> out;
    for (const auto& cf : e.counterfactuals) out.push_back(cf.support_id);
    return out;
  };
  EXPECT_EQ(supports(a), supports(b));
}

TEST(ExplainerTest, CounterfactualsFlipOnSyntheticProducts) {
  auto d = testkit::SyntheticProducts(30, 9);
  ReferenceClassifier reference;
  ExplainerConfig config;
  config.triangles.tau = 10;
  int explained = 0;
  for (const auto& pair : d->split("test")) {
    Prediction target = PredictPair(reference, d->PairOf(pair));
    try {
      Explanation e = Explain(reference, target, *d, config);
      ++explained;
      EXPECT_LE(e.counterfactuals.size(), config.cf_cap);
      for (const auto& cf : e.counterfactuals) {
        std::vector<RecordPair> one{cf.pair};
        EXPECT_NE(LabelOf(reference.PredictBatch(one).front()), target.label);
        EXPECT_EQ(cf.changed, e.astar);
        const Record& changed = cf.side == Side::kU ? cf.pair.left : cf.pair.right;
        const Record& original = cf.side == Side::kU ? target.pair.left : target.pair.right;
        for (int a = 0; a < 3; ++a) {
          if (!cf.changed.contains(a)) EXPECT_EQ(changed.value(a), original.value(a));
        }
      }
    } catch (const ExplanationUnavailableError&) {
    }
  }
  EXPECT_GT(explained, 20);
}

TEST(ExplainerTest, DeterministicAcrossJobs) {
  auto d = testkit::SyntheticProducts(30, 4);
  ReferenceClassifier reference;
  Prediction target = PredictPair(reference, d->PairOf(d->split("test")[2]));
  ExplainerConfig config;
  config.triangles.tau = 12;
  config.triangles.seed = 3;
  Explanation one = Explain(reference, target, *d, config);
  config.jobs = 4;
  Explanation four = Explain(reference, target, *d, config);
  EXPECT_EQ(one.u.sufficiency, four.u.sufficiency);
  EXPECT_EQ(one.v.sufficiency, four.v.sufficiency);
  EXPECT_EQ(one.u.saliency, four.u.saliency);
  EXPECT_EQ(one.astar, four.astar);
  EXPECT_EQ(one.counterfactuals.size(), four.counterfactuals.size());
  EXPECT_EQ(one.diagnostics.oracle_calls, four.diagnostics.oracle_calls);
}

TEST(ExplainerTest, GlobalFlipCountSharesDenominator) {
  auto d = testkit::SyntheticProducts(30, 4);
  ReferenceClassifier reference;
  Prediction target = PredictPair(reference, d->PairOf(d->split("test")[0]));
  ExplainerConfig config;
  config.triangles.tau = 12;
  Explanation local = Explain(reference, target, *d, config);
  config.global_flip_count = true;
  Explanation global = Explain(reference, target, *d, config);
  ASSERT_GT(local.u.flips, 0u);
  ASSERT_GT(local.v.flips, 0u);
  const double total = static_cast<double>(local.total_flips());
  for (std::size_t a = 0; a < 3; ++a) {
    EXPECT_DOUBLE_EQ(local.u.saliency[a], static_cast<double>(local.u.necessity[a]) / local.u.flips);
    EXPECT_DOUBLE_EQ(global.u.saliency[a], static_cast<double>(local.u.necessity[a]) / total);
    EXPECT_DOUBLE_EQ(global.v.saliency[a], static_cast<double>(local.v.necessity[a]) / total);
  }
}

}  // namespace
}  // namespace erx
