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

#include "erx/perturbation.hpp"

#include <gtest/gtest.h>

#include <set>

#include "testkit.hpp"

namespace erx {
namespace {

using testkit::MakeSchema;

TEST(PsiTest, CopiesNameFromSupport) {
  Dataset d = LoadDataset(ERX_FIXTURE_DIR);
  const Record& u1 = d.Require(Side::kU, "0");
  const Record& u2 = d.Require(Side::kU, "1");
  PerturbedRecord p = Perturb(u1, u2, std::vector<std::string>{"name"});
  EXPECT_EQ(p.result.value("name"), "altec lansing inmotion portable audio system");
  EXPECT_EQ(p.result.value("description"), u1.value("description"));
  EXPECT_EQ(p.result.value("price"), u1.value("price"));
  EXPECT_EQ(p.result.id(), u1.id());
  EXPECT_EQ(p.changed.bits(), 1u);
}

TEST(PsiTest, EmptySetIsIdentityAndFullSetCopiesSupport) {
  auto s = MakeSchema(Side::kU, {"a", "b", "c"});
  Record u("u", s, {"1", "2", "3"});
  Record w("w", s, {"x", "y", "z"});
  EXPECT_EQ(PerturbRecord(u, w, AttributeSet()).values(), u.values());
  EXPECT_TRUE(PerturbRecord(u, w, AttributeSet::Full(3)).AttributeEqual(w));
}

TEST(PsiTest, LocalityAndIdempotence) {
  auto s = MakeSchema(Side::kU, {"a", "b", "c", "d"});
  Record u("u", s, {"1", "2", "3", "4"});
  Record w("w", s, {"x", "y", "z", "q"});
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    AttributeSet set(bits);
    Record once = PerturbRecord(u, w, set);
    Record twice = PerturbRecord(once, w, set);
    EXPECT_EQ(once.values(), twice.values());
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(once.value(i), set.contains(i) ? w.value(i) : u.value(i));
    }
  }
}

TEST(PsiTest, SideMismatchAndUnknownAttributeAreErrors) {
  auto su = MakeSchema(Side::kU, {"a", "b"});
  auto sv = MakeSchema(Side::kV, {"a", "b"});
  Record u("u", su, {"1", "2"});
  Record v("v", sv, {"1", "2"});
  EXPECT_THROW(PerturbRecord(u, v, AttributeSet(1)), Error);
  EXPECT_THROW(Perturb(u, u, std::vector<std::string>{"c"}), Error);
  EXPECT_THROW(PerturbRecord(u, u, AttributeSet(0b100)), Error);
}

TEST(AugmentTest, SingleMultiTokenAttribute) {
  auto s = MakeSchema(Side::kU, {"a", "b"});
  Record w("w", s, {"a b c", "x"});
  auto variants = Augment(w);
  ASSERT_EQ(variants.size(), 4u);
  std::vector<std::string> values;
  for (const auto& r : variants) {
    values.push_back(r.value(0));
    EXPECT_EQ(r.value(1), "x");
  }
  EXPECT_EQ(values, (std::vector<std::string>{"b c", "c", "a b", "a"}));
}

TEST(AugmentTest, SingleTokenAttributesYieldNothing) {
  auto s = MakeSchema(Side::kU, {"a", "b"});
  EXPECT_TRUE(Augment(Record("w", s, {"x", ""})).empty());
}

TEST(AugmentTest, CartesianProductOverAttributes) {
  auto s = MakeSchema(Side::kU, {"a", "b"});
  Record w("w", s, {"a b", "x y"});
  auto variants = Augment(w, 100);
  ASSERT_EQ(variants.size(), 8u);
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& r : variants) got.emplace_back(r.value(0), r.value(1));
  std::vector<std::pair<std::string, std::string>> expected{
      {"b", "x y"}, {"a", "x y"}, {"a b", "y"}, {"a b", "x"},
      {"b", "y"},   {"b", "x"},   {"a", "y"},   {"a", "x"}};
  EXPECT_EQ(got, expected);
}

TEST(AugmentTest, CapDeduplicationAndShape) {
  auto s = MakeSchema(Side::kU, {"a", "b", "c"});
  Record w("w", s, {"p q p q", "r s t u v", "x x"});
  auto capped = Augment(w, 5);
  EXPECT_EQ(capped.size(), 5u);
  auto all = Augment(w, 100000);
  std::set<std::string> fingerprints;
  for (const auto& r : all) {
    EXPECT_FALSE(r.AttributeEqual(w));
    EXPECT_TRUE(fingerprints.insert(r.Fingerprint()).second);
    for (int i = 0; i < 3; ++i) {
      auto original = Tokenize(w.value(i));
      auto changed = Tokenize(r.value(i));
      ASSERT_LE(changed.size(), original.size());
      const bool prefix = std::equal(changed.begin(), changed.end(), original.begin());
      const bool suffix = std::equal(changed.rbegin(), changed.rend(), original.rbegin());
      EXPECT_TRUE(prefix || suffix);
      if (!changed.empty() || !original.empty()) EXPECT_FALSE(changed.empty());
    }
  }
  EXPECT_EQ(Augment(w, 100000).size(), all.size());
  for (std::size_t i = 0; i < capped.size(); ++i) {
    EXPECT_EQ(capped[i].values(), all[i].values());
  }
}

}  // namespace
}  // namespace erx
