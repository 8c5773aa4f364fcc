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

#include "erx/classifier.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "testkit.hpp"

namespace erx {
namespace {

using testkit::MakeSchema;

struct Pairs {
  SchemaPtr su = MakeSchema(Side::kU, {"name", "desc", "price"});
  SchemaPtr sv = MakeSchema(Side::kV, {"name", "desc", "price"});
  Record U(std::vector<std::string> values, std::string id = "u") {
    return Record(std::move(id), su, std::move(values));
  }
  Record V(std::vector<std::string> values, std::string id = "v") {
    return Record(std::move(id), sv, std::move(values));
  }
};

TEST(LabelTest, StrictlyAboveHalfIsMatch) {
  EXPECT_FALSE(LabelOf(0.5));
  EXPECT_TRUE(LabelOf(0.500000001));
  EXPECT_FALSE(LabelOf(0.0));
  EXPECT_TRUE(LabelOf(1.0));
}

TEST(TokenJaccardTest, Values) {
  EXPECT_DOUBLE_EQ(TokenJaccard("a b c", "b c d"), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(TokenJaccard("a a b", "b"), 1.0 / 2.0);
  EXPECT_DOUBLE_EQ(TokenJaccard("", ""), 0.0);
  EXPECT_DOUBLE_EQ(TokenJaccard("x", ""), 0.0);
  EXPECT_DOUBLE_EQ(TokenJaccard("x y", "y x"), 1.0);
}

TEST(ReferenceScoreTest, SkipsBothEmptyAttributes) {
  Pairs p;
  // name: {a,b} vs {a} -> 1/2; desc: {c} vs {d} -> 0; price both empty.
  double score = ReferenceScore(p.U({"a b", "c", ""}), p.V({"a", "d", ""}));
  EXPECT_DOUBLE_EQ(score, (0.5 + 0.0) / 2.0);
}

TEST(ReferenceScoreTest, AllEmptyScoresZero) {
  Pairs p;
  EXPECT_DOUBLE_EQ(ReferenceScore(p.U({"", "", ""}), p.V({"", " ", ""})), 0.0);
}

TEST(ReferenceScoreTest, WeightedMean) {
  Pairs p;
  std::vector<double> w{2.0, 1.0, 1.0};
  double score = ReferenceScore(p.U({"a", "b", "c"}), p.V({"a", "x", "c"}), w);
  EXPECT_DOUBLE_EQ(score, (2.0 * 1 + 1.0 * 0 + 1.0 * 1) / 4.0);
  std::vector<double> bad{1.0};
  EXPECT_THROW(ReferenceScore(p.U({"a", "b", "c"}), p.V({"a", "x", "c"}), bad), Error);
}

TEST(ReferenceScoreTest, AlignsOnShorterSchema) {
  auto su = MakeSchema(Side::kU, {"a", "b", "c"});
  auto sv = MakeSchema(Side::kV, {"a", "b"});
  Record u("u", su, {"x", "y", "z"});
  Record v("v", sv, {"x", "q"});
  EXPECT_DOUBLE_EQ(ReferenceScore(u, v), 0.5);
}

TEST(ReferenceScoreTest, BoundedInUnitInterval) {
  Pairs p;
  std::mt19937_64 rng(3);
  const std::vector<std::string> words{"a", "b", "c", "d", ""};
  for (int i = 0; i < 200; ++i) {
    auto pick = [&] { return words[rng() % words.size()] + " " + words[rng() % words.size()]; };
    double s = ReferenceScore(p.U({pick(), pick(), pick()}), p.V({pick(), pick(), pick()}));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(ScoringSessionTest, CachesByContentAndDeduplicates) {
  Pairs p;
  std::atomic<int> calls{0};
  FunctionClassifier inner([&](const RecordPair& pair) {
    ++calls;
    return pair.left.value(0) == "a" ? 0.9 : 0.1;
  });
  ScoringSession session(inner);
  std::vector<RecordPair> batch{{p.U({"a", "", ""}, "1"), p.V({"x", "", ""})},
                                {p.U({"a", "", ""}, "2"), p.V({"x", "", ""})},
                                {p.U({"b", "", ""}), p.V({"x", "", ""})}};
  auto scores = session.PredictBatch(batch);
  EXPECT_EQ(scores, (std::vector<double>{0.9, 0.9, 0.1}));
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(session.oracle_calls(), 2u);
  session.PredictBatch(batch);
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(session.cache_hits(), 3u);
}

TEST(ScoringSessionTest, RejectsScoresOutsideUnitInterval) {
  Pairs p;
  FunctionClassifier inner([](const RecordPair&) { return 1.5; });
  ScoringSession session(inner);
  try {
    session.Score({p.U({"a", "", ""}), p.V({"a", "", ""})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracle);
  }
}

class ShortClassifier : public Classifier {
 public:
  std::vector<double> PredictBatch(std::span<const RecordPair>) override { return {0.5}; }
};

TEST(ScoringSessionTest, RejectsShortReplies) {
  Pairs p;
  ShortClassifier inner;
  ScoringSession session(inner);
  std::vector<RecordPair> batch{{p.U({"a", "", ""}), p.V({"a", "", ""})},
                                {p.U({"b", "", ""}), p.V({"a", "", ""})}};
  EXPECT_THROW(session.PredictBatch(batch), Error);
}

TEST(ScoringSessionTest, QuantizesToNineDigits) {
  Pairs p;
  FunctionClassifier inner([](const RecordPair&) { return 0.1234567894; });
  ScoringSession session(inner);
  EXPECT_EQ(session.Score({p.U({"a", "", ""}), p.V({"a", "", ""})}), 0.123456789);
}

class ExclusiveClassifier : public Classifier {
 public:
  std::vector<double> PredictBatch(std::span<const RecordPair> pairs) override {
    if (busy_.exchange(true)) overlapped_ = true;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    busy_ = false;
    return std::vector<double>(pairs.size(), 0.25);
  }
  bool concurrent() const override { return false; }
  std::atomic<bool> busy_{false};
  std::atomic<bool> overlapped_{false};
};

TEST(ScoringSessionTest, SerializesNonConcurrentClassifiers) {
  Pairs p;
  ExclusiveClassifier inner;
  ScoringSession session(inner);
  std::vector<std::jthread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        session.Score({p.U({std::to_string(t * 100 + i), "", ""}), p.V({"a", "", ""})});
      }
    });
  }
  threads.clear();
  EXPECT_FALSE(inner.overlapped_.load());
  EXPECT_EQ(session.oracle_calls(), 80u);
}

TEST(MaskTest, BySetAndByName) {
  Pairs p;
  Record r = p.U({"a", "b", "c"});
  Record m = Mask(r, AttributeSet(0b101));
  EXPECT_EQ(m.values(), (std::vector<std::string>{"", "b", ""}));
  EXPECT_EQ(m.id(), r.id());
  EXPECT_EQ(Mask(r, std::vector<std::string>{"desc"}).values(),
            (std::vector<std::string>{"a", "", "c"}));
  EXPECT_THROW(Mask(r, std::vector<std::string>{"brand"}), Error);
}

}  // namespace
}  // namespace erx
