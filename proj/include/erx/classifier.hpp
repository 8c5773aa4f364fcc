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

#ifndef ERX_CLASSIFIER_HPP_
#define ERX_CLASSIFIER_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "erx/dataset.hpp"

namespace erx {

// A score strictly above 0.5 is a match; exactly 0.5 is a non-match.
inline constexpr bool LabelOf(double score) { return score > 0.5; }

struct Prediction {
  RecordPair pair;
  double score = 0.0;
  bool label = false;

  static Prediction Of(RecordPair pair, double score) {
    return {std::move(pair), score, LabelOf(score)};
  }
};

// Scores are kept at nine fractional digits, the precision of the bridge
// protocol, so in-process and bridged classifiers agree exactly.
inline double QuantizeScore(double score) { return std::round(score * 1e9) / 1e9; }

// The black-box matcher being explained. Implementations must be
// deterministic and return exactly one score in [0,1] per input pair, in
// input order.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::vector<double> PredictBatch(std::span<const RecordPair> pairs) = 0;

  // False for implementations that cannot serve overlapping PredictBatch
  // calls; ScoringSession serializes those.
  virtual bool concurrent() const { return true; }
};

// Token-set Jaccard over positionally aligned attributes, weighted mean.
// Attribute pairs that are both empty are skipped unless every pair is empty.
// `weights` is either empty (uniform) or has one entry per aligned pair.
double ReferenceScore(const Record& u, const Record& v,
                      std::span<const double> weights = {});

double TokenJaccard(std::string_view a, std::string_view b);

class ReferenceClassifier : public Classifier {
 public:
  ReferenceClassifier() = default;
  explicit ReferenceClassifier(std::vector<double> weights)
      : weights_(std::move(weights)) {}

  std::vector<double> PredictBatch(std::span<const RecordPair> pairs) override;

 private:
  std::vector<double> weights_;
};

// Adapts a plain scoring function; used for scripted and synthetic oracles.
class FunctionClassifier : public Classifier {
 public:
  using ScoreFn = std::function<double(const RecordPair&)>;
  explicit FunctionClassifier(ScoreFn fn) : fn_(std::move(fn)) {}

  std::vector<double> PredictBatch(std::span<const RecordPair> pairs) override {
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& pair : pairs) scores.push_back(fn_(pair));
    return scores;
  }

 private:
  ScoreFn fn_;
};

// Wraps a classifier for one explanation run: memoizes scores by record
// content, validates the oracle's output and serializes access to
// single-consumer classifiers.
class ScoringSession : public Classifier {
 public:
  explicit ScoringSession(Classifier& inner) : inner_(inner) {}

  std::vector<double> PredictBatch(std::span<const RecordPair> pairs) override;

  double Score(const RecordPair& pair) {
    return PredictBatch(std::span<const RecordPair>(&pair, 1)).front();
  }

  // Distinct pairs scored by the wrapped classifier. Pairs raced by two
  // threads are forwarded twice but counted once.
  std::uint64_t oracle_calls() const { return oracle_calls_.load(); }
  std::uint64_t cache_hits() const { return cache_hits_.load(); }

 private:
  static std::string KeyOf(const RecordPair& pair);

  Classifier& inner_;
  std::mutex inner_mutex_;
  std::shared_mutex cache_mutex_;
  std::unordered_map<std::string, double> cache_;
  std::atomic<std::uint64_t> oracle_calls_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
};

// Copy of `record` with the given attributes set to empty text.
Record Mask(const Record& record, AttributeSet attributes);
// Throws kInvalidArgument for names outside the record's schema.
Record Mask(const Record& record, const std::vector<std::string>& attributes);

}  // namespace erx

#endif  // ERX_CLASSIFIER_HPP_
