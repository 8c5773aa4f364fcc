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

#include <algorithm>
#include <cmath>
#include <set>

namespace erx {

double TokenJaccard(std::string_view a, std::string_view b) {
  auto ta = Tokenize(a);
  auto tb = Tokenize(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) /
         static_cast<double>(sa.size() + sb.size() - common);
}

double ReferenceScore(const Record& u, const Record& v,
                      std::span<const double> weights) {
  const int aligned = std::min(u.schema().size(), v.schema().size());
  if (aligned == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no aligned attributes to compare");
  }
  if (!weights.empty() && static_cast<int>(weights.size()) != aligned) {
    throw Error(ErrorCode::kInvalidArgument,
                "reference classifier expects " + std::to_string(aligned) +
                    " weights, got " + std::to_string(weights.size()));
  }
  double weighted = 0.0;
  double total_weight = 0.0;
  bool any_non_empty = false;
  for (int i = 0; i < aligned; ++i) {
    bool both_empty = Tokenize(u.value(i)).empty() && Tokenize(v.value(i)).empty();
    if (both_empty) continue;
    any_non_empty = true;
    double w = weights.empty() ? 1.0 : weights[i];
    weighted += w * TokenJaccard(u.value(i), v.value(i));
    total_weight += w;
  }
  // Every aligned pair empty: all similarities are 0.
  if (!any_non_empty || total_weight <= 0.0) return 0.0;
  return std::clamp(weighted / total_weight, 0.0, 1.0);
}

std::vector<double> ReferenceClassifier::PredictBatch(
    std::span<const RecordPair> pairs) {
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& pair : pairs) {
    scores.push_back(ReferenceScore(pair.left, pair.right, weights_));
  }
  return scores;
}

std::string ScoringSession::KeyOf(const RecordPair& pair) {
  std::string key = pair.left.Fingerprint();
  key += '\x1e';
  key += pair.right.Fingerprint();
  return key;
}

std::vector<double> ScoringSession::PredictBatch(
    std::span<const RecordPair> pairs) {
  std::vector<double> scores(pairs.size(), 0.0);
  std::vector<std::string> keys;
  keys.reserve(pairs.size());
  for (const auto& pair : pairs) keys.push_back(KeyOf(pair));

  // Distinct cache misses, in first-seen order.
  std::vector<std::size_t> miss_first_index;
  std::unordered_map<std::string, std::size_t> miss_slot;
  {
    std::shared_lock lock(cache_mutex_);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto it = cache_.find(keys[i]);
      if (it != cache_.end()) {
        scores[i] = it->second;
        cache_hits_.fetch_add(1);
      } else if (miss_slot.emplace(keys[i], miss_first_index.size()).second) {
        miss_first_index.push_back(i);
      }
    }
  }
  if (miss_first_index.empty()) return scores;

  std::vector<RecordPair> batch;
  batch.reserve(miss_first_index.size());
  for (std::size_t i : miss_first_index) batch.push_back(pairs[i]);

  std::vector<double> fresh;
  if (inner_.concurrent()) {
    fresh = inner_.PredictBatch(batch);
  } else {
    std::lock_guard lock(inner_mutex_);
    fresh = inner_.PredictBatch(batch);
  }
  if (fresh.size() != batch.size()) {
    throw Error(ErrorCode::kOracle,
                "classifier returned " + std::to_string(fresh.size()) +
                    " scores for " + std::to_string(batch.size()) + " pairs");
  }
  for (double& s : fresh) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorCode::kOracle,
                  "classifier returned a score outside [0,1]: " + std::to_string(s));
    }
    s = QuantizeScore(s);
  }
  {
    std::unique_lock lock(cache_mutex_);
    for (std::size_t m = 0; m < miss_first_index.size(); ++m) {
      if (cache_.emplace(keys[miss_first_index[m]], fresh[m]).second) oracle_calls_.fetch_add(1);
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto it = miss_slot.find(keys[i]);
    if (it != miss_slot.end()) scores[i] = fresh[it->second];
  }
  return scores;
}

Record Mask(const Record& record, AttributeSet attributes) {
  Record out = record;
  for (int i = 0; i < record.schema().size(); ++i) {
    if (attributes.contains(i)) out.set_value(i, "");
  }
  return out;
}

Record Mask(const Record& record, const std::vector<std::string>& attributes) {
  return Mask(record, record.schema().SetOf(attributes));
}

}  // namespace erx
