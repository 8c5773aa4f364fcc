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

#include <unordered_set>

namespace erx {

Record PerturbRecord(const Record& base, const Record& source, AttributeSet changed) {
  if (base.side() != source.side() || !(base.schema() == source.schema())) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot perturb record '" + base.id() + "' with '" + source.id() +
                    "': records come from different schemas");
  }
  if (!changed.IsSubsetOf(AttributeSet::Full(base.schema().size()))) {
    throw Error(ErrorCode::kInvalidArgument,
                "attribute set exceeds the schema of record '" + base.id() + "'");
  }
  Record out = base;
  for (int i = 0; i < base.schema().size(); ++i) {
    if (changed.contains(i)) out.set_value(i, source.value(i));
  }
  return out;
}

PerturbedRecord Perturb(const Record& base, const Record& source, AttributeSet changed) {
  Record result = PerturbRecord(base, source, changed);
  return {base, source, changed, std::move(result)};
}

PerturbedRecord Perturb(const Record& base, const Record& source,
                        const std::vector<std::string>& changed) {
  return Perturb(base, source, base.schema().SetOf(changed));
}

namespace {

// All token-drop variants of one value, first-drops by ascending k, then
// last-drops by ascending k.
std::vector<std::string> DropVariants(const std::string& value) {
  auto tokens = Tokenize(value);
  const std::size_t n = tokens.size();
  std::vector<std::string> variants;
  if (n < 2) return variants;
  for (std::size_t k = 1; k < n; ++k) variants.push_back(JoinTokens(tokens, k, n));
  for (std::size_t k = 1; k < n; ++k) variants.push_back(JoinTokens(tokens, 0, n - k));
  return variants;
}

}  // namespace

std::vector<Record> Augment(const Record& record, std::size_t cap) {
  std::vector<Record> out;
  if (cap == 0) return out;
  const int l = record.schema().size();
  std::vector<std::vector<std::string>> actions(l);
  for (int i = 0; i < l; ++i) actions[i] = DropVariants(record.value(i));

  std::unordered_set<std::string> seen{record.Fingerprint()};
  std::vector<int> subset;
  for (int size = 1; size <= l && out.size() < cap; ++size) {
    // Lexicographic combinations of `size` indices out of l.
    subset.resize(size);
    for (int i = 0; i < size; ++i) subset[i] = i;
    for (;;) {
      bool feasible = true;
      for (int a : subset) feasible = feasible && !actions[a].empty();
      if (feasible) {
        // Odometer over per-attribute actions, last attribute fastest.
        std::vector<std::size_t> choice(size, 0);
        for (;;) {
          Record variant = record;
          for (int j = 0; j < size; ++j) {
            variant.set_value(subset[j], actions[subset[j]][choice[j]]);
          }
          if (seen.insert(variant.Fingerprint()).second) {
            out.emplace_back(record.id() + "~aug" + std::to_string(out.size()),
                             record.schema_ptr(), variant.values());
            if (out.size() >= cap) return out;
          }
          int j = size - 1;
          while (j >= 0 && ++choice[j] == actions[subset[j]].size()) {
            choice[j] = 0;
            --j;
          }
          if (j < 0) break;
        }
      }
      int i = size - 1;
      while (i >= 0 && subset[i] == l - size + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace erx
