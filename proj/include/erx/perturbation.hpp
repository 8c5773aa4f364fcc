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

#ifndef ERX_PERTURBATION_HPP_
#define ERX_PERTURBATION_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "erx/dataset.hpp"

namespace erx {

struct PerturbedRecord {
  Record base;
  Record source;
  AttributeSet changed;
  Record result;
};

// Copies the values of `changed` from `source` into a copy of `base`.
// Both records must come from the same schema.
Record PerturbRecord(const Record& base, const Record& source, AttributeSet changed);

PerturbedRecord Perturb(const Record& base, const Record& source, AttributeSet changed);
PerturbedRecord Perturb(const Record& base, const Record& source,
                        const std::vector<std::string>& changed);

inline constexpr std::size_t kDefaultAugmentCap = 256;

// Token-drop variants of `record`. For every non-empty attribute subset (by
// size, then lexicographic), each chosen attribute drops its first k or last
// k tokens (1 <= k < token count); the per-attribute choices combine as a
// cartesian product. Attributes with fewer than two tokens cannot change, so
// subsets containing them are skipped. Attribute-equal duplicates are dropped
// and at most `cap` records are returned.
std::vector<Record> Augment(const Record& record, std::size_t cap = kDefaultAugmentCap);

}  // namespace erx

#endif  // ERX_PERTURBATION_HPP_
