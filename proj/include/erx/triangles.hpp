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

#ifndef ERX_TRIANGLES_HPP_
#define ERX_TRIANGLES_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "erx/classifier.hpp"
#include "erx/dataset.hpp"

namespace erx {

// An open triangle around the prediction <u, v>.
//   left:  free = u, pivot = v, support = w from U with M(<w, v>) != y
//   right: free = v, pivot = u, support = q from V with M(<u, q>) != y
// Perturbations copy attributes from the support into the free record.
struct OpenTriangle {
  enum class Kind : std::uint8_t { kLeft, kRight };

  Record free;
  Record pivot;
  Record support;
  Kind kind = Kind::kLeft;
  double support_score = 0.0;
  bool augmented = false;

  Side perturbed_side() const { return kind == Kind::kLeft ? Side::kU : Side::kV; }
  int num_attributes() const { return free.schema().size(); }

  // Pairs a (perturbed) free record with the pivot in U/V order.
  RecordPair PairWith(Record perturbed_free) const {
    if (kind == Kind::kLeft) return {std::move(perturbed_free), pivot};
    return {pivot, std::move(perturbed_free)};
  }
};

inline constexpr int kDefaultTriangles = 100;

struct TriangleOptions {
  int tau = kDefaultTriangles;  // even, >= 2; half per side
  bool allow_augment = true;
  std::uint64_t seed = 0;
  std::size_t batch_size = 64;
  std::size_t augment_per_record = 20;
  // Scored augmented candidates per side are capped at factor * shortfall.
  std::size_t augment_budget_factor = 10;
};

struct TriangleSideReport {
  int requested = 0;
  int found = 0;             // total returned for this side
  int found_augmented = 0;   // of which supports are augmented records
  int shortfall = 0;         // requested - found
  int shortfall_before_augmentation = 0;
  std::size_t scored_candidates = 0;
  std::size_t scored_augmented = 0;
};

struct TriangleSet {
  std::vector<OpenTriangle> triangles;  // left triangles, then right ones
  TriangleSideReport left;
  TriangleSideReport right;

  int count(OpenTriangle::Kind kind) const {
    return kind == OpenTriangle::Kind::kLeft ? left.found : right.found;
  }
};

// Collects up to tau/2 supports per side, scoring shuffled candidates in
// batches and falling back to augmented candidates when a side runs short.
// Never fails for a shortage; the per-side reports carry it.
TriangleSet GetTriangles(Classifier& classifier, const Prediction& target,
                         const Dataset& dataset, const TriangleOptions& options);

}  // namespace erx

#endif  // ERX_TRIANGLES_HPP_
