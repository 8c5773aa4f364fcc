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

#include "erx/triangles.hpp"

#include <algorithm>
#include <iterator>

#include "erx/perturbation.hpp"
#include "erx/random.hpp"

namespace erx {
namespace {

struct SideCollector {
  const Prediction& target;
  const OpenTriangle::Kind kind;
  const Record& free;
  const Record& pivot;
  const int need;
  std::vector<OpenTriangle> found;
  TriangleSideReport report;

  bool filled() const { return static_cast<int>(found.size()) >= need; }

  // Scores `candidates` and keeps the ones whose label flips, in order.
  void Score(Classifier& classifier, std::vector<Record>& candidates, bool augmented) {
    std::vector<RecordPair> pairs;
    pairs.reserve(candidates.size());
    for (const auto& c : candidates) {
      pairs.push_back(kind == OpenTriangle::Kind::kLeft ? RecordPair{c, pivot}
                                                        : RecordPair{pivot, c});
    }
    auto scores = classifier.PredictBatch(pairs);
    report.scored_candidates += candidates.size();
    if (augmented) report.scored_augmented += candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (filled()) break;
      if (LabelOf(scores[i]) == target.label) continue;
      found.push_back(OpenTriangle{free, pivot, std::move(candidates[i]), kind,
                                   scores[i], augmented});
    }
    candidates.clear();
  }
};

void CollectSide(Classifier& classifier, const Dataset& dataset,
                 const TriangleOptions& options, SideCollector& side) {
  const Side table_side = side.kind == OpenTriangle::Kind::kLeft ? Side::kU : Side::kV;
  const auto& table = dataset.table(table_side);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Record& w = table[i];
    if (w.id() == side.free.id() || w.AttributeEqual(side.free)) continue;
    order.push_back(i);
  }
  SeededRng rng(MixSeed(options.seed, static_cast<std::uint64_t>(side.kind)));
  rng.Shuffle(std::span<std::size_t>(order));

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<Record> pending;
  for (std::size_t pos = 0; pos < order.size() && !side.filled();) {
    std::size_t end = std::min(order.size(), pos + batch);
    for (; pos < end; ++pos) pending.push_back(table[order[pos]]);
    side.Score(classifier, pending, /*augmented=*/false);
  }

  const int shortfall = side.need - static_cast<int>(side.found.size());
  side.report.shortfall_before_augmentation = shortfall;
  if (shortfall > 0 && options.allow_augment) {
    const std::size_t budget = options.augment_budget_factor * static_cast<std::size_t>(shortfall);
    std::size_t queued = 0;
    for (std::size_t idx : order) {
      if (side.filled() || queued >= budget) break;
      for (auto& variant : Augment(table[idx], options.augment_per_record)) {
        if (queued >= budget) break;
        if (variant.AttributeEqual(side.free)) continue;
        pending.push_back(std::move(variant));
        ++queued;
        if (pending.size() >= batch) {
          side.Score(classifier, pending, /*augmented=*/true);
          if (side.filled()) break;
        }
      }
    }
    if (!pending.empty() && !side.filled()) {
      side.Score(classifier, pending, /*augmented=*/true);
    }
  }

  side.report.requested = side.need;
  side.report.found = static_cast<int>(side.found.size());
  side.report.found_augmented = static_cast<int>(
      std::count_if(side.found.begin(), side.found.end(),
                    [](const OpenTriangle& t) { return t.augmented; }));
  side.report.shortfall = side.need - side.report.found;
}

}  // namespace

TriangleSet GetTriangles(Classifier& classifier, const Prediction& target,
                         const Dataset& dataset, const TriangleOptions& options) {
  if (options.tau < 2 || options.tau % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "tau must be even and >= 2, got " + std::to_string(options.tau));
  }
  if (!(target.pair.left.schema() == dataset.schema(Side::kU)) ||
      !(target.pair.right.schema() == dataset.schema(Side::kV))) {
    throw Error(ErrorCode::kInvalidArgument,
                "target pair does not follow the dataset schemas");
  }
  const int need = options.tau / 2;
  SideCollector left{target, OpenTriangle::Kind::kLeft, target.pair.left,
                     target.pair.right, need, {}, {}};
  SideCollector right{target, OpenTriangle::Kind::kRight, target.pair.right,
                      target.pair.left, need, {}, {}};
  CollectSide(classifier, dataset, options, left);
  CollectSide(classifier, dataset, options, right);

  TriangleSet out;
  out.left = left.report;
  out.right = right.report;
  out.triangles = std::move(left.found);
  std::move(right.found.begin(), right.found.end(), std::back_inserter(out.triangles));
  return out;
}

}  // namespace erx
