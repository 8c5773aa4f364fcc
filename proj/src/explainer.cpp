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

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "erx/random.hpp"

namespace erx {

double Explanation::Saliency(Side side, std::string_view attribute) const {
  return counters(side).saliency[schema(side).RequireIndex(attribute)];
}

double Explanation::Chi(Side side, AttributeSet set) const {
  const auto& c = counters(side);
  if (c.triangles == 0) return 0.0;
  return static_cast<double>(c.sufficiency[set.bits()]) / c.triangles;
}

Prediction PredictPair(Classifier& classifier, RecordPair pair) {
  auto scores = classifier.PredictBatch(std::span<const RecordPair>(&pair, 1));
  if (scores.size() != 1) {
    throw Error(ErrorCode::kOracle, "classifier returned no score for the target pair");
  }
  return Prediction::Of(std::move(pair), scores.front());
}

namespace {

struct LatticeResult {
  PredictionStats stats;
  std::vector<FlippedNode> flipped;
};

LatticeResult ProcessTriangle(const OpenTriangle& triangle, Classifier& classifier,
                              bool explained_label, bool pruning) {
  AttributeLattice lattice(triangle);
  LatticeResult result;
  result.stats = TagLattice(lattice, classifier, explained_label, pruning);
  result.flipped = GetFlipped(lattice);
  return result;
}

// Runs ProcessTriangle over all triangles on up to `jobs` threads. Results
// keep triangle order; the first failure (by triangle index) is rethrown.
std::vector<LatticeResult> ProcessAll(const std::vector<OpenTriangle>& triangles,
                                      Classifier& classifier, bool explained_label,
                                      bool pruning, int jobs) {
  std::vector<LatticeResult> results(triangles.size());
  std::vector<std::exception_ptr> errors(triangles.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < triangles.size(); i = next.fetch_add(1)) {
      try {
        results[i] = ProcessTriangle(triangles[i], classifier, explained_label, pruning);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(triangles.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return results;
}

void InitCounters(SideCounters& counters, int attributes, int triangles) {
  counters.triangles = triangles;
  counters.necessity.assign(attributes, 0);
  counters.sufficiency.assign(std::size_t{1} << attributes, 0);
  counters.saliency.assign(attributes, 0.0);
}

}  // namespace

Explanation ExplainWithTriangles(Classifier& classifier, const Prediction& target,
                                 const TriangleSet& triangles,
                                 const ExplainerConfig& config) {
  ScoringSession session(classifier);
  Explanation out;
  out.target = target;
  out.diagnostics.left = triangles.left;
  out.diagnostics.right = triangles.right;

  const int lu = target.pair.left.schema().size();
  const int lv = target.pair.right.schema().size();
  int left_count = 0;
  for (const auto& t : triangles.triangles) left_count += t.kind == OpenTriangle::Kind::kLeft;
  InitCounters(out.u, lu, left_count);
  InitCounters(out.v, lv, static_cast<int>(triangles.triangles.size()) - left_count);

  if (triangles.triangles.empty()) {
    throw ExplanationUnavailableError(
        "no open triangles found for pair (" + target.pair.left.id() + ", " +
            target.pair.right.id() + ")",
        out.diagnostics);
  }

  std::vector<LatticeResult> results;
  try {
    results = ProcessAll(triangles.triangles, session, target.label, config.pruning,
                         config.jobs);
  } catch (const PartialTaggingError& e) {
    throw PartialTaggingError(e.code(),
                              "tagging failed for pair (" + target.pair.left.id() + ", " +
                                  target.pair.right.id() + "): " + e.what(),
                              e.stats());
  }

  for (std::size_t t = 0; t < results.size(); ++t) {
    out.diagnostics.tagging += results[t].stats;
    SideCounters& c = triangles.triangles[t].perturbed_side() == Side::kU ? out.u : out.v;
    for (const auto& node : results[t].flipped) {
      ++c.flips;
      ++c.sufficiency[node.changed.bits()];
      for (std::size_t a = 0; a < c.necessity.size(); ++a) {
        if (node.changed.contains(static_cast<int>(a))) ++c.necessity[a];
      }
    }
  }
  out.diagnostics.tagging.attributes = 0;

  for (Side side : {Side::kU, Side::kV}) {
    SideCounters& c = side == Side::kU ? out.u : out.v;
    const std::uint64_t denominator =
        config.global_flip_count ? out.u.flips + out.v.flips : c.flips;
    for (std::size_t a = 0; a < c.necessity.size(); ++a) {
      c.saliency[a] = denominator == 0 ? 0.0
                                       : static_cast<double>(c.necessity[a]) /
                                             static_cast<double>(denominator);
    }
  }

  // A*: maximal chi, then smallest size, then side U first and subset order.
  // Fractions are compared exactly by cross-multiplication.
  std::uint64_t best_hits = 0;
  std::uint64_t best_total = 1;
  for (Side side : {Side::kU, Side::kV}) {
    const SideCounters& c = out.counters(side);
    if (c.triangles == 0) continue;
    const int l = side == Side::kU ? lu : lv;
    std::vector<AttributeSet> subsets;
    for (std::uint32_t bits = 1; bits + 1 < (std::uint32_t{1} << l); ++bits) {
      subsets.emplace_back(bits);
    }
    std::sort(subsets.begin(), subsets.end(), SubsetOrderLess);
    const auto total = static_cast<std::uint64_t>(c.triangles);
    for (AttributeSet set : subsets) {
      const std::uint64_t hits = c.sufficiency[set.bits()];
      const auto lhs = hits * best_total;
      const auto rhs = best_hits * total;
      if (lhs > rhs || (lhs == rhs && set.size() < out.astar.size())) {
        best_hits = hits;
        best_total = total;
        out.astar = set;
        out.astar_side = side;
      }
    }
  }
  if (!out.astar_side) {
    out.diagnostics.full_schema_only = true;
  } else {
    out.chistar = static_cast<double>(best_hits) / static_cast<double>(best_total);

    std::vector<Counterfactual> qualifying;
    for (std::size_t t = 0; t < results.size(); ++t) {
      const OpenTriangle& triangle = triangles.triangles[t];
      if (triangle.perturbed_side() != *out.astar_side) continue;
      for (const auto& node : results[t].flipped) {
        if (!node.candidate || node.changed != out.astar) continue;
        qualifying.push_back(Counterfactual{node.pair, *out.astar_side, node.changed, 0.0,
                                            node.source, triangle.support.id()});
      }
    }
    out.diagnostics.cf_qualifying = qualifying.size();

    std::vector<RecordPair> pairs;
    pairs.reserve(qualifying.size());
    for (const auto& cf : qualifying) pairs.push_back(cf.pair);
    auto scores = session.PredictBatch(pairs);
    out.diagnostics.verification_predictions = pairs.size();
    std::vector<Counterfactual> validated;
    for (std::size_t i = 0; i < qualifying.size(); ++i) {
      if (LabelOf(scores[i]) == target.label) continue;
      qualifying[i].score = scores[i];
      validated.push_back(std::move(qualifying[i]));
    }
    out.diagnostics.cf_validated = validated.size();

    if (validated.size() > config.cf_cap) {
      std::vector<std::size_t> index(validated.size());
      for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
      SeededRng rng(MixSeed(config.triangles.seed, 7));
      for (std::size_t i = 0; i < config.cf_cap; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.Below(index.size() - i));
        std::swap(index[i], index[j]);
      }
      index.resize(config.cf_cap);
      std::sort(index.begin(), index.end());
      std::vector<Counterfactual> kept;
      kept.reserve(index.size());
      for (std::size_t i : index) kept.push_back(std::move(validated[i]));
      validated = std::move(kept);
    }
    out.counterfactuals = std::move(validated);
  }
  out.diagnostics.oracle_calls = session.oracle_calls();
  return out;
}

Explanation Explain(Classifier& classifier, const Prediction& target, const Dataset& dataset,
                    const ExplainerConfig& config) {
  ScoringSession session(classifier);
  TriangleSet triangles = GetTriangles(session, target, dataset, config.triangles);
  Explanation out = ExplainWithTriangles(session, target, triangles, config);
  out.diagnostics.oracle_calls = session.oracle_calls();
  return out;
}

}  // namespace erx
