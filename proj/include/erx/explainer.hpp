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

// Saliency and counterfactual explanations for one prediction.
//
// For every open triangle the attribute lattice is tagged and each flip node
// A (computed, inferred or the top) is counted once:
//
//   flips[side]        += 1
//   sufficiency[A]     += 1
//   necessity[a]       += 1   for every a in A
//
// saliency(a) = necessity[a] / flips            (flips of a's side by default)
// chi(A)      = sufficiency[A] / #triangles on A's side
//
// The counterfactual attribute set A* maximizes chi over proper non-empty
// subsets, preferring smaller sets; the counterfactuals are the flipped
// perturbations that change exactly A*.

#ifndef ERX_EXPLAINER_HPP_
#define ERX_EXPLAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "erx/classifier.hpp"
#include "erx/lattice.hpp"
#include "erx/triangles.hpp"

namespace erx {

struct ExplainerConfig {
  TriangleOptions triangles;
  bool pruning = true;
  std::size_t cf_cap = 10;
  // Divide every saliency by the flips of both sides instead of its own.
  bool global_flip_count = false;
  int jobs = 1;
};

struct SideCounters {
  int triangles = 0;
  std::uint64_t flips = 0;
  std::vector<std::uint64_t> necessity;    // per attribute
  std::vector<std::uint64_t> sufficiency;  // per subset, indexed by bits
  std::vector<double> saliency;            // per attribute
};

struct Counterfactual {
  RecordPair pair;
  Side side = Side::kU;
  AttributeSet changed;
  double score = 0.0;  // re-scored
  TagSource source = TagSource::kNone;
  std::string support_id;
};

struct ExplanationDiagnostics {
  TriangleSideReport left;
  TriangleSideReport right;
  PredictionStats tagging;                 // summed over lattices
  std::uint64_t verification_predictions = 0;  // counterfactual re-scoring
  std::uint64_t oracle_calls = 0;          // distinct pairs sent to the classifier
  std::size_t cf_qualifying = 0;           // flipped candidates changing exactly A*
  std::size_t cf_validated = 0;            // of which re-scoring confirmed the flip
  bool full_schema_only = false;           // no proper subset ever flipped
};

struct Explanation {
  Prediction target;
  SideCounters u;
  SideCounters v;
  // A* and chi*; astar is empty (and astar_side unset) when no proper subset
  // has positive sufficiency.
  std::optional<Side> astar_side;
  AttributeSet astar;
  double chistar = 0.0;
  std::vector<Counterfactual> counterfactuals;
  ExplanationDiagnostics diagnostics;

  const SideCounters& counters(Side side) const { return side == Side::kU ? u : v; }
  const Schema& schema(Side side) const {
    return side == Side::kU ? target.pair.left.schema() : target.pair.right.schema();
  }
  std::uint64_t total_flips() const { return u.flips + v.flips; }
  double Saliency(Side side, std::string_view attribute) const;
  // chi(A) on the given side; 0 for sides without triangles.
  double Chi(Side side, AttributeSet set) const;
};

class ExplanationUnavailableError : public Error {
 public:
  ExplanationUnavailableError(const std::string& message, ExplanationDiagnostics diagnostics)
      : Error(ErrorCode::kExplanationUnavailable, message),
        diagnostics_(std::move(diagnostics)) {}
  const ExplanationDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  ExplanationDiagnostics diagnostics_;
};

// Full pipeline: acquires triangles from `dataset`, then explains.
Explanation Explain(Classifier& classifier, const Prediction& target,
                    const Dataset& dataset, const ExplainerConfig& config);

// Explains over an already acquired triangle set.
Explanation ExplainWithTriangles(Classifier& classifier, const Prediction& target,
                                 const TriangleSet& triangles,
                                 const ExplainerConfig& config);

// Scores the pair and wraps it as a prediction.
Prediction PredictPair(Classifier& classifier, RecordPair pair);

}  // namespace erx

#endif  // ERX_EXPLAINER_HPP_
