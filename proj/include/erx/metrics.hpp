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

#ifndef ERX_METRICS_HPP_
#define ERX_METRICS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "erx/classifier.hpp"
#include "erx/explainer.hpp"

namespace erx {

// One attribute of the combined U+V schema.
struct AttributeRef {
  Side side = Side::kU;
  int index = 0;
  friend bool operator==(const AttributeRef&, const AttributeRef&) = default;
};

// Attributes by descending saliency; ties keep U attributes first, then
// schema order.
std::vector<AttributeRef> RankAttributes(std::span<const double> saliency_u,
                                         std::span<const double> saliency_v);

RecordPair MaskAttributes(const RecordPair& pair, std::span<const AttributeRef> attributes);

// --- Faithfulness -----------------------------------------------------------

inline constexpr std::array<double, 6> kFaithfulnessThresholds = {0.1, 0.2, 0.33,
                                                                  0.5, 0.7, 0.9};

// ceil(fraction * total), tolerant to binary rounding of the fraction.
int MaskedCount(double fraction, int total);

double F1Score(std::span<const bool> predicted, std::span<const bool> truth);

struct FaithfulnessItem {
  RecordPair pair;
  bool truth = false;
  std::vector<double> saliency_u;
  std::vector<double> saliency_v;
};

struct FaithfulnessResult {
  std::vector<double> thresholds;  // 0 followed by kFaithfulnessThresholds
  std::vector<double> f1;
  double auc = 0.0;  // trapezoidal area under f1(threshold); lower is better
};

// Throws kInvalidArgument when the items contain no positive label.
FaithfulnessResult Faithfulness(Classifier& classifier,
                                std::span<const FaithfulnessItem> items);

// --- Confidence indication --------------------------------------------------

struct ConfidenceSample {
  std::vector<double> saliency;
  bool label = false;
  double score = 0.0;
};

inline constexpr std::size_t kMinConfidenceSamples = 10;

// In-sample MAE of a logistic-link regressor fitted on [saliency..., label]
// to the model scores (500 epochs of per-sample gradient steps of size 0.1 on
// squared error, zero initialization). Throws kInvalidArgument for fewer than
// kMinConfidenceSamples samples.
double ConfidenceIndication(std::span<const ConfidenceSample> samples);

// --- Counterfactual quality -------------------------------------------------

// 1 - token Jaccard; 0 when both values are empty.
double AttributeDistance(std::string_view a, std::string_view b);

struct CounterfactualQuality {
  double proximity = 0.0;
  double sparsity = 0.0;
  std::optional<double> diversity;  // needs at least two counterfactuals
};

// nullopt for an empty set.
std::optional<CounterfactualQuality> MeasureCounterfactuals(
    const RecordPair& original, std::span<const RecordPair> counterfactuals);

// --- Masking analysis -------------------------------------------------------

struct MaskingEffect {
  std::vector<double> actual_u;  // |score - score with the attribute masked|
  std::vector<double> actual_v;
  std::vector<std::pair<int, double>> aggregate;  // (k, |score - score with top-k masked|)
};

MaskingEffect MaskingAnalysis(Classifier& classifier, const Prediction& target,
                              std::span<const double> saliency_u,
                              std::span<const double> saliency_v,
                              std::span<const int> ks);

// --- Split evaluation -------------------------------------------------------

struct EvaluationRow {
  std::string left_id;
  std::string right_id;
  bool truth = false;
  double score = 0.0;
  bool explained = false;
  std::string error;  // when not explained
  std::vector<double> saliency_u;
  std::vector<double> saliency_v;
  std::size_t counterfactuals = 0;
  std::optional<CounterfactualQuality> quality;
  std::optional<Side> astar_side;
  AttributeSet astar;
  std::vector<std::string> astar_names;
  double chistar = 0.0;
  PredictionStats tagging;
  int triangles_left = 0;
  int triangles_right = 0;
};

struct EvaluationReport {
  std::string split;
  std::vector<EvaluationRow> rows;
  std::size_t explained = 0;
  std::optional<FaithfulnessResult> faithfulness;
  std::optional<double> confidence_mae;
  std::optional<double> proximity;
  std::optional<double> sparsity;
  std::optional<double> diversity;
  double avg_counterfactuals = 0.0;
  std::vector<std::string> notes;
};

EvaluationReport Evaluate(Classifier& classifier, const Dataset& dataset,
                          const std::string& split, const ExplainerConfig& config);

// --- Monotonicity audit -----------------------------------------------------

struct SplitAudit {
  std::string split;
  std::size_t pairs = 0;
  std::size_t pairs_without_triangles = 0;
  AuditReport report;  // lattices in pair order, then triangle order
};

// Acquires the triangles of every pair of the split and tags each lattice
// with and without pruning.
SplitAudit AuditSplit(Classifier& classifier, const Dataset& dataset, const std::string& split,
                      const ExplainerConfig& config);

}  // namespace erx

#endif  // ERX_METRICS_HPP_
