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

#include "erx/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

namespace erx {

std::vector<AttributeRef> RankAttributes(std::span<const double> saliency_u,
                                         std::span<const double> saliency_v) {
  std::vector<std::pair<AttributeRef, double>> scored;
  for (std::size_t i = 0; i < saliency_u.size(); ++i) {
    scored.push_back({{Side::kU, static_cast<int>(i)}, saliency_u[i]});
  }
  for (std::size_t i = 0; i < saliency_v.size(); ++i) {
    scored.push_back({{Side::kV, static_cast<int>(i)}, saliency_v[i]});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<AttributeRef> ranking;
  ranking.reserve(scored.size());
  for (const auto& [ref, _] : scored) ranking.push_back(ref);
  return ranking;
}

RecordPair MaskAttributes(const RecordPair& pair, std::span<const AttributeRef> attributes) {
  AttributeSet left;
  AttributeSet right;
  for (const auto& ref : attributes) {
    if (ref.side == Side::kU) {
      left = left.with(ref.index);
    } else {
      right = right.with(ref.index);
    }
  }
  return {Mask(pair.left, left), Mask(pair.right, right)};
}

int MaskedCount(double fraction, int total) {
  return static_cast<int>(std::ceil(fraction * total - 1e-9));
}

double F1Score(std::span<const bool> predicted, std::span<const bool> truth) {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && truth[i]) ++tp;
    if (predicted[i] && !truth[i]) ++fp;
    if (!predicted[i] && truth[i]) ++fn;
  }
  if (tp + fp + fn == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

FaithfulnessResult Faithfulness(Classifier& classifier,
                                std::span<const FaithfulnessItem> items) {
  std::vector<bool> truth_vec;
  for (const auto& item : items) truth_vec.push_back(item.truth);
  if (std::find(truth_vec.begin(), truth_vec.end(), true) == truth_vec.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "faithfulness needs at least one matching pair (F1 is undefined "
                "otherwise); evaluate a split that contains positives");
  }
  // span<const bool> cannot view vector<bool>.
  std::unique_ptr<bool[]> truth(new bool[items.size()]);
  for (std::size_t i = 0; i < items.size(); ++i) truth[i] = truth_vec[i];

  std::vector<std::vector<AttributeRef>> rankings;
  rankings.reserve(items.size());
  for (const auto& item : items) {
    rankings.push_back(RankAttributes(item.saliency_u, item.saliency_v));
  }

  FaithfulnessResult result;
  result.thresholds.push_back(0.0);
  result.thresholds.insert(result.thresholds.end(), kFaithfulnessThresholds.begin(),
                           kFaithfulnessThresholds.end());
  for (double t : result.thresholds) {
    std::vector<RecordPair> masked;
    masked.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& ranking = rankings[i];
      int k = std::min<int>(MaskedCount(t, static_cast<int>(ranking.size())),
                            static_cast<int>(ranking.size()));
      masked.push_back(MaskAttributes(
          items[i].pair, std::span<const AttributeRef>(ranking.data(), static_cast<std::size_t>(k))));
    }
    auto scores = classifier.PredictBatch(masked);
    std::unique_ptr<bool[]> predicted(new bool[items.size()]);
    for (std::size_t i = 0; i < items.size(); ++i) predicted[i] = LabelOf(scores[i]);
    result.f1.push_back(F1Score(std::span<const bool>(predicted.get(), items.size()),
                                std::span<const bool>(truth.get(), items.size())));
  }
  for (std::size_t i = 1; i < result.thresholds.size(); ++i) {
    const double width = result.thresholds[i] - result.thresholds[i - 1];
    result.auc += width * (result.f1[i] + result.f1[i - 1]) / 2.0;
  }
  return result;
}

double ConfidenceIndication(std::span<const ConfidenceSample> samples) {
  if (samples.size() < kMinConfidenceSamples) {
    throw Error(ErrorCode::kInvalidArgument,
                "confidence indication needs at least " +
                    std::to_string(kMinConfidenceSamples) + " explained predictions, got " +
                    std::to_string(samples.size()));
  }
  const std::size_t dims = samples.front().saliency.size() + 1;
  for (const auto& s : samples) {
    if (s.saliency.size() + 1 != dims) {
      throw Error(ErrorCode::kInvalidArgument,
                  "confidence samples have different saliency lengths");
    }
  }
  constexpr int kEpochs = 500;
  constexpr double kStep = 0.1;
  std::vector<double> weights(dims, 0.0);
  double bias = 0.0;
  auto feature = [&](const ConfidenceSample& s, std::size_t j) {
    return j + 1 < dims ? s.saliency[j] : (s.label ? 1.0 : 0.0);
  };
  auto predict = [&](const ConfidenceSample& s) {
    double z = bias;
    for (std::size_t j = 0; j < dims; ++j) z += weights[j] * feature(s, j);
    return 1.0 / (1.0 + std::exp(-z));
  };
  for (int epoch = 0; epoch < kEpochs; ++epoch) {
    for (const auto& s : samples) {
      const double p = predict(s);
      const double grad = 2.0 * (p - s.score) * p * (1.0 - p);
      for (std::size_t j = 0; j < dims; ++j) weights[j] -= kStep * grad * feature(s, j);
      bias -= kStep * grad;
    }
  }
  double mae = 0.0;
  for (const auto& s : samples) mae += std::abs(predict(s) - s.score);
  return mae / static_cast<double>(samples.size());
}

double AttributeDistance(std::string_view a, std::string_view b) {
  if (Tokenize(a).empty() && Tokenize(b).empty()) return 0.0;
  return 1.0 - TokenJaccard(a, b);
}

namespace {

double MeanDistance(const RecordPair& x, const RecordPair& y) {
  double sum = 0.0;
  const int h = x.left.schema().size();
  const int k = x.right.schema().size();
  for (int i = 0; i < h; ++i) sum += AttributeDistance(x.left.value(i), y.left.value(i));
  for (int i = 0; i < k; ++i) sum += AttributeDistance(x.right.value(i), y.right.value(i));
  return sum / static_cast<double>(h + k);
}

int ChangedAttributes(const RecordPair& x, const RecordPair& y) {
  int changed = 0;
  for (int i = 0; i < x.left.schema().size(); ++i) changed += x.left.value(i) != y.left.value(i);
  for (int i = 0; i < x.right.schema().size(); ++i) {
    changed += x.right.value(i) != y.right.value(i);
  }
  return changed;
}

}  // namespace

std::optional<CounterfactualQuality> MeasureCounterfactuals(
    const RecordPair& original, std::span<const RecordPair> counterfactuals) {
  if (counterfactuals.empty()) return std::nullopt;
  const double attributes =
      static_cast<double>(original.left.schema().size() + original.right.schema().size());
  double distance = 0.0;
  double changed = 0.0;
  for (const auto& cf : counterfactuals) {
    distance += MeanDistance(cf, original);
    changed += ChangedAttributes(cf, original) / attributes;
  }
  const double n = static_cast<double>(counterfactuals.size());
  CounterfactualQuality quality;
  quality.proximity = 1.0 - distance / n;
  quality.sparsity = 1.0 - changed / n;
  if (counterfactuals.size() > 1) {
    double diversity = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < counterfactuals.size(); ++i) {
      for (std::size_t j = i + 1; j < counterfactuals.size(); ++j) {
        diversity += MeanDistance(counterfactuals[i], counterfactuals[j]);
        ++pairs;
      }
    }
    quality.diversity = diversity / static_cast<double>(pairs);
  }
  return quality;
}

MaskingEffect MaskingAnalysis(Classifier& classifier, const Prediction& target,
                              std::span<const double> saliency_u,
                              std::span<const double> saliency_v,
                              std::span<const int> ks) {
  const int h = target.pair.left.schema().size();
  const int k = target.pair.right.schema().size();
  std::vector<RecordPair> batch;
  for (int i = 0; i < h; ++i) {
    batch.push_back({Mask(target.pair.left, AttributeSet::Single(i)), target.pair.right});
  }
  for (int i = 0; i < k; ++i) {
    batch.push_back({target.pair.left, Mask(target.pair.right, AttributeSet::Single(i))});
  }
  auto ranking = RankAttributes(saliency_u, saliency_v);
  for (int top : ks) {
    if (top < 0) throw Error(ErrorCode::kInvalidArgument, "negative k in masking analysis");
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(top), ranking.size());
    batch.push_back(MaskAttributes(target.pair, std::span<const AttributeRef>(ranking.data(), n)));
  }
  auto scores = classifier.PredictBatch(batch);
  MaskingEffect effect;
  std::size_t pos = 0;
  for (int i = 0; i < h; ++i) effect.actual_u.push_back(std::abs(target.score - scores[pos++]));
  for (int i = 0; i < k; ++i) effect.actual_v.push_back(std::abs(target.score - scores[pos++]));
  for (int top : ks) effect.aggregate.emplace_back(top, std::abs(target.score - scores[pos++]));
  return effect;
}

EvaluationReport Evaluate(Classifier& classifier, const Dataset& dataset,
                          const std::string& split, const ExplainerConfig& config) {
  const auto& pairs = dataset.split(split);
  ScoringSession session(classifier);
  EvaluationReport report;
  report.split = split;
  report.rows.resize(pairs.size());
  std::vector<std::vector<RecordPair>> counterfactuals(pairs.size());

  ExplainerConfig per_pair = config;
  per_pair.jobs = pairs.size() > 1 ? 1 : config.jobs;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> fatal(pairs.size());
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
      EvaluationRow& row = report.rows[i];
      row.left_id = pairs[i].left_id;
      row.right_id = pairs[i].right_id;
      row.truth = pairs[i].match;
      try {
        Prediction target = PredictPair(session, dataset.PairOf(pairs[i]));
        row.score = target.score;
        Explanation explanation = Explain(session, target, dataset, per_pair);
        row.explained = true;
        row.saliency_u = explanation.u.saliency;
        row.saliency_v = explanation.v.saliency;
        row.counterfactuals = explanation.counterfactuals.size();
        for (const auto& cf : explanation.counterfactuals) counterfactuals[i].push_back(cf.pair);
        row.quality = MeasureCounterfactuals(target.pair, counterfactuals[i]);
        row.astar_side = explanation.astar_side;
        row.astar = explanation.astar;
        if (explanation.astar_side) {
          const Side side = *explanation.astar_side;
          for (const auto& name : explanation.schema(side).NamesOf(explanation.astar)) {
            row.astar_names.push_back(std::string(DisplayPrefix(side)) + name);
          }
        }
        row.chistar = explanation.chistar;
        row.tagging = explanation.diagnostics.tagging;
        row.triangles_left = explanation.u.triangles;
        row.triangles_right = explanation.v.triangles;
      } catch (const ExplanationUnavailableError& e) {
        row.error = e.what();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kTransport) {
          fatal[i] = std::current_exception();
        } else {
          row.error = e.what();
        }
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)),
                                                    std::max<std::size_t>(pairs.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& error : fatal) {
    if (error) std::rethrow_exception(error);
  }

  std::vector<FaithfulnessItem> items;
  std::vector<ConfidenceSample> samples;
  double proximity = 0.0;
  double sparsity = 0.0;
  double diversity = 0.0;
  std::size_t with_quality = 0;
  std::size_t with_diversity = 0;
  double cf_total = 0.0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    if (!row.explained) continue;
    ++report.explained;
    items.push_back({dataset.PairOf(pairs[i]), row.truth, row.saliency_u, row.saliency_v});
    std::vector<double> features = row.saliency_u;
    features.insert(features.end(), row.saliency_v.begin(), row.saliency_v.end());
    samples.push_back({std::move(features), LabelOf(row.score), row.score});
    cf_total += static_cast<double>(row.counterfactuals);
    if (row.quality) {
      proximity += row.quality->proximity;
      sparsity += row.quality->sparsity;
      ++with_quality;
      if (row.quality->diversity) {
        diversity += *row.quality->diversity;
        ++with_diversity;
      }
    }
  }
  if (report.explained < report.rows.size()) {
    report.notes.push_back(std::to_string(report.rows.size() - report.explained) +
                           " pair(s) could not be explained and are excluded from the "
                           "aggregates");
  }
  if (report.explained > 0) {
    report.avg_counterfactuals = cf_total / static_cast<double>(report.explained);
    try {
      report.faithfulness = Faithfulness(session, items);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidArgument) throw;
      report.notes.push_back(std::string("faithfulness: ") + e.what());
    }
    try {
      report.confidence_mae = ConfidenceIndication(samples);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidArgument) throw;
      report.notes.push_back(std::string("confidence indication: ") + e.what());
    }
  }
  if (with_quality > 0) {
    report.proximity = proximity / static_cast<double>(with_quality);
    report.sparsity = sparsity / static_cast<double>(with_quality);
  }
  if (with_diversity > 0) report.diversity = diversity / static_cast<double>(with_diversity);
  return report;
}

SplitAudit AuditSplit(Classifier& classifier, const Dataset& dataset, const std::string& split,
                      const ExplainerConfig& config) {
  const auto& pairs = dataset.split(split);
  ScoringSession session(classifier);
  std::vector<std::vector<LatticeAudit>> per_pair(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
      try {
        Prediction target = PredictPair(session, dataset.PairOf(pairs[i]));
        TriangleSet triangles = GetTriangles(session, target, dataset, config.triangles);
        per_pair[i] = AuditLattices(session, target.label, triangles.triangles);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)),
                                                    std::max<std::size_t>(pairs.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  SplitAudit audit;
  audit.split = split;
  audit.pairs = pairs.size();
  std::vector<LatticeAudit> lattices;
  for (auto& rows : per_pair) {
    if (rows.empty()) ++audit.pairs_without_triangles;
    lattices.insert(lattices.end(), rows.begin(), rows.end());
  }
  audit.report = SummarizeAudit(std::move(lattices));
  return audit;
}

}  // namespace erx
