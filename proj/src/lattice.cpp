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

#include "erx/lattice.hpp"

#include <algorithm>
#include <map>

#include "erx/perturbation.hpp"

namespace erx {

AttributeLattice::AttributeLattice(OpenTriangle triangle)
    : triangle_(std::move(triangle)), num_attributes_(triangle_.num_attributes()) {
  const std::size_t nodes = std::size_t{1} << num_attributes_;
  tags_.assign(nodes, NodeTag::kUntagged);
  sources_.assign(nodes, TagSource::kNone);
  SetTag(AttributeSet(), NodeTag::kNonFlip, TagSource::kAxiomatic);
  SetTag(top(), NodeTag::kFlip, TagSource::kAxiomatic);
}

std::size_t AttributeLattice::CountUntagged() const {
  return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), NodeTag::kUntagged));
}

std::vector<AttributeSet> AttributeLattice::Level(int size) const {
  std::vector<AttributeSet> level;
  for (std::uint32_t bits = 0; bits < tags_.size(); ++bits) {
    if (AttributeSet(bits).size() == size) level.emplace_back(bits);
  }
  return level;
}

RecordPair AttributeLattice::Materialize(AttributeSet node) const {
  return triangle_.PairWith(PerturbRecord(triangle_.free, triangle_.support, node));
}

PredictionStats TagLattice(AttributeLattice& lattice, Classifier& classifier,
                           bool explained_label, bool pruning) {
  const int l = lattice.num_attributes();
  PredictionStats stats;
  stats.attributes = l;
  stats.expected = (std::uint64_t{1} << l) - 2;
  const std::uint32_t full = lattice.top().bits();

  for (int size = 1; size < l; ++size) {
    std::vector<AttributeSet> pending;
    for (AttributeSet node : lattice.Level(size)) {
      if (lattice.tag(node) == NodeTag::kUntagged) pending.push_back(node);
    }
    if (pending.empty()) continue;

    std::vector<RecordPair> batch;
    batch.reserve(pending.size());
    for (AttributeSet node : pending) batch.push_back(lattice.Materialize(node));
    std::vector<double> scores;
    try {
      scores = classifier.PredictBatch(batch);
    } catch (const Error& e) {
      stats.saved = stats.expected - stats.performed;
      throw PartialTaggingError(e.code(), e.what(), stats);
    }
    if (scores.size() != batch.size()) {
      stats.saved = stats.expected - stats.performed;
      throw PartialTaggingError(ErrorCode::kOracle, "classifier returned a short batch", stats);
    }

    for (std::size_t i = 0; i < pending.size(); ++i) {
      bool flip = LabelOf(scores[i]) != explained_label;
      lattice.SetTag(pending[i], flip ? NodeTag::kFlip : NodeTag::kNonFlip,
                     TagSource::kComputed);
      ++stats.performed;
    }
    if (!pruning) continue;
    // Propagate between levels; nodes within a level are incomparable.
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (lattice.tag(pending[i]) != NodeTag::kFlip) continue;
      const std::uint32_t base = pending[i].bits();
      for (std::uint32_t s = (base + 1) | base; s <= full && s != base; s = (s + 1) | base) {
        AttributeSet sup(s);
        if (lattice.tag(sup) == NodeTag::kUntagged) {
          lattice.SetTag(sup, NodeTag::kFlip, TagSource::kInferred);
          ++stats.inferred;
        }
        if (s == full) break;
      }
    }
  }
  stats.saved = stats.expected - stats.performed;
  return stats;
}

std::vector<AttributeSet> LargestMinimalFlippingAntichain(const AttributeLattice& lattice) {
  const int l = lattice.num_attributes();
  const std::size_t nodes = lattice.num_nodes();
  // flip_below[m]: some strict subset of m is tagged flip.
  std::vector<std::uint8_t> flip_below(nodes, 0);
  std::vector<AttributeSet> order;
  order.reserve(nodes);
  for (std::uint32_t bits = 0; bits < nodes; ++bits) order.emplace_back(bits);
  std::sort(order.begin(), order.end(), SubsetOrderLess);

  std::vector<AttributeSet> antichain;
  for (AttributeSet node : order) {
    for (int i = 0; i < l && !flip_below[node.bits()]; ++i) {
      if (!node.contains(i)) continue;
      AttributeSet sub = node.without(i);
      if (flip_below[sub.bits()] || lattice.tag(sub) == NodeTag::kFlip) {
        flip_below[node.bits()] = 1;
      }
    }
    if (lattice.tag(node) == NodeTag::kFlip && !flip_below[node.bits()]) {
      antichain.push_back(node);
    }
  }
  return antichain;
}

std::vector<FlippedNode> GetFlipped(const AttributeLattice& lattice) {
  std::vector<AttributeSet> order;
  for (std::uint32_t bits = 0; bits < lattice.num_nodes(); ++bits) {
    if (lattice.tag(AttributeSet(bits)) == NodeTag::kFlip) order.emplace_back(bits);
  }
  std::sort(order.begin(), order.end(), SubsetOrderLess);
  std::vector<FlippedNode> flipped;
  flipped.reserve(order.size());
  for (AttributeSet node : order) {
    flipped.push_back(FlippedNode{node, lattice.Materialize(node), lattice.source(node),
                                  node != lattice.top()});
  }
  return flipped;
}

std::vector<LatticeAudit> AuditLattices(Classifier& classifier, bool explained_label,
                                        std::span<const OpenTriangle> triangles) {
  std::vector<LatticeAudit> audits;
  audits.reserve(triangles.size());
  for (const auto& triangle : triangles) {
    AttributeLattice pruned(triangle);
    AttributeLattice exhaustive(triangle);
    PredictionStats stats = TagLattice(pruned, classifier, explained_label, true);
    TagLattice(exhaustive, classifier, explained_label, false);

    LatticeAudit audit;
    audit.kind = triangle.kind;
    audit.attributes = stats.attributes;
    audit.expected = stats.expected;
    audit.performed = stats.performed;
    audit.saved = stats.saved;
    for (std::uint32_t bits = 0; bits < pruned.num_nodes(); ++bits) {
      AttributeSet node(bits);
      if (pruned.source(node) == TagSource::kInferred &&
          pruned.tag(node) != exhaustive.tag(node)) {
        ++audit.mismatches;
      }
    }
    audit.error_rate = audit.saved == 0 ? 0.0
                                        : static_cast<double>(audit.mismatches) /
                                              static_cast<double>(audit.saved);
    audits.push_back(audit);
  }
  return audits;
}

namespace {

AuditSummary Average(int attributes, const std::vector<const LatticeAudit*>& rows) {
  AuditSummary summary;
  summary.attributes = attributes;
  summary.lattices = rows.size();
  if (rows.empty()) return summary;
  for (const auto* row : rows) {
    summary.expected += static_cast<double>(row->expected);
    summary.performed += static_cast<double>(row->performed);
    summary.saved += static_cast<double>(row->saved);
    summary.error_rate += row->error_rate;
  }
  const double n = static_cast<double>(rows.size());
  summary.expected /= n;
  summary.performed /= n;
  summary.saved /= n;
  summary.error_rate /= n;
  return summary;
}

}  // namespace

AuditReport SummarizeAudit(std::vector<LatticeAudit> lattices) {
  AuditReport report;
  report.lattices = std::move(lattices);
  std::map<int, std::vector<const LatticeAudit*>> groups;
  std::vector<const LatticeAudit*> all;
  for (const auto& row : report.lattices) {
    groups[row.attributes].push_back(&row);
    all.push_back(&row);
  }
  for (const auto& [attributes, rows] : groups) {
    report.by_attributes.push_back(Average(attributes, rows));
  }
  report.overall = Average(0, all);
  return report;
}

}  // namespace erx
