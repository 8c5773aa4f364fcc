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

// Attribute-subset lattices over one open triangle.
//
// Node A stands for the perturbation that copies attributes A from the
// support into the free record. A node is tagged "flip" when the perturbed
// pair's label differs from the explained prediction's label. The empty set
// is a non-flip and the full set is a flip by construction, so neither is
// ever scored.
//
// Tagging walks the lattice bottom-up one level (subset size) at a time and
// scores every untagged node of a level in one batch. With pruning, a
// computed flip is propagated to all of its strict supersets, which is sound
// when the classifier is monotone in the copied attributes.

#ifndef ERX_LATTICE_HPP_
#define ERX_LATTICE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "erx/classifier.hpp"
#include "erx/triangles.hpp"

namespace erx {

enum class NodeTag : std::uint8_t { kUntagged, kFlip, kNonFlip };
enum class TagSource : std::uint8_t { kNone, kAxiomatic, kComputed, kInferred };

struct PredictionStats {
  int attributes = 0;
  std::uint64_t expected = 0;   // 2^l - 2
  std::uint64_t performed = 0;  // nodes tagged by scoring
  std::uint64_t inferred = 0;   // nodes tagged by propagation
  std::uint64_t saved = 0;      // expected - performed

  PredictionStats& operator+=(const PredictionStats& other) {
    expected += other.expected;
    performed += other.performed;
    inferred += other.inferred;
    saved += other.saved;
    return *this;
  }
};

class AttributeLattice {
 public:
  // Builds the lattice for `triangle`: the empty set tagged non-flip and
  // the full set tagged flip (both axiomatic), everything else untagged.
  explicit AttributeLattice(OpenTriangle triangle);

  int num_attributes() const { return num_attributes_; }
  std::size_t num_nodes() const { return tags_.size(); }
  AttributeSet top() const { return AttributeSet::Full(num_attributes_); }
  const OpenTriangle& triangle() const { return triangle_; }

  NodeTag tag(AttributeSet node) const { return tags_[node.bits()]; }
  TagSource source(AttributeSet node) const { return sources_[node.bits()]; }
  void SetTag(AttributeSet node, NodeTag tag, TagSource source) {
    tags_[node.bits()] = tag;
    sources_[node.bits()] = source;
  }
  std::size_t CountUntagged() const;
  bool fully_tagged() const { return CountUntagged() == 0; }

  // All nodes of one size, in subset order.
  std::vector<AttributeSet> Level(int size) const;

  // The pair scored for node A: <psi(free, support, A), pivot> in U/V order.
  RecordPair Materialize(AttributeSet node) const;

 private:
  OpenTriangle triangle_;
  int num_attributes_;
  std::vector<NodeTag> tags_;
  std::vector<TagSource> sources_;
};

// Raised when the classifier fails mid-way; carries the work done so far.
class PartialTaggingError : public Error {
 public:
  PartialTaggingError(ErrorCode code, const std::string& message, PredictionStats stats)
      : Error(code, message), stats_(stats) {}
  const PredictionStats& stats() const { return stats_; }

 private:
  PredictionStats stats_;
};

// `explained_label` is the label of the prediction being explained.
PredictionStats TagLattice(AttributeLattice& lattice, Classifier& classifier,
                           bool explained_label, bool pruning);

// Inclusion-minimal flip nodes, in subset order. Under upward-closed tags
// this is the unique largest minimal flipping antichain.
std::vector<AttributeSet> LargestMinimalFlippingAntichain(const AttributeLattice& lattice);

struct FlippedNode {
  AttributeSet changed;
  RecordPair pair;
  TagSource source = TagSource::kNone;
  // False for the full attribute set, which is never a counterfactual.
  bool candidate = true;
};

// Every flip-tagged node, including the axiomatic top, in subset order.
std::vector<FlippedNode> GetFlipped(const AttributeLattice& lattice);

struct LatticeAudit {
  OpenTriangle::Kind kind = OpenTriangle::Kind::kLeft;
  int attributes = 0;
  std::uint64_t expected = 0;
  std::uint64_t performed = 0;  // with pruning
  std::uint64_t saved = 0;
  std::uint64_t mismatches = 0;  // inferred tags contradicted by scoring
  double error_rate = 0.0;       // mismatches / saved, 0 when nothing saved
};

struct AuditSummary {
  int attributes = 0;  // 0 for the all-lattices row
  std::size_t lattices = 0;
  double expected = 0.0;
  double performed = 0.0;
  double saved = 0.0;
  double error_rate = 0.0;
};

struct AuditReport {
  std::vector<LatticeAudit> lattices;
  std::vector<AuditSummary> by_attributes;  // ascending attribute count
  AuditSummary overall;
};

// Tags the lattice of every triangle twice, with and without pruning.
std::vector<LatticeAudit> AuditLattices(Classifier& classifier, bool explained_label,
                                        std::span<const OpenTriangle> triangles);
AuditReport SummarizeAudit(std::vector<LatticeAudit> lattices);

inline AuditReport AuditMonotonicity(Classifier& classifier, const Prediction& target,
                                     std::span<const OpenTriangle> triangles) {
  return SummarizeAudit(AuditLattices(classifier, target.label, triangles));
}

}  // namespace erx

#endif  // ERX_LATTICE_HPP_
