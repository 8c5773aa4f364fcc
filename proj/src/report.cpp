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

#include "erx/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace erx {

namespace {

std::string Fixed(double value, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

std::string Optional(const std::optional<double>& value) {
  return value ? Fixed(*value) : "n/a";
}

Json OptionalJson(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::string Cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out.empty() ? " " : out;
}

std::string_view SourceName(TagSource source) {
  switch (source) {
    case TagSource::kAxiomatic: return "axiomatic";
    case TagSource::kComputed: return "computed";
    case TagSource::kInferred: return "inferred";
    case TagSource::kNone: break;
  }
  return "none";
}

Json NamesJson(const Schema& schema, AttributeSet set) {
  Json names = Json::array();
  for (const auto& name : schema.NamesOf(set)) names.push_back(DisplayName(schema.side(), name));
  return names;
}

std::string NamesText(const Schema& schema, AttributeSet set) {
  std::string text = "{";
  bool first = true;
  for (const auto& name : schema.NamesOf(set)) {
    if (!first) text += ", ";
    text += DisplayName(schema.side(), name);
    first = false;
  }
  return text + "}";
}

Json StatsJson(const PredictionStats& stats) {
  return Json{{"expected", stats.expected},
              {"performed", stats.performed},
              {"inferred", stats.inferred},
              {"saved", stats.saved}};
}

Json SideReportJson(const TriangleSideReport& side) {
  return Json{{"requested", side.requested},
              {"found", side.found},
              {"foundAugmented", side.found_augmented},
              {"shortfall", side.shortfall},
              {"shortfallBeforeAugmentation", side.shortfall_before_augmentation},
              {"scoredCandidates", side.scored_candidates},
              {"scoredAugmented", side.scored_augmented}};
}

Json TargetJson(const Prediction& target) {
  return Json{{"left", target.pair.left.id()},
              {"right", target.pair.right.id()},
              {"score", target.score},
              {"label", target.label ? "match" : "non-match"}};
}

Json DiagnosticsJson(const Explanation& e) {
  const auto& d = e.diagnostics;
  return Json{{"triangles", {{"left", SideReportJson(d.left)}, {"right", SideReportJson(d.right)}}},
              {"flips", {{"U", e.u.flips}, {"V", e.v.flips}}},
              {"tagging", StatsJson(d.tagging)},
              {"verificationPredictions", d.verification_predictions},
              {"oracleCalls", d.oracle_calls},
              {"counterfactualsQualifying", d.cf_qualifying},
              {"counterfactualsValidated", d.cf_validated},
              {"fullSchemaOnly", d.full_schema_only}};
}

std::vector<std::pair<std::string, double>> RankedSaliency(const Explanation& e) {
  std::vector<std::pair<std::string, double>> ranked;
  for (Side side : {Side::kU, Side::kV}) {
    const Schema& schema = e.schema(side);
    const auto& saliency = e.counters(side).saliency;
    for (int i = 0; i < schema.size(); ++i) {
      ranked.emplace_back(DisplayName(side, schema.attribute(i)), saliency[i]);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

}  // namespace

std::string DisplayName(Side side, const std::string& attribute) {
  return std::string(DisplayPrefix(side)) + attribute;
}

Json DatasetSummaryJson(const Dataset& dataset) {
  Json out;
  for (Side side : {Side::kU, Side::kV}) {
    out[side == Side::kU ? "tableA" : "tableB"] = {
        {"side", SideName(side)},
        {"records", dataset.table(side).size()},
        {"attributes", dataset.schema(side).attributes()}};
  }
  Json splits = Json::object();
  for (const auto& [name, pairs] : dataset.splits()) {
    const auto positives = std::count_if(pairs.begin(), pairs.end(),
                                         [](const LabeledPair& p) { return p.match; });
    splits[name] = {{"pairs", pairs.size()}, {"matches", positives}};
  }
  out["splits"] = std::move(splits);
  return out;
}

Json RecordJson(const Record& record) {
  Json values = Json::object();
  const Schema& schema = record.schema();
  for (int i = 0; i < schema.size(); ++i) values[schema.attribute(i)] = record.value(i);
  return values;
}

Json ExplanationJson(const Explanation& e) {
  Json out;
  out["prediction"] = TargetJson(e.target);
  Json saliency = Json::object();
  for (Side side : {Side::kU, Side::kV}) {
    const Schema& schema = e.schema(side);
    for (int i = 0; i < schema.size(); ++i) {
      saliency[DisplayName(side, schema.attribute(i))] = e.counters(side).saliency[i];
    }
  }
  out["saliency"] = std::move(saliency);

  Json counterfactuals = Json::array();
  for (const auto& cf : e.counterfactuals) {
    counterfactuals.push_back({{"side", SideName(cf.side)},
                               {"changed", NamesJson(e.schema(cf.side), cf.changed)},
                               {"support", cf.support_id},
                               {"source", SourceName(cf.source)},
                               {"score", cf.score},
                               {"left", RecordJson(cf.pair.left)},
                               {"right", RecordJson(cf.pair.right)}});
  }
  out["counterfactuals"] = std::move(counterfactuals);
  out["astar"] = e.astar_side ? NamesJson(e.schema(*e.astar_side), e.astar) : Json::array();
  out["astarSide"] = e.astar_side ? Json(SideName(*e.astar_side)) : Json(nullptr);
  out["chistar"] = e.chistar;

  Json sufficiency = Json::object();
  for (Side side : {Side::kU, Side::kV}) {
    const auto& c = e.counters(side);
    std::vector<AttributeSet> subsets;
    for (std::uint32_t bits = 1; bits < c.sufficiency.size(); ++bits) {
      if (c.sufficiency[bits] > 0) subsets.emplace_back(bits);
    }
    std::sort(subsets.begin(), subsets.end(), SubsetOrderLess);
    Json entries = Json::array();
    for (AttributeSet set : subsets) {
      entries.push_back({{"attributes", NamesJson(e.schema(side), set)},
                         {"flips", c.sufficiency[set.bits()]},
                         {"chi", e.Chi(side, set)}});
    }
    sufficiency[SideName(side)] = std::move(entries);
  }
  out["sufficiency"] = std::move(sufficiency);
  out["diagnostics"] = DiagnosticsJson(e);
  return out;
}

std::string ExplanationMarkdown(const Explanation& e) {
  std::ostringstream md;
  md << "# Explanation for (" << e.target.pair.left.id() << ", " << e.target.pair.right.id()
     << ")\n\n";
  md << "Prediction: " << (e.target.label ? "match" : "non-match") << " (score "
     << Fixed(e.target.score) << ")\n\n";

  md << "## Saliency\n\n| Rank | Attribute | Saliency |\n|---:|---|---:|\n";
  int rank = 1;
  for (const auto& [name, value] : RankedSaliency(e)) {
    md << "| " << rank++ << " | " << Cell(name) << " | " << Fixed(value) << " |\n";
  }

  md << "\n## Counterfactuals\n\n";
  if (!e.astar_side) {
    md << "No proper attribute subset flips the prediction; only replacing the full schema "
          "does.\n";
    return md.str();
  }
  md << "A* = " << NamesText(e.schema(*e.astar_side), e.astar) << " (side "
     << SideName(*e.astar_side) << "), chi* = " << Fixed(e.chistar) << ", "
     << e.counterfactuals.size() << " of " << e.diagnostics.cf_validated
     << " validated counterfactuals shown.\n";
  for (std::size_t n = 0; n < e.counterfactuals.size(); ++n) {
    const auto& cf = e.counterfactuals[n];
    md << "\n### Counterfactual " << n + 1 << " (score " << Fixed(cf.score) << ", support "
       << cf.support_id << ")\n\n| Attribute | Original | Counterfactual |\n|---|---|---|\n";
    for (Side side : {Side::kU, Side::kV}) {
      const Record& original = side == Side::kU ? e.target.pair.left : e.target.pair.right;
      const Record& changed = side == Side::kU ? cf.pair.left : cf.pair.right;
      for (int i = 0; i < original.schema().size(); ++i) {
        const bool bold = side == cf.side && cf.changed.contains(i);
        md << "| " << Cell(DisplayName(side, original.schema().attribute(i))) << " | "
           << Cell(original.value(i)) << " | ";
        if (bold) {
          md << "**" << Cell(changed.value(i)) << "**";
        } else {
          md << Cell(changed.value(i));
        }
        md << " |\n";
      }
    }
  }
  return md.str();
}

Json UnavailableJson(const Prediction& target, const ExplanationUnavailableError& error) {
  Explanation shell;
  shell.target = target;
  shell.diagnostics = error.diagnostics();
  return Json{{"prediction", TargetJson(target)},
              {"error", {{"code", ErrorCodeName(error.code())}, {"message", error.what()}}},
              {"diagnostics", DiagnosticsJson(shell)}};
}

Json TrianglesJson(const Prediction& target, const TriangleSet& triangles) {
  Json list = Json::array();
  for (const auto& t : triangles.triangles) {
    list.push_back({{"kind", t.kind == OpenTriangle::Kind::kLeft ? "left" : "right"},
                    {"free", t.free.id()},
                    {"pivot", t.pivot.id()},
                    {"support", t.support.id()},
                    {"supportScore", t.support_score},
                    {"augmented", t.augmented}});
  }
  return Json{{"prediction", TargetJson(target)},
              {"left", SideReportJson(triangles.left)},
              {"right", SideReportJson(triangles.right)},
              {"total", triangles.triangles.size()},
              {"triangles", std::move(list)}};
}

Json MaskingJson(const Prediction& target, const MaskingEffect& effect) {
  Json actual = Json::object();
  for (std::size_t i = 0; i < effect.actual_u.size(); ++i) {
    actual[DisplayName(Side::kU, target.pair.left.schema().attribute(static_cast<int>(i)))] =
        effect.actual_u[i];
  }
  for (std::size_t i = 0; i < effect.actual_v.size(); ++i) {
    actual[DisplayName(Side::kV, target.pair.right.schema().attribute(static_cast<int>(i)))] =
        effect.actual_v[i];
  }
  Json aggregate = Json::array();
  for (const auto& [k, value] : effect.aggregate) {
    aggregate.push_back({{"k", k}, {"effect", value}});
  }
  return Json{{"actual", std::move(actual)}, {"aggregate", std::move(aggregate)}};
}

std::string MaskingMarkdown(const Prediction& target, const MaskingEffect& effect) {
  std::ostringstream md;
  md << "## Masking effect\n\n| Attribute | Actual |\n|---|---:|\n";
  for (std::size_t i = 0; i < effect.actual_u.size(); ++i) {
    md << "| " << Cell(DisplayName(Side::kU, target.pair.left.schema().attribute(static_cast<int>(i))))
       << " | " << Fixed(effect.actual_u[i]) << " |\n";
  }
  for (std::size_t i = 0; i < effect.actual_v.size(); ++i) {
    md << "| " << Cell(DisplayName(Side::kV, target.pair.right.schema().attribute(static_cast<int>(i))))
       << " | " << Fixed(effect.actual_v[i]) << " |\n";
  }
  md << "\n| k | Aggr@k |\n|---:|---:|\n";
  for (const auto& [k, value] : effect.aggregate) md << "| " << k << " | " << Fixed(value) << " |\n";
  return md.str();
}

Json AuditJson(const SplitAudit& audit) {
  auto row = [](const AuditSummary& s) {
    return Json{{"attributes", s.attributes},
                {"lattices", s.lattices},
                {"expected", s.expected},
                {"performed", s.performed},
                {"saved", s.saved},
                {"errorRate", s.error_rate}};
  };
  Json rows = Json::array();
  for (const auto& s : audit.report.by_attributes) rows.push_back(row(s));
  Json overall = row(audit.report.overall);
  overall.erase("attributes");
  return Json{{"split", audit.split},
              {"pairs", audit.pairs},
              {"pairsWithoutTriangles", audit.pairs_without_triangles},
              {"rows", std::move(rows)},
              {"overall", std::move(overall)}};
}

std::string AuditMarkdown(const SplitAudit& audit) {
  std::ostringstream md;
  md << "# Monotonicity audit (" << audit.split << ")\n\n"
     << audit.pairs << " pairs, " << audit.report.overall.lattices << " lattices.\n\n"
     << "| Attributes | Lattices | Expected | Performed | Saved | Error rate |\n"
     << "|---:|---:|---:|---:|---:|---:|\n";
  auto line = [&](const std::string& label, const AuditSummary& s) {
    md << "| " << label << " | " << s.lattices << " | " << Fixed(s.expected, 2) << " | "
       << Fixed(s.performed, 2) << " | " << Fixed(s.saved, 2) << " | " << Fixed(s.error_rate)
       << " |\n";
  };
  for (const auto& s : audit.report.by_attributes) line(std::to_string(s.attributes), s);
  line("all", audit.report.overall);
  return md.str();
}

Json EvaluationJson(const EvaluationReport& report) {
  Json faithfulness = nullptr;
  if (report.faithfulness) {
    Json curve = Json::array();
    for (std::size_t i = 0; i < report.faithfulness->thresholds.size(); ++i) {
      curve.push_back({{"threshold", report.faithfulness->thresholds[i]},
                       {"f1", report.faithfulness->f1[i]}});
    }
    faithfulness = {{"auc", report.faithfulness->auc}, {"curve", std::move(curve)}};
  }
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r{{"left", row.left_id},
           {"right", row.right_id},
           {"truth", row.truth},
           {"score", row.score},
           {"explained", row.explained}};
    if (!row.explained) {
      r["error"] = row.error;
      rows.push_back(std::move(r));
      continue;
    }
    r["saliencyU"] = row.saliency_u;
    r["saliencyV"] = row.saliency_v;
    r["counterfactuals"] = row.counterfactuals;
    r["proximity"] = row.quality ? Json(row.quality->proximity) : Json(nullptr);
    r["sparsity"] = row.quality ? Json(row.quality->sparsity) : Json(nullptr);
    r["diversity"] =
        row.quality ? OptionalJson(row.quality->diversity) : Json(nullptr);
    r["astarSide"] = row.astar_side ? Json(SideName(*row.astar_side)) : Json(nullptr);
    r["astar"] = row.astar_names;
    r["chistar"] = row.chistar;
    r["trianglesLeft"] = row.triangles_left;
    r["trianglesRight"] = row.triangles_right;
    r["tagging"] = StatsJson(row.tagging);
    rows.push_back(std::move(r));
  }
  return Json{{"split", report.split},
              {"pairs", report.rows.size()},
              {"explained", report.explained},
              {"faithfulness", std::move(faithfulness)},
              {"confidenceIndication", OptionalJson(report.confidence_mae)},
              {"proximity", OptionalJson(report.proximity)},
              {"sparsity", OptionalJson(report.sparsity)},
              {"diversity", OptionalJson(report.diversity)},
              {"avgCounterfactuals", report.avg_counterfactuals},
              {"notes", report.notes},
              {"rows", std::move(rows)}};
}

std::string EvaluationMarkdown(const EvaluationReport& report) {
  std::ostringstream md;
  md << "# Evaluation (" << report.split << ")\n\n"
     << "| Pairs | Explained | Faithfulness | CI | Proximity | Sparsity | Diversity | #CF |\n"
     << "|---:|---:|---:|---:|---:|---:|---:|---:|\n"
     << "| " << report.rows.size() << " | " << report.explained << " | "
     << (report.faithfulness ? Fixed(report.faithfulness->auc) : "n/a") << " | "
     << Optional(report.confidence_mae) << " | " << Optional(report.proximity) << " | "
     << Optional(report.sparsity) << " | " << Optional(report.diversity) << " | "
     << Fixed(report.avg_counterfactuals, 2) << " |\n";
  md << "\n| Left | Right | Truth | Score | #CF | chi* | Status |\n"
     << "|---|---|---|---:|---:|---:|---|\n";
  for (const auto& row : report.rows) {
    md << "| " << Cell(row.left_id) << " | " << Cell(row.right_id) << " | "
       << (row.truth ? "match" : "non-match") << " | " << Fixed(row.score) << " | "
       << row.counterfactuals << " | " << Fixed(row.chistar) << " | "
       << (row.explained ? "ok" : Cell(row.error)) << " |\n";
  }
  if (!report.notes.empty()) {
    md << "\n";
    for (const auto& note : report.notes) md << "- " << note << "\n";
  }
  return md.str();
}

}  // namespace erx
