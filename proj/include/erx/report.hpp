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

// JSON and Markdown renderings of engine results. Key order is fixed, so
// equal results serialize to identical bytes.

#ifndef ERX_REPORT_HPP_
#define ERX_REPORT_HPP_

#include <string>

#include <json.hpp>

#include "erx/explainer.hpp"
#include "erx/metrics.hpp"

namespace erx {

using Json = nlohmann::ordered_json;

Json DatasetSummaryJson(const Dataset& dataset);

Json RecordJson(const Record& record);

Json ExplanationJson(const Explanation& explanation);
std::string ExplanationMarkdown(const Explanation& explanation);

Json UnavailableJson(const Prediction& target, const ExplanationUnavailableError& error);

Json TrianglesJson(const Prediction& target, const TriangleSet& triangles);

Json MaskingJson(const Prediction& target, const MaskingEffect& effect);
std::string MaskingMarkdown(const Prediction& target, const MaskingEffect& effect);

Json AuditJson(const SplitAudit& audit);
std::string AuditMarkdown(const SplitAudit& audit);

Json EvaluationJson(const EvaluationReport& report);
std::string EvaluationMarkdown(const EvaluationReport& report);

// "L_name" / "R_name".
std::string DisplayName(Side side, const std::string& attribute);

}  // namespace erx

#endif  // ERX_REPORT_HPP_
