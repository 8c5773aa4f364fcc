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

#include "erx/erx.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "erx/bridge.hpp"
#include "erx/report.hpp"

struct erx_dataset {
  erx::Dataset dataset;
};

struct erx_classifier {
  std::unique_ptr<erx::Classifier> inner;
  std::unique_ptr<erx::ScoringSession> session;
};

namespace {

thread_local std::string last_error;

erx_status StatusOf(erx::ErrorCode code) {
  switch (code) {
    case erx::ErrorCode::kInvalidArgument: return ERX_INVALID_ARGUMENT;
    case erx::ErrorCode::kLoad: return ERX_LOAD_ERROR;
    case erx::ErrorCode::kParse: return ERX_PARSE_ERROR;
    case erx::ErrorCode::kTransport: return ERX_TRANSPORT_ERROR;
    case erx::ErrorCode::kProtocol: return ERX_PROTOCOL_ERROR;
    case erx::ErrorCode::kExplanationUnavailable: return ERX_EXPLANATION_UNAVAILABLE;
    case erx::ErrorCode::kOracle: return ERX_ORACLE_ERROR;
    case erx::ErrorCode::kInternal: break;
  }
  return ERX_INTERNAL_ERROR;
}

erx_status Fail(erx_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename Fn>
erx_status Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const erx::Error& e) {
    return Fail(StatusOf(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(ERX_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return Fail(ERX_INTERNAL_ERROR, e.what());
  } catch (...) {
    return Fail(ERX_INTERNAL_ERROR, "unknown failure");
  }
}

char* Duplicate(const std::string& text) {
  char* copy = static_cast<char*>(std::malloc(text.size() + 1));
  if (copy == nullptr) throw std::bad_alloc();
  std::memcpy(copy, text.c_str(), text.size() + 1);
  return copy;
}

void Require(bool condition, const char* message) {
  if (!condition) throw erx::Error(erx::ErrorCode::kInvalidArgument, message);
}

erx::ExplainerConfig ConfigOf(const erx_config* config) {
  erx_config defaults;
  erx_config_init(&defaults);
  const erx_config& c = config != nullptr ? *config : defaults;
  if (c.tau < 2 || c.tau % 2 != 0) {
    throw erx::Error(erx::ErrorCode::kInvalidArgument,
                     "tau must be even and at least 2, got " + std::to_string(c.tau));
  }
  Require(c.jobs >= 1, "jobs must be at least 1");
  erx::ExplainerConfig out;
  out.triangles.tau = c.tau;
  out.triangles.seed = c.seed;
  out.triangles.allow_augment = c.augment != 0;
  out.pruning = c.prune != 0;
  out.cf_cap = c.cf_cap;
  out.global_flip_count = c.global_flip_count != 0;
  out.jobs = c.jobs;
  return out;
}

erx_format FormatOf(const erx_config* config) {
  return config != nullptr ? config->format : ERX_FORMAT_JSON;
}

std::string Render(const erx::Json& json) { return json.dump(2) + "\n"; }

erx::Prediction Target(erx_classifier* classifier, const erx_dataset* dataset,
                       const char* left_id, const char* right_id) {
  Require(left_id != nullptr && right_id != nullptr, "pair ids must not be null");
  erx::RecordPair pair{dataset->dataset.Require(erx::Side::kU, left_id),
                       dataset->dataset.Require(erx::Side::kV, right_id)};
  return erx::PredictPair(*classifier->session, std::move(pair));
}

}  // namespace

extern "C" {

const char* erx_version(void) { return "0.1.0"; }

const char* erx_status_name(erx_status status) {
  switch (status) {
    case ERX_OK: return "ok";
    case ERX_INVALID_ARGUMENT: return "invalid_argument";
    case ERX_LOAD_ERROR: return "load_error";
    case ERX_PARSE_ERROR: return "parse_error";
    case ERX_TRANSPORT_ERROR: return "transport_error";
    case ERX_PROTOCOL_ERROR: return "protocol_error";
    case ERX_EXPLANATION_UNAVAILABLE: return "explanation_unavailable";
    case ERX_ORACLE_ERROR: return "oracle_error";
    case ERX_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* erx_last_error(void) { return last_error.c_str(); }

void erx_string_free(char* text) { std::free(text); }

void erx_config_init(erx_config* config) {
  if (config == nullptr) return;
  config->tau = erx::kDefaultTriangles;
  config->seed = 0;
  config->augment = 1;
  config->prune = 1;
  config->cf_cap = 10;
  config->global_flip_count = 0;
  config->jobs = 1;
  config->format = ERX_FORMAT_JSON;
}

erx_status erx_dataset_load(const char* directory, erx_dataset** out) {
  return Guard([&] {
    Require(directory != nullptr && out != nullptr, "directory and out must not be null");
    *out = new erx_dataset{erx::LoadDataset(directory)};
    return ERX_OK;
  });
}

void erx_dataset_free(erx_dataset* dataset) { delete dataset; }

erx_status erx_dataset_summary(const erx_dataset* dataset, char** out) {
  return Guard([&] {
    Require(dataset != nullptr && out != nullptr, "dataset and out must not be null");
    *out = Duplicate(Render(erx::DatasetSummaryJson(dataset->dataset)));
    return ERX_OK;
  });
}

erx_status erx_select_pairs(const erx_dataset* dataset, const char* selector, char** out) {
  return Guard([&] {
    Require(dataset != nullptr && selector != nullptr && out != nullptr,
            "dataset, selector and out must not be null");
    erx::Json list = erx::Json::array();
    for (const auto& s : erx::SelectPairs(dataset->dataset, selector)) {
      list.push_back({{"name", s.name},
                      {"split", s.split},
                      {"left", s.pair.left_id},
                      {"right", s.pair.right_id},
                      {"label", s.pair.match}});
    }
    *out = Duplicate(list.dump() + "\n");
    return ERX_OK;
  });
}

erx_status erx_classifier_create_ex(const char* spec, int timeout_ms, int retries,
                                    erx_classifier** out) {
  return Guard([&] {
    Require(spec != nullptr && out != nullptr, "spec and out must not be null");
    Require(timeout_ms > 0 && retries >= 0, "timeout must be positive and retries non-negative");
    const std::string text(spec);
    erx::BridgeOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    options.retries = retries;
    auto handle = std::make_unique<erx_classifier>();
    if (text == "reference") {
      handle->inner = std::make_unique<erx::ReferenceClassifier>();
    } else if (text.starts_with("bridge:") && text.size() > 7) {
      auto bridge = std::make_unique<erx::ProcessBridgeClassifier>(text.substr(7), options);
      bridge->Connect();
      handle->inner = std::move(bridge);
    } else if (text.starts_with("http:") && text.size() > 5) {
      auto bridge = std::make_unique<erx::HttpBridgeClassifier>(text.substr(5), options);
      bridge->Connect();
      handle->inner = std::move(bridge);
    } else {
      return Fail(ERX_INVALID_ARGUMENT, "unknown classifier spec '" + text +
                                            "' (expected reference, bridge:<cmd> or http:<url>)");
    }
    handle->session = std::make_unique<erx::ScoringSession>(*handle->inner);
    *out = handle.release();
    return ERX_OK;
  });
}

erx_status erx_classifier_create(const char* spec, erx_classifier** out) {
  const erx::BridgeOptions defaults;
  return erx_classifier_create_ex(spec, static_cast<int>(defaults.timeout.count()),
                                  defaults.retries, out);
}

void erx_classifier_free(erx_classifier* classifier) {
  if (classifier == nullptr) return;
  classifier->session.reset();
  delete classifier;
}

erx_status erx_classifier_score(erx_classifier* classifier, const erx_dataset* dataset,
                                const char* left_id, const char* right_id, double* out) {
  return Guard([&] {
    Require(classifier != nullptr && dataset != nullptr && out != nullptr,
            "classifier, dataset and out must not be null");
    *out = Target(classifier, dataset, left_id, right_id).score;
    return ERX_OK;
  });
}

erx_status erx_explain(erx_classifier* classifier, const erx_dataset* dataset,
                       const char* left_id, const char* right_id, const erx_config* config,
                       const int* masking_ks, size_t num_ks, char** out) {
  return Guard([&] {
    Require(classifier != nullptr && dataset != nullptr && out != nullptr,
            "classifier, dataset and out must not be null");
    const erx::ExplainerConfig cfg = ConfigOf(config);
    const erx::Prediction target = Target(classifier, dataset, left_id, right_id);
    const bool markdown = FormatOf(config) == ERX_FORMAT_MARKDOWN;
    erx::Explanation explanation;
    try {
      explanation = erx::Explain(*classifier->session, target, dataset->dataset, cfg);
    } catch (const erx::ExplanationUnavailableError& e) {
      const erx::Json doc = erx::UnavailableJson(target, e);
      *out = Duplicate(markdown ? "# Explanation for (" + target.pair.left.id() + ", " +
                                      target.pair.right.id() + ")\n\nUnavailable: " +
                                      e.what() + "\n"
                                : Render(doc));
      return Fail(ERX_EXPLANATION_UNAVAILABLE, e.what());
    }
    std::optional<erx::MaskingEffect> masking;
    if (masking_ks != nullptr) {
      masking = erx::MaskingAnalysis(*classifier->session, target, explanation.u.saliency,
                                     explanation.v.saliency,
                                     std::span<const int>(masking_ks, num_ks));
    }
    if (markdown) {
      std::string text = erx::ExplanationMarkdown(explanation);
      if (masking) text += "\n" + erx::MaskingMarkdown(target, *masking);
      *out = Duplicate(text);
    } else {
      erx::Json doc = erx::ExplanationJson(explanation);
      if (masking) doc["masking"] = erx::MaskingJson(target, *masking);
      *out = Duplicate(Render(doc));
    }
    return ERX_OK;
  });
}

erx_status erx_triangles(erx_classifier* classifier, const erx_dataset* dataset,
                         const char* left_id, const char* right_id, const erx_config* config,
                         char** out) {
  return Guard([&] {
    Require(classifier != nullptr && dataset != nullptr && out != nullptr,
            "classifier, dataset and out must not be null");
    const erx::ExplainerConfig cfg = ConfigOf(config);
    const erx::Prediction target = Target(classifier, dataset, left_id, right_id);
    const erx::TriangleSet triangles =
        erx::GetTriangles(*classifier->session, target, dataset->dataset, cfg.triangles);
    *out = Duplicate(Render(erx::TrianglesJson(target, triangles)));
    return ERX_OK;
  });
}

erx_status erx_evaluate(erx_classifier* classifier, const erx_dataset* dataset,
                        const char* split, const erx_config* config, char** out) {
  return Guard([&] {
    Require(classifier != nullptr && dataset != nullptr && split != nullptr && out != nullptr,
            "classifier, dataset, split and out must not be null");
    const erx::EvaluationReport report =
        erx::Evaluate(*classifier->session, dataset->dataset, split, ConfigOf(config));
    *out = Duplicate(FormatOf(config) == ERX_FORMAT_MARKDOWN ? erx::EvaluationMarkdown(report)
                                                             : Render(erx::EvaluationJson(report)));
    return ERX_OK;
  });
}

erx_status erx_audit(erx_classifier* classifier, const erx_dataset* dataset, const char* split,
                     const erx_config* config, char** out) {
  return Guard([&] {
    Require(classifier != nullptr && dataset != nullptr && split != nullptr && out != nullptr,
            "classifier, dataset, split and out must not be null");
    const erx::SplitAudit audit =
        erx::AuditSplit(*classifier->session, dataset->dataset, split, ConfigOf(config));
    *out = Duplicate(FormatOf(config) == ERX_FORMAT_MARKDOWN ? erx::AuditMarkdown(audit)
                                                             : Render(erx::AuditJson(audit)));
    return ERX_OK;
  });
}

}  // extern "C"
