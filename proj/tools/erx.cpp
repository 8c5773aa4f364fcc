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

// erx: command-line front end over the C API.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erx/erx.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitPartial = 1,
  kExitUsage = 2,
  kExitInput = 3,
  kExitClassifier = 4,
  kExitInternal = 5,
};

int ExitCodeOf(erx_status status) {
  switch (status) {
    case ERX_OK: return kExitOk;
    case ERX_INVALID_ARGUMENT: return kExitUsage;
    case ERX_LOAD_ERROR:
    case ERX_PARSE_ERROR: return kExitInput;
    case ERX_TRANSPORT_ERROR:
    case ERX_PROTOCOL_ERROR:
    case ERX_ORACLE_ERROR: return kExitClassifier;
    case ERX_EXPLANATION_UNAVAILABLE: return kExitPartial;
    case ERX_INTERNAL_ERROR: break;
  }
  return kExitInternal;
}

struct Failure {
  erx_status status;
};

struct OwnedString {
  char* text = nullptr;
  ~OwnedString() { erx_string_free(text); }
  std::string str() const { return text != nullptr ? text : ""; }
};

void Check(erx_status status, const std::string& context) {
  if (status == ERX_OK) return;
  std::cerr << "erx: " << context << ": " << erx_status_name(status) << ": " << erx_last_error()
            << "\n";
  throw Failure{status};
}

struct DatasetHandle {
  erx_dataset* ptr = nullptr;
  ~DatasetHandle() { erx_dataset_free(ptr); }
};

struct ClassifierHandle {
  erx_classifier* ptr = nullptr;
  ~ClassifierHandle() { erx_classifier_free(ptr); }
};

// Writes through a sibling temporary file so readers never see a partial
// file.
void WriteAtomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw std::runtime_error("cannot write " + temp.string());
    }
  }
  fs::rename(temp, path);
}

struct Options {
  std::string dataset;
  std::string classifier = "reference";
  int tau = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool no_augment = false;
  bool no_prune = false;
  bool global_flips = false;
  std::size_t cf_cap = 10;
  std::string out;
  std::string format = "json";
  int timeout_ms = 30000;
  int retries = 2;
};

erx_config ConfigOf(const Options& o) {
  erx_config config;
  erx_config_init(&config);
  config.tau = o.tau;
  config.seed = o.seed;
  config.jobs = o.jobs;
  config.augment = o.no_augment ? 0 : 1;
  config.prune = o.no_prune ? 0 : 1;
  config.global_flip_count = o.global_flips ? 1 : 0;
  config.cf_cap = o.cf_cap;
  config.format = o.format == "md" ? ERX_FORMAT_MARKDOWN : ERX_FORMAT_JSON;
  return config;
}

void Emit(const Options& o, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    WriteAtomically(o.out, content);
  }
}

void AddCommon(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "Dataset directory (tableA.csv, tableB.csv, splits)")
      ->required()
      ->envname("ERX_DATASET");
  cmd->add_option("--classifier", o.classifier, "reference | bridge:<cmd> | http:<url>")
      ->envname("ERX_CLASSIFIER")
      ->capture_default_str();
  cmd->add_option("--tau", o.tau, "Triangles in all (even, >= 2)")
      ->envname("ERX_TAU")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->envname("ERX_SEED")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Worker threads")
      ->envname("ERX_JOBS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--no-augment", o.no_augment, "Disable token-drop augmentation")
      ->envname("ERX_NO_AUGMENT");
  cmd->add_flag("--no-prune", o.no_prune, "Score every lattice node")->envname("ERX_NO_PRUNE");
  cmd->add_flag("--global-flips", o.global_flips,
                "Divide saliency by the flips of both sides")
      ->envname("ERX_GLOBAL_FLIPS");
  cmd->add_option("--cf-cap", o.cf_cap, "Counterfactuals kept per explanation")
      ->envname("ERX_CF_CAP")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output file (directory for explain); stdout when absent")
      ->envname("ERX_OUT");
  cmd->add_option("--format", o.format, "Output format")
      ->envname("ERX_FORMAT")
      ->check(CLI::IsMember({"json", "md"}))
      ->capture_default_str();
  cmd->add_option("--timeout-ms", o.timeout_ms, "Bridge reply timeout")
      ->envname("ERX_TIMEOUT_MS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--retries", o.retries, "Bridge restarts after transport failures")
      ->envname("ERX_RETRIES")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void LoadInputs(const Options& o, DatasetHandle& dataset, ClassifierHandle* classifier) {
  Check(erx_dataset_load(o.dataset.c_str(), &dataset.ptr), "loading " + o.dataset);
  if (classifier != nullptr) {
    Check(erx_classifier_create_ex(o.classifier.c_str(), o.timeout_ms, o.retries,
                                   &classifier->ptr),
          "classifier " + o.classifier);
  }
}

std::vector<Json> Select(const DatasetHandle& dataset, const std::string& selector) {
  OwnedString selected;
  Check(erx_select_pairs(dataset.ptr, selector.c_str(), &selected.text),
        "pair selector " + selector);
  std::vector<Json> pairs;
  for (auto& item : Json::parse(selected.str())) pairs.push_back(item);
  return pairs;
}

int RunSummary(const Options& o) {
  DatasetHandle dataset;
  LoadInputs(o, dataset, nullptr);
  OwnedString summary;
  Check(erx_dataset_summary(dataset.ptr, &summary.text), "summary");
  Emit(o, summary.str());
  return kExitOk;
}

int RunTriangles(const Options& o, const std::string& selector) {
  DatasetHandle dataset;
  ClassifierHandle classifier;
  LoadInputs(o, dataset, &classifier);
  const erx_config config = ConfigOf(o);
  Json reports = Json::array();
  for (const auto& pair : Select(dataset, selector)) {
    OwnedString report;
    const std::string left = pair["left"];
    const std::string right = pair["right"];
    Check(erx_triangles(classifier.ptr, dataset.ptr, left.c_str(), right.c_str(), &config,
                        &report.text),
          "triangles for " + pair["name"].get<std::string>());
    reports.push_back(Json::parse(report.str()));
  }
  Emit(o, (reports.size() == 1 ? reports[0] : reports).dump(2) + "\n");
  return kExitOk;
}

int RunExplain(const Options& o, const std::string& selector, const std::vector<int>& masking) {
  DatasetHandle dataset;
  ClassifierHandle classifier;
  LoadInputs(o, dataset, &classifier);
  const erx_config config = ConfigOf(o);
  const bool markdown = config.format == ERX_FORMAT_MARKDOWN;
  const std::string extension = markdown ? ".md" : ".json";

  Json summary;
  summary["selector"] = selector;
  summary["pairs"] = Json::array();
  std::size_t failed = 0;
  std::vector<std::string> documents;
  for (const auto& pair : Select(dataset, selector)) {
    const std::string name = pair["name"];
    const std::string left = pair["left"];
    const std::string right = pair["right"];
    OwnedString report;
    const erx_status status =
        erx_explain(classifier.ptr, dataset.ptr, left.c_str(), right.c_str(), &config,
                    masking.empty() ? nullptr : masking.data(), masking.size(), &report.text);
    Json entry{{"name", name}, {"left", left}, {"right", right}, {"status", erx_status_name(status)}};
    if (status == ERX_INVALID_ARGUMENT || status == ERX_TRANSPORT_ERROR ||
        status == ERX_PROTOCOL_ERROR || status == ERX_ORACLE_ERROR ||
        status == ERX_INTERNAL_ERROR) {
      Check(status, "explaining " + name);
    }
    if (status != ERX_OK) {
      ++failed;
      entry["error"] = erx_last_error();
      std::cerr << "erx: " << name << ": " << erx_status_name(status) << ": " << erx_last_error()
                << "\n";
    }
    if (report.text != nullptr) {
      if (!o.out.empty()) {
        WriteAtomically(fs::path(o.out) / (name + extension), report.str());
        entry["file"] = name + extension;
      } else {
        documents.push_back(report.str());
      }
    }
    summary["pairs"].push_back(std::move(entry));
  }
  summary["failed"] = failed;
  if (!o.out.empty()) {
    WriteAtomically(fs::path(o.out) / "summary.json", summary.dump(2) + "\n");
  } else if (markdown || documents.size() == 1) {
    for (std::size_t i = 0; i < documents.size(); ++i) {
      if (i > 0) std::cout << "\n";
      std::cout << documents[i];
    }
  } else {
    Json all = Json::array();
    for (const auto& doc : documents) all.push_back(Json::parse(doc));
    std::cout << all.dump(2) << "\n";
  }
  return failed == 0 ? kExitOk : kExitPartial;
}

int RunEvaluate(const Options& o, const std::string& split) {
  DatasetHandle dataset;
  ClassifierHandle classifier;
  LoadInputs(o, dataset, &classifier);
  const erx_config config = ConfigOf(o);
  OwnedString report;
  Check(erx_evaluate(classifier.ptr, dataset.ptr, split.c_str(), &config, &report.text),
        "evaluating split " + split);
  Emit(o, report.str());
  return kExitOk;
}

int RunAudit(const Options& o, const std::string& split) {
  DatasetHandle dataset;
  ClassifierHandle classifier;
  LoadInputs(o, dataset, &classifier);
  const erx_config config = ConfigOf(o);
  OwnedString report;
  Check(erx_audit(classifier.ptr, dataset.ptr, split.c_str(), &config, &report.text),
        "auditing split " + split);
  Emit(o, report.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanations for entity-resolution classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(erx_version()));

  Options o;
  std::string selector = "test:0";
  std::string split = "test";
  std::vector<int> masking;

  auto* summary = app.add_subcommand("summary", "Print record counts, schemas and split sizes");
  summary->add_option("--dataset", o.dataset, "Dataset directory")
      ->required()
      ->envname("ERX_DATASET");
  summary->add_option("--out", o.out, "Output file")->envname("ERX_OUT");

  auto* triangles = app.add_subcommand("triangles", "Report open-triangle acquisition");
  AddCommon(triangles, o);
  triangles->add_option("--pair", selector, "<split>:<row> | id:<left>,<right> | all:<split>")
      ->capture_default_str();

  auto* explain = app.add_subcommand("explain", "Explain predictions");
  AddCommon(explain, o);
  explain->add_option("--pair", selector, "<split>:<row> | id:<left>,<right> | all:<split>")
      ->capture_default_str();
  explain->add_option("--masking", masking, "Also report masking effects for these k values")
      ->delimiter(',');

  auto* evaluate = app.add_subcommand("evaluate", "Explain a split and report quality metrics");
  AddCommon(evaluate, o);
  evaluate->add_option("--split", split, "Split to evaluate")->capture_default_str();

  auto* audit = app.add_subcommand("audit", "Compare pruned and exhaustive lattice tagging");
  AddCommon(audit, o);
  audit->add_option("--split", split, "Split to audit")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*summary) return RunSummary(o);
    if (*triangles) return RunTriangles(o, selector);
    if (*explain) return RunExplain(o, selector, masking);
    if (*evaluate) return RunEvaluate(o, split);
    if (*audit) return RunAudit(o, split);
  } catch (const Failure& f) {
    return ExitCodeOf(f.status);
  } catch (const std::exception& e) {
    std::cerr << "erx: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
