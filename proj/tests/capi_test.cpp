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

#include <gtest/gtest.h>

#include <json.hpp>

#include <memory>
#include <string>

namespace {

using Json = nlohmann::json;

struct Owned {
  char* text = nullptr;
  ~Owned() { erx_string_free(text); }
  Json json() const { return Json::parse(text); }
};

class CApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(erx_dataset_load(ERX_FIXTURE_DIR, &dataset_), ERX_OK) << erx_last_error();
    ASSERT_EQ(erx_classifier_create("reference", &classifier_), ERX_OK);
    erx_config_init(&config_);
    config_.tau = 4;
  }
  void TearDown() override {
    erx_classifier_free(classifier_);
    erx_dataset_free(dataset_);
  }

  erx_dataset* dataset_ = nullptr;
  erx_classifier* classifier_ = nullptr;
  erx_config config_{};
};

TEST(CApiBasicsTest, VersionStatusAndDefaults) {
  EXPECT_STREQ(erx_version(), "0.1.0");
  EXPECT_STREQ(erx_status_name(ERX_OK), "ok");
  EXPECT_STRNE(erx_status_name(ERX_TRANSPORT_ERROR), erx_status_name(ERX_PROTOCOL_ERROR));
  erx_config config;
  erx_config_init(&config);
  EXPECT_EQ(config.tau, 100);
  EXPECT_EQ(config.seed, 0u);
  EXPECT_EQ(config.augment, 1);
  EXPECT_EQ(config.prune, 1);
  EXPECT_EQ(config.cf_cap, 10u);
  EXPECT_EQ(config.global_flip_count, 0);
  EXPECT_EQ(config.jobs, 1);
  EXPECT_EQ(config.format, ERX_FORMAT_JSON);
  erx_string_free(nullptr);
  erx_dataset_free(nullptr);
  erx_classifier_free(nullptr);
}

TEST(CApiBasicsTest, LoadErrors) {
  erx_dataset* dataset = nullptr;
  EXPECT_EQ(erx_dataset_load("/nonexistent/dir", &dataset), ERX_LOAD_ERROR);
  EXPECT_EQ(dataset, nullptr);
  EXPECT_NE(std::string(erx_last_error()).find("tableA"), std::string::npos);
  EXPECT_EQ(erx_dataset_load(nullptr, &dataset), ERX_INVALID_ARGUMENT);
  erx_classifier* classifier = nullptr;
  EXPECT_EQ(erx_classifier_create("magic", &classifier), ERX_INVALID_ARGUMENT);
  EXPECT_EQ(erx_classifier_create_ex("bridge:/nonexistent/adapter", 1000, 0, &classifier),
            ERX_TRANSPORT_ERROR);
  EXPECT_EQ(classifier, nullptr);
}

TEST_F(CApiTest, SummaryAndSelection) {
  Owned summary;
  ASSERT_EQ(erx_dataset_summary(dataset_, &summary.text), ERX_OK);
  EXPECT_EQ(summary.json()["tableA"]["records"], 6);
  Owned pairs;
  ASSERT_EQ(erx_select_pairs(dataset_, "all:test", &pairs.text), ERX_OK);
  Json j = pairs.json();
  ASSERT_EQ(j.size(), 6u);
  EXPECT_EQ(j[0]["name"], "test-0");
  EXPECT_EQ(j[0]["left"], "2");
  EXPECT_EQ(j[0]["label"], true);
  Owned bad;
  EXPECT_EQ(erx_select_pairs(dataset_, "test:99", &bad.text), ERX_INVALID_ARGUMENT);
  EXPECT_EQ(bad.text, nullptr);
}

TEST_F(CApiTest, Score) {
  double score = -1.0;
  ASSERT_EQ(erx_classifier_score(classifier_, dataset_, "1", "1", &score), ERX_OK);
  EXPECT_GT(score, 0.0);
  EXPECT_LE(score, 1.0);
  EXPECT_EQ(erx_classifier_score(classifier_, dataset_, "1", "missing", &score),
            ERX_INVALID_ARGUMENT);
}

TEST_F(CApiTest, ExplainJsonAndMarkdown) {
  int ks[] = {1, 2};
  Owned doc;
  erx_status status = erx_explain(classifier_, dataset_, "2", "2", &config_, ks, 2, &doc.text);
  ASSERT_TRUE(status == ERX_OK || status == ERX_EXPLANATION_UNAVAILABLE) << erx_last_error();
  ASSERT_NE(doc.text, nullptr);
  Json j = doc.json();
  EXPECT_EQ(j["prediction"]["left"], "2");
  if (status == ERX_OK) {
    EXPECT_TRUE(j.contains("saliency"));
    EXPECT_EQ(j["masking"]["aggregate"].size(), 2u);
  } else {
    EXPECT_TRUE(j.contains("error"));
  }

  config_.format = ERX_FORMAT_MARKDOWN;
  Owned md;
  status = erx_explain(classifier_, dataset_, "2", "2", &config_, nullptr, 0, &md.text);
  ASSERT_NE(md.text, nullptr);
  if (status == ERX_OK) EXPECT_EQ(std::string(md.text).rfind("# Explanation", 0), 0u);
}

TEST_F(CApiTest, RejectsBadConfig) {
  Owned doc;
  config_.tau = 3;
  EXPECT_EQ(erx_explain(classifier_, dataset_, "2", "2", &config_, nullptr, 0, &doc.text),
            ERX_INVALID_ARGUMENT);
  config_.tau = 4;
  config_.jobs = 0;
  EXPECT_EQ(erx_evaluate(classifier_, dataset_, "test", &config_, &doc.text),
            ERX_INVALID_ARGUMENT);
  EXPECT_EQ(erx_explain(nullptr, dataset_, "2", "2", &config_, nullptr, 0, &doc.text),
            ERX_INVALID_ARGUMENT);
}

TEST_F(CApiTest, ConstantOracleIsUnavailable) {
  erx_classifier* constant = nullptr;
  std::string spec = std::string("bridge:'") + ERX_ADAPTER + "' constant 0.9";
  ASSERT_EQ(erx_classifier_create(spec.c_str(), &constant), ERX_OK) << erx_last_error();
  config_.augment = 0;
  Owned doc;
  EXPECT_EQ(erx_explain(constant, dataset_, "2", "2", &config_, nullptr, 0, &doc.text),
            ERX_EXPLANATION_UNAVAILABLE);
  ASSERT_NE(doc.text, nullptr);
  EXPECT_EQ(doc.json()["diagnostics"]["triangles"]["left"]["shortfall"], 2);
  Owned triangles;
  ASSERT_EQ(erx_triangles(constant, dataset_, "2", "2", &config_, &triangles.text), ERX_OK);
  EXPECT_EQ(triangles.json()["total"], 0);
  erx_classifier_free(constant);
}

TEST_F(CApiTest, EvaluateIsDeterministicAndAuditRuns) {
  Owned first;
  Owned second;
  ASSERT_EQ(erx_evaluate(classifier_, dataset_, "test", &config_, &first.text), ERX_OK)
      << erx_last_error();
  ASSERT_EQ(erx_evaluate(classifier_, dataset_, "test", &config_, &second.text), ERX_OK);
  EXPECT_STREQ(first.text, second.text);
  EXPECT_EQ(first.json()["pairs"], 6);
  Owned audit;
  ASSERT_EQ(erx_audit(classifier_, dataset_, "test", &config_, &audit.text), ERX_OK);
  EXPECT_EQ(audit.json()["split"], "test");
  Owned missing;
  EXPECT_EQ(erx_evaluate(classifier_, dataset_, "nope", &config_, &missing.text),
            ERX_INVALID_ARGUMENT);
}

}  // namespace
