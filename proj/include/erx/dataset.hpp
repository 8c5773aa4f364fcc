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

// Two-table ER datasets in the DeepMatcher benchmark layout:
//
//   <dir>/tableA.csv   id,<attr>,...     records of U
//   <dir>/tableB.csv   id,<attr>,...     records of V
//   <dir>/{train,valid,test}.csv  ltable_id,rtable_id,label
//
// Missing values are kept as empty text.

#ifndef ERX_DATASET_HPP_
#define ERX_DATASET_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "erx/common.hpp"

namespace erx {

class Schema {
 public:
  // Throws kInvalidArgument on duplicate names, fewer than 2 attributes or
  // more than AttributeSet::kMaxAttributes.
  Schema(Side side, std::vector<std::string> attributes);

  Side side() const { return side_; }
  int size() const { return static_cast<int>(attributes_.size()); }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const std::string& attribute(int index) const { return attributes_[index]; }

  std::optional<int> IndexOf(std::string_view name) const;
  // Like IndexOf but throws kInvalidArgument for unknown names.
  int RequireIndex(std::string_view name) const;
  AttributeSet SetOf(const std::vector<std::string>& names) const;
  std::vector<std::string> NamesOf(AttributeSet set) const;

  friend bool operator==(const Schema& a, const Schema& b) {
    return a.side_ == b.side_ && a.attributes_ == b.attributes_;
  }

 private:
  Side side_;
  std::vector<std::string> attributes_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

// One entity description. Values are stored positionally, aligned with the
// schema's attributes.
class Record {
 public:
  Record() = default;
  Record(std::string id, SchemaPtr schema, std::vector<std::string> values);

  const std::string& id() const { return id_; }
  Side side() const { return schema_->side(); }
  const Schema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  const std::vector<std::string>& values() const { return values_; }

  const std::string& value(int index) const { return values_[index]; }
  const std::string& value(std::string_view name) const;
  void set_value(int index, std::string value) {
    values_[index] = std::move(value);
  }

  // Content key: side plus values, ignoring the id. Attribute-equal records
  // share a fingerprint.
  std::string Fingerprint() const;

  bool AttributeEqual(const Record& other) const {
    return side() == other.side() && values_ == other.values_;
  }

 private:
  std::string id_;
  SchemaPtr schema_;
  std::vector<std::string> values_;
};

struct RecordPair {
  Record left;   // from U
  Record right;  // from V
};

struct LabeledPair {
  std::string left_id;
  std::string right_id;
  bool match = false;
};

class Dataset {
 public:
  Dataset(SchemaPtr schema_u, SchemaPtr schema_v, std::vector<Record> table_u,
          std::vector<Record> table_v,
          std::map<std::string, std::vector<LabeledPair>> splits);

  const Schema& schema(Side side) const {
    return side == Side::kU ? *schema_u_ : *schema_v_;
  }
  const SchemaPtr& schema_ptr(Side side) const {
    return side == Side::kU ? schema_u_ : schema_v_;
  }
  const std::vector<Record>& table(Side side) const {
    return side == Side::kU ? table_u_ : table_v_;
  }
  const Record* Find(Side side, std::string_view id) const;
  const Record& Require(Side side, std::string_view id) const;

  const std::map<std::string, std::vector<LabeledPair>>& splits() const {
    return splits_;
  }
  // Throws kInvalidArgument for an unknown split name.
  const std::vector<LabeledPair>& split(std::string_view name) const;

  RecordPair PairOf(const LabeledPair& pair) const {
    return {Require(Side::kU, pair.left_id), Require(Side::kV, pair.right_id)};
  }

 private:
  SchemaPtr schema_u_;
  SchemaPtr schema_v_;
  std::vector<Record> table_u_;
  std::vector<Record> table_v_;
  std::unordered_map<std::string, std::size_t> index_u_;
  std::unordered_map<std::string, std::size_t> index_v_;
  std::map<std::string, std::vector<LabeledPair>> splits_;
};

// Splits on runs of whitespace; never yields empty tokens.
std::vector<std::string> Tokenize(std::string_view value);
std::string JoinTokens(const std::vector<std::string>& tokens,
                       std::size_t begin, std::size_t end);

// Minimal RFC 4180 reader/writer (comma separator, double-quote quoting).
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);
std::string FormatCsvRow(const std::vector<std::string>& fields);

// A labeled pair picked for explanation. `name` is a filesystem-safe label
// ("test-0", "id-12-77").
struct SelectedPair {
  std::string name;
  LabeledPair pair;
  std::string split;  // empty for explicit id pairs
};

// Selectors: "<split>:<row>", "id:<left id>,<right id>" or "all:<split>".
// Throws kInvalidArgument for malformed selectors, unknown splits, rows out of
// range and unknown ids.
std::vector<SelectedPair> SelectPairs(const Dataset& dataset, std::string_view selector);

Dataset LoadDataset(const std::filesystem::path& directory);
// Writes the dataset back in the same layout, one file per split.
void SaveDataset(const Dataset& dataset, const std::filesystem::path& directory);

}  // namespace erx

#endif  // ERX_DATASET_HPP_
