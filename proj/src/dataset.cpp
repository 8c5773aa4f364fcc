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

#include "erx/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace erx {

Schema::Schema(Side side, std::vector<std::string> attributes)
    : side_(side), attributes_(std::move(attributes)) {
  if (attributes_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "schema " + std::string(SideName(side_)) +
                    " needs at least 2 attributes, got " +
                    std::to_string(attributes_.size()));
  }
  if (attributes_.size() > AttributeSet::kMaxAttributes) {
    throw Error(ErrorCode::kInvalidArgument,
                "schema has more than " +
                    std::to_string(AttributeSet::kMaxAttributes) +
                    " attributes");
  }
  std::set<std::string_view> seen;
  for (const auto& name : attributes_) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate attribute name '" + name + "'");
    }
  }
}

std::optional<int> Schema::IndexOf(std::string_view name) const {
  auto it = std::find(attributes_.begin(), attributes_.end(), name);
  if (it == attributes_.end()) return std::nullopt;
  return static_cast<int>(it - attributes_.begin());
}

int Schema::RequireIndex(std::string_view name) const {
  auto index = IndexOf(name);
  if (!index) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown attribute '" + std::string(name) + "' for side " +
                    std::string(SideName(side_)));
  }
  return *index;
}

AttributeSet Schema::SetOf(const std::vector<std::string>& names) const {
  AttributeSet set;
  for (const auto& name : names) set = set.with(RequireIndex(name));
  return set;
}

std::vector<std::string> Schema::NamesOf(AttributeSet set) const {
  std::vector<std::string> names;
  for (int i = 0; i < size(); ++i) {
    if (set.contains(i)) names.push_back(attributes_[i]);
  }
  return names;
}

Record::Record(std::string id, SchemaPtr schema, std::vector<std::string> values)
    : id_(std::move(id)), schema_(std::move(schema)), values_(std::move(values)) {
  if (!schema_) throw Error(ErrorCode::kInvalidArgument, "record without schema");
  if (static_cast<int>(values_.size()) != schema_->size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "record '" + id_ + "' has " + std::to_string(values_.size()) +
                    " values for a " + std::to_string(schema_->size()) +
                    "-attribute schema");
  }
}

const std::string& Record::value(std::string_view name) const {
  return values_[schema_->RequireIndex(name)];
}

std::string Record::Fingerprint() const {
  std::string key(SideName(side()));
  for (const auto& value : values_) {
    key += '\x1f';
    key += std::to_string(value.size());
    key += ':';
    key += value;
  }
  return key;
}

Dataset::Dataset(SchemaPtr schema_u, SchemaPtr schema_v,
                 std::vector<Record> table_u, std::vector<Record> table_v,
                 std::map<std::string, std::vector<LabeledPair>> splits)
    : schema_u_(std::move(schema_u)),
      schema_v_(std::move(schema_v)),
      table_u_(std::move(table_u)),
      table_v_(std::move(table_v)),
      splits_(std::move(splits)) {
  auto index = [](const std::vector<Record>& table, auto& out, const char* name) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!out.emplace(table[i].id(), i).second) {
        throw Error(ErrorCode::kLoad, std::string("duplicate id '") +
                                          table[i].id() + "' in " + name);
      }
    }
  };
  index(table_u_, index_u_, "tableA");
  index(table_v_, index_v_, "tableB");
  for (const auto& [name, pairs] : splits_) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& pair = pairs[i];
      if (!index_u_.contains(pair.left_id) || !index_v_.contains(pair.right_id)) {
        throw Error(ErrorCode::kLoad,
                    "dangling pair (" + pair.left_id + ", " + pair.right_id +
                        ") at row " + std::to_string(i) + " of split '" +
                        name + "'");
      }
    }
  }
}

const Record* Dataset::Find(Side side, std::string_view id) const {
  const auto& index = side == Side::kU ? index_u_ : index_v_;
  auto it = index.find(std::string(id));
  if (it == index.end()) return nullptr;
  return &table(side)[it->second];
}

const Record& Dataset::Require(Side side, std::string_view id) const {
  const Record* record = Find(side, id);
  if (record == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "no record '" + std::string(id) + "' in table " +
                    std::string(SideName(side)));
  }
  return *record;
}

const std::vector<LabeledPair>& Dataset::split(std::string_view name) const {
  auto it = splits_.find(std::string(name));
  if (it == splits_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset has no split '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<std::string> Tokenize(std::string_view value) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < value.size()) {
    while (i < value.size() && is_space(value[i])) ++i;
    std::size_t start = i;
    while (i < value.size() && !is_space(value[i])) ++i;
    if (i > start) tokens.emplace_back(value.substr(start, i - start));
  }
  return tokens;
}

std::string JoinTokens(const std::vector<std::string>& tokens,
                       std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t i = 0;
  if (text.starts_with("\xEF\xBB\xBF")) i = 3;  // UTF-8 BOM
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        row_has_content = false;
        break;
      default:
        field += c;
        row_has_content = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::kParse, "unterminated quoted CSV field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string FormatCsvRow(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kLoad, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::vector<std::string>> ReadCsvWithHeader(
    const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kLoad, "missing file " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  try {
    rows = ParseCsv(ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what());
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kLoad, path.filename().string() + " has no header row");
  }
  return rows;
}

int ColumnOf(const std::vector<std::string>& header, std::string_view name,
             const std::filesystem::path& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorCode::kLoad, path.filename().string() + " has no '" +
                                      std::string(name) + "' column");
  }
  return static_cast<int>(it - header.begin());
}

std::vector<Record> LoadTable(const std::filesystem::path& path, Side side,
                              SchemaPtr& schema_out) {
  auto rows = ReadCsvWithHeader(path);
  const auto& header = rows.front();
  int id_column = ColumnOf(header, "id", path);
  std::vector<std::string> attributes;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (c != id_column) attributes.push_back(header[c]);
  }
  try {
    schema_out = std::make_shared<const Schema>(side, attributes);
  } catch (const Error& e) {
    throw Error(ErrorCode::kLoad, path.filename().string() + ": " + e.what());
  }
  std::vector<Record> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kParse, path.filename().string() + " row " +
                                         std::to_string(r) + " has " +
                                         std::to_string(row.size()) +
                                         " fields, header has " +
                                         std::to_string(header.size()));
    }
    std::vector<std::string> values;
    values.reserve(attributes.size());
    for (int c = 0; c < static_cast<int>(row.size()); ++c) {
      if (c != id_column) values.push_back(std::move(row[c]));
    }
    records.emplace_back(std::move(row[id_column]), schema_out, std::move(values));
  }
  return records;
}

std::vector<LabeledPair> LoadSplit(const std::filesystem::path& path) {
  auto rows = ReadCsvWithHeader(path);
  const auto& header = rows.front();
  int left = ColumnOf(header, "ltable_id", path);
  int right = ColumnOf(header, "rtable_id", path);
  int label = ColumnOf(header, "label", path);
  std::vector<LabeledPair> pairs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kParse, path.filename().string() + " row " +
                                         std::to_string(r) +
                                         " has the wrong number of fields");
    }
    const auto& text = row[label];
    bool match;
    if (text == "1") {
      match = true;
    } else if (text == "0") {
      match = false;
    } else {
      throw Error(ErrorCode::kParse, path.filename().string() + " row " +
                                         std::to_string(r) +
                                         ": non-binary label '" + text + "'");
    }
    pairs.push_back({row[left], row[right], match});
  }
  return pairs;
}

constexpr const char* kSplitNames[] = {"train", "valid", "test"};

}  // namespace

namespace {

std::string SafeName(std::string_view text) {
  std::string out;
  for (char c : text) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                      c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

}  // namespace

std::vector<SelectedPair> SelectPairs(const Dataset& dataset, std::string_view selector) {
  const auto colon = selector.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == selector.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad pair selector '" + std::string(selector) +
                    "' (expected <split>:<row>, id:<left>,<right> or all:<split>)");
  }
  const std::string head(selector.substr(0, colon));
  const std::string tail(selector.substr(colon + 1));
  std::vector<SelectedPair> selected;

  if (head == "id") {
    const auto comma = tail.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == tail.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad id selector '" + std::string(selector) + "' (expected id:<left>,<right>)");
    }
    LabeledPair pair{tail.substr(0, comma), tail.substr(comma + 1), false};
    dataset.Require(Side::kU, pair.left_id);
    dataset.Require(Side::kV, pair.right_id);
    for (const auto& [name, pairs] : dataset.splits()) {
      auto it = std::find_if(pairs.begin(), pairs.end(), [&](const LabeledPair& p) {
        return p.left_id == pair.left_id && p.right_id == pair.right_id;
      });
      if (it != pairs.end()) {
        pair.match = it->match;
        break;
      }
    }
    selected.push_back({"id-" + SafeName(pair.left_id) + "-" + SafeName(pair.right_id), pair, ""});
    return selected;
  }
  if (head == "all") {
    const auto& pairs = dataset.split(tail);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      selected.push_back({SafeName(tail) + "-" + std::to_string(i), pairs[i], tail});
    }
    return selected;
  }
  const auto& pairs = dataset.split(head);
  std::size_t row = 0;
  auto [end, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), row);
  if (ec != std::errc() || end != tail.data() + tail.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bad row index in selector '" +
                                                 std::string(selector) + "'");
  }
  if (row >= pairs.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "row " + tail + " is out of range for split '" + head + "' (" +
                    std::to_string(pairs.size()) + " pairs)");
  }
  selected.push_back({SafeName(head) + "-" + tail, pairs[row], head});
  return selected;
}

Dataset LoadDataset(const std::filesystem::path& directory) {
  SchemaPtr schema_u;
  SchemaPtr schema_v;
  auto table_u = LoadTable(directory / "tableA.csv", Side::kU, schema_u);
  auto table_v = LoadTable(directory / "tableB.csv", Side::kV, schema_v);
  std::map<std::string, std::vector<LabeledPair>> splits;
  for (const char* name : kSplitNames) {
    auto path = directory / (std::string(name) + ".csv");
    if (std::filesystem::exists(path)) splits.emplace(name, LoadSplit(path));
  }
  if (splits.empty()) {
    throw Error(ErrorCode::kLoad, "missing file: none of train.csv, valid.csv, "
                                  "test.csv in " + directory.string());
  }
  return Dataset(std::move(schema_u), std::move(schema_v), std::move(table_u),
                 std::move(table_v), std::move(splits));
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto write_table = [&](Side side, const char* file) {
    std::ofstream out(directory / file, std::ios::binary);
    std::vector<std::string> header{"id"};
    for (const auto& a : dataset.schema(side).attributes()) header.push_back(a);
    out << FormatCsvRow(header);
    for (const auto& record : dataset.table(side)) {
      std::vector<std::string> row{record.id()};
      row.insert(row.end(), record.values().begin(), record.values().end());
      out << FormatCsvRow(row);
    }
  };
  write_table(Side::kU, "tableA.csv");
  write_table(Side::kV, "tableB.csv");
  for (const auto& [name, pairs] : dataset.splits()) {
    std::ofstream out(directory / (name + ".csv"), std::ios::binary);
    out << FormatCsvRow({"ltable_id", "rtable_id", "label"});
    for (const auto& pair : pairs) {
      out << FormatCsvRow({pair.left_id, pair.right_id, pair.match ? "1" : "0"});
    }
  }
}

}  // namespace erx
