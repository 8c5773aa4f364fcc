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

#include <gtest/gtest.h>

#include "testkit.hpp"

namespace erx {
namespace {

using testkit::TempDir;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::string MessageOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

void WriteMinimal(const TempDir& dir) {
  dir.Write("tableA.csv", "id,name,price\n0,a b,\n1,c d,3\n");
  dir.Write("tableB.csv", "id,name,price\n0,a b,1\n1,e,\n");
  dir.Write("test.csv", "ltable_id,rtable_id,label\n0,0,1\n1,1,0\n");
}

TEST(TokenizeTest, SplitsOnWhitespace) {
  EXPECT_EQ(Tokenize("sony bravia theater"),
            (std::vector<std::string>{"sony", "bravia", "theater"}));
}

TEST(TokenizeTest, EmptyTextHasNoTokens) { EXPECT_TRUE(Tokenize("").empty()); }

TEST(TokenizeTest, CollapsesWhitespaceRuns) {
  EXPECT_EQ(Tokenize("  a   b "), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(Tokenize("a\tb\nc"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(TokenizeTest, JoinTokensRange) {
  std::vector<std::string> tokens{"a", "b", "c"};
  EXPECT_EQ(JoinTokens(tokens, 1, 3), "b c");
  EXPECT_EQ(JoinTokens(tokens, 0, 0), "");
}

TEST(CsvTest, QuotedFieldsWithCommasNewlinesAndQuotes) {
  auto rows = ParseCsv("id,v\n1,\"a, b\"\n2,\"x\ny\"\n3,\"say \"\"hi\"\"\"\n");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1][1], "a, b");
  EXPECT_EQ(rows[2][1], "x\ny");
  EXPECT_EQ(rows[3][1], "say \"hi\"");
}

TEST(CsvTest, SkipsBomAndHandlesCrlf) {
  auto rows = ParseCsv("\xEF\xBB\xBFid,v\r\n1,2\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "id");
  EXPECT_EQ(rows[1][1], "2");
}

TEST(CsvTest, UnterminatedQuoteIsParseError) {
  EXPECT_EQ(CodeOf([] { ParseCsv("id,v\n1,\"open\n"); }), ErrorCode::kParse);
}

TEST(CsvTest, FormatRoundTrips) {
  std::vector<std::string> fields{"plain", "a,b", "q\"uote", "", "line\nbreak"};
  auto rows = ParseCsv(FormatCsvRow(fields) + "\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], fields);
}

TEST(SchemaTest, RejectsDuplicatesAndTooFewAttributes) {
  EXPECT_EQ(CodeOf([] { Schema(Side::kU, {"a", "a"}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Schema(Side::kU, {"a"}); }), ErrorCode::kInvalidArgument);
  std::vector<std::string> many;
  for (int i = 0; i <= AttributeSet::kMaxAttributes; ++i) many.push_back("a" + std::to_string(i));
  EXPECT_EQ(CodeOf([&] { Schema(Side::kU, many); }), ErrorCode::kInvalidArgument);
}

TEST(SchemaTest, NamesAndSets) {
  Schema schema(Side::kV, {"name", "description", "price"});
  EXPECT_EQ(schema.RequireIndex("price"), 2);
  EXPECT_FALSE(schema.IndexOf("brand").has_value());
  AttributeSet set = schema.SetOf({"name", "price"});
  EXPECT_EQ(set.bits(), 5u);
  EXPECT_EQ(schema.NamesOf(set), (std::vector<std::string>{"name", "price"}));
  EXPECT_EQ(CodeOf([&] { schema.RequireIndex("brand"); }), ErrorCode::kInvalidArgument);
}

TEST(LoadDatasetTest, Fixture) {
  Dataset d = LoadDataset(ERX_FIXTURE_DIR);
  EXPECT_EQ(d.schema(Side::kU).attributes(),
            (std::vector<std::string>{"name", "description", "price"}));
  EXPECT_EQ(d.schema(Side::kV).size(), 3);
  EXPECT_EQ(d.table(Side::kU).size(), 6u);
  EXPECT_EQ(d.table(Side::kV).size(), 6u);
  EXPECT_EQ(d.split("train").size(), 6u);
  EXPECT_EQ(d.split("valid").size(), 2u);
  EXPECT_EQ(d.split("test").size(), 6u);
  const Record& u0 = d.Require(Side::kU, "0");
  EXPECT_EQ(u0.value("name"), "sony bravia theater black micro system davis50b");
  EXPECT_EQ(u0.value("price"), "");
  EXPECT_EQ(d.Require(Side::kV, "2").value("price"), "379.72");
  EXPECT_TRUE(d.split("test")[0].match);
  EXPECT_FALSE(d.split("test")[3].match);
}

TEST(LoadDatasetTest, MissingValuePreservedAsEmptyText) {
  TempDir dir;
  dir.Write("tableA.csv", "id,name,price\n0,\"a b\",\n");
  dir.Write("tableB.csv", "id,name,price\n0,x,1\n");
  dir.Write("train.csv", "ltable_id,rtable_id,label\n0,0,0\n");
  Dataset d = LoadDataset(dir.path());
  const Record& r = d.Require(Side::kU, "0");
  EXPECT_EQ(r.value("name"), "a b");
  EXPECT_EQ(r.value("price"), "");
  EXPECT_EQ(r.values().size(), 2u);
}

TEST(LoadDatasetTest, HeaderOnlySplitIsEmpty) {
  TempDir dir;
  WriteMinimal(dir);
  dir.Write("train.csv", "ltable_id,rtable_id,label\n");
  Dataset d = LoadDataset(dir.path());
  EXPECT_EQ(d.split("train").size(), 0u);
  EXPECT_EQ(d.split("test").size(), 2u);
}

TEST(LoadDatasetTest, MissingTableNamesTheFile) {
  TempDir dir;
  WriteMinimal(dir);
  std::filesystem::remove(dir.path() / "tableB.csv");
  EXPECT_EQ(CodeOf([&] { LoadDataset(dir.path()); }), ErrorCode::kLoad);
  EXPECT_NE(MessageOf([&] { LoadDataset(dir.path()); }).find("tableB.csv"), std::string::npos);
}

TEST(LoadDatasetTest, NoSplitFileIsLoadError) {
  TempDir dir;
  WriteMinimal(dir);
  std::filesystem::remove(dir.path() / "test.csv");
  EXPECT_EQ(CodeOf([&] { LoadDataset(dir.path()); }), ErrorCode::kLoad);
}

TEST(LoadDatasetTest, DanglingPairNamesThePair) {
  TempDir dir;
  WriteMinimal(dir);
  dir.Write("test.csv", "ltable_id,rtable_id,label\n0,9,1\n");
  EXPECT_EQ(CodeOf([&] { LoadDataset(dir.path()); }), ErrorCode::kLoad);
  const std::string message = MessageOf([&] { LoadDataset(dir.path()); });
  EXPECT_NE(message.find("9"), std::string::npos) << message;
}

TEST(LoadDatasetTest, NonBinaryLabelIsParseError) {
  TempDir dir;
  WriteMinimal(dir);
  dir.Write("test.csv", "ltable_id,rtable_id,label\n0,0,2\n");
  EXPECT_EQ(CodeOf([&] { LoadDataset(dir.path()); }), ErrorCode::kParse);
}

TEST(LoadDatasetTest, MissingIdColumnIsLoadError) {
  TempDir dir;
  WriteMinimal(dir);
  dir.Write("tableA.csv", "key,name,price\n0,a,1\n");
  EXPECT_EQ(CodeOf([&] { LoadDataset(dir.path()); }), ErrorCode::kLoad);
}

TEST(LoadDatasetTest, DuplicateIdIsLoadError) {
  TempDir dir;
  WriteMinimal(dir);
  dir.Write("tableA.csv", "id,name,price\n0,a,1\n0,b,2\n1,c,3\n");
  EXPECT_EQ(CodeOf([&] { LoadDataset(dir.path()); }), ErrorCode::kLoad);
}

TEST(LoadDatasetTest, RoundTripPreservesCountsOrderAndLabels) {
  Dataset original = LoadDataset(ERX_FIXTURE_DIR);
  TempDir dir;
  SaveDataset(original, dir.path());
  Dataset copy = LoadDataset(dir.path());
  for (Side side : {Side::kU, Side::kV}) {
    EXPECT_EQ(copy.schema(side), original.schema(side));
    ASSERT_EQ(copy.table(side).size(), original.table(side).size());
    for (std::size_t i = 0; i < original.table(side).size(); ++i) {
      EXPECT_EQ(copy.table(side)[i].id(), original.table(side)[i].id());
      EXPECT_EQ(copy.table(side)[i].values(), original.table(side)[i].values());
    }
  }
  ASSERT_EQ(copy.splits().size(), original.splits().size());
  for (const auto& [name, pairs] : original.splits()) {
    const auto& other = copy.split(name);
    ASSERT_EQ(other.size(), pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(other[i].left_id, pairs[i].left_id);
      EXPECT_EQ(other[i].right_id, pairs[i].right_id);
      EXPECT_EQ(other[i].match, pairs[i].match);
    }
  }
}

TEST(LoadDatasetTest, RecordValuesMatchSchema) {
  Dataset d = LoadDataset(ERX_FIXTURE_DIR);
  for (Side side : {Side::kU, Side::kV}) {
    for (const auto& r : d.table(side)) {
      EXPECT_EQ(static_cast<int>(r.values().size()), d.schema(side).size());
      EXPECT_EQ(r.side(), side);
    }
  }
}

TEST(RecordTest, FingerprintIgnoresIdAndSeparatesValues) {
  auto schema = testkit::MakeSchema(Side::kU, {"a", "b"});
  Record x("1", schema, {"ab", "c"});
  Record y("2", schema, {"ab", "c"});
  Record z("3", schema, {"a", "bc"});
  EXPECT_EQ(x.Fingerprint(), y.Fingerprint());
  EXPECT_NE(x.Fingerprint(), z.Fingerprint());
  EXPECT_TRUE(x.AttributeEqual(y));
  EXPECT_FALSE(x.AttributeEqual(z));
}

TEST(RecordTest, RejectsWrongValueCount) {
  auto schema = testkit::MakeSchema(Side::kU, {"a", "b"});
  EXPECT_EQ(CodeOf([&] { Record("1", schema, {"x"}); }), ErrorCode::kInvalidArgument);
}

TEST(SelectPairsTest, Selectors) {
  Dataset d = LoadDataset(ERX_FIXTURE_DIR);
  auto one = SelectPairs(d, "test:1");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].name, "test-1");
  EXPECT_EQ(one[0].pair.left_id, "0");
  auto all = SelectPairs(d, "all:valid");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].name, "valid-1");
  auto ids = SelectPairs(d, "id:2,2");
  ASSERT_EQ(ids.size(), 1u);
  EXPECT_TRUE(ids[0].pair.match);
  EXPECT_EQ(ids[0].name, "id-2-2");
}

TEST(SelectPairsTest, BadSelectorsAreInvalidArguments) {
  Dataset d = LoadDataset(ERX_FIXTURE_DIR);
  for (const char* bad : {"test", "test:", "test:99", "test:x", "nosplit:0", "id:0", "id:0,99",
                          "all:nosplit", ":1"}) {
    EXPECT_EQ(CodeOf([&] { SelectPairs(d, bad); }), ErrorCode::kInvalidArgument) << bad;
  }
}

}  // namespace
}  // namespace erx
