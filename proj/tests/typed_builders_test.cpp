#include "layoutkit/typed_builders.hpp"

#include <cstdint>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "layoutkit/decoder.hpp"
#include "layoutkit/logical_value.hpp"
#include "support/example.hpp"
#include "support/oracles.hpp"

namespace layoutkit::typed {
namespace {

enum Field : std::size_t { x, y };

using ExampleBuilder = RecordBuilder<RecordField<Field::x, NumpyBuilder<double>>,
                                     RecordField<Field::y, ListOffsetBuilder<int64_t, NumpyBuilder<int32_t>>>>;

void fill_example(ExampleBuilder& builder) {
  auto& x_builder = builder.field<Field::x>();
  auto& y_builder = builder.field<Field::y>();

  x_builder.append(1.1);
  auto& y_subbuilder = y_builder.begin_list();
  y_subbuilder.append(1);
  y_builder.end_list();

  x_builder.append(2.2);
  y_builder.begin_list();
  y_builder.end_list();

  x_builder.append(3.3);
  y_builder.begin_list();
  y_subbuilder.append(1);
  y_subbuilder.append(2);
  y_builder.end_list();
}

struct Extracted {
  std::map<std::string, std::vector<std::byte>> bytes;
  BufferViews views() const {
    BufferViews out;
    for (const auto& [name, data] : bytes) out.emplace(name, std::span<const std::byte>(data));
    return out;
  }
};

template <typename Builder>
Extracted extract(const Builder& builder) {
  std::map<std::string, std::size_t> names_nbytes = {};
  builder.buffer_nbytes(names_nbytes);
  Extracted out;
  std::map<std::string, void*> buffers;
  for (const auto& [name, nbytes] : names_nbytes) {
    auto& storage = out.bytes[name];
    storage.resize(nbytes);
    buffers[name] = storage.data();
  }
  builder.to_buffers(buffers);
  return out;
}

TEST(TypedBuildersTest, ExampleProducesExpectedLayout) {
  UserDefinedMap fields_map({{Field::x, "x"}, {Field::y, "y"}});
  ExampleBuilder builder(fields_map);
  fill_example(builder);

  std::string error;
  ASSERT_TRUE(builder.is_valid(error)) << error;
  EXPECT_EQ(builder.length(), 3u);
  EXPECT_EQ(builder.form(), testing::kExampleFormCanonical);

  std::map<std::string, std::size_t> names_nbytes = {};
  builder.buffer_nbytes(names_nbytes);
  EXPECT_EQ(names_nbytes, (std::map<std::string, std::size_t>{
                              {"node1-data", 24}, {"node2-offsets", 32}, {"node3-data", 12}}));

  auto extracted = extract(builder);
  EXPECT_EQ(extracted.bytes["node1-data"], testing::le_f64({1.1, 2.2, 3.3}));
  EXPECT_EQ(extracted.bytes["node2-offsets"], testing::le_i64({0, 1, 1, 3}));
  EXPECT_EQ(extracted.bytes["node3-data"], testing::le_i32({1, 1, 2}));

  EXPECT_EQ(to_json(decode(builder.form(), extracted.views(), builder.length())), testing::kExampleDecoded);
}

TEST(TypedBuildersTest, ValidityDiagnostics) {
  UserDefinedMap fields_map({{Field::x, "x"}, {Field::y, "y"}});
  ExampleBuilder builder(fields_map);
  std::string error;
  EXPECT_TRUE(builder.is_valid(error));

  builder.field<Field::x>().append(1.0);
  builder.field<Field::x>().append(2.0);
  builder.field<Field::y>().begin_list();
  builder.field<Field::y>().end_list();
  EXPECT_FALSE(builder.is_valid(error));
  EXPECT_EQ(error, "record node0 length mismatch: field \"x\" has 2 entries, field \"y\" has 1");

  builder.field<Field::y>().begin_list();
  builder.field<Field::y>().end_list();
  EXPECT_TRUE(builder.is_valid(error)) << error;

  builder.field<Field::y>().begin_list();
  EXPECT_FALSE(builder.is_valid(error));
  EXPECT_EQ(error, "list still open at node2");
  builder.field<Field::y>().end_list();
  builder.field<Field::x>().append(3.0);
  EXPECT_TRUE(builder.is_valid(error)) << error;
}

TEST(TypedBuildersTest, ListProtocolErrors) {
  ListOffsetBuilder<int64_t, NumpyBuilder<int32_t>> builder;
  EXPECT_THROW(builder.end_list(), BuilderError);
  builder.begin_list();
  EXPECT_THROW(builder.begin_list(), BuilderError);
}

TEST(TypedBuildersTest, FieldMapMustNameEveryField) {
  EXPECT_THROW(ExampleBuilder(UserDefinedMap{{Field::x, "x"}}), ConfigError);
  EXPECT_THROW(ExampleBuilder(UserDefinedMap{{Field::x, "x"}, {Field::y, "x"}}), ConfigError);
}

TEST(TypedBuildersTest, OptionIndexes) {
  IndexedOptionBuilder<NumpyBuilder<double>> builder;
  builder.append_valid().append(1.1);
  builder.append_missing();
  builder.append_valid().append(2.2);
  std::string error;
  ASSERT_TRUE(builder.is_valid(error)) << error;
  auto extracted = extract(builder);
  EXPECT_EQ(extracted.bytes["node0-index"], testing::le_i64({0, -1, 1}));
  EXPECT_EQ(extracted.bytes["node1-data"], testing::le_f64({1.1, 2.2}));
  EXPECT_EQ(to_json(decode(builder.form(), extracted.views(), builder.length())), "[1.1,null,2.2]");

  builder.append_valid();
  EXPECT_FALSE(builder.is_valid(error));
}

TEST(TypedBuildersTest, NestedRecordInList) {
  enum Inner : std::size_t { a };
  using InnerRecord = RecordBuilder<RecordField<Inner::a, NumpyBuilder<int64_t>>>;
  ListOffsetBuilder<int64_t, InnerRecord> builder(InnerRecord(UserDefinedMap{{Inner::a, "a"}}));
  auto& inner = builder.begin_list();
  inner.field<Inner::a>().append(5);
  inner.field<Inner::a>().append(6);
  builder.end_list();
  std::string error;
  ASSERT_TRUE(builder.is_valid(error)) << error;
  auto extracted = extract(builder);
  EXPECT_EQ(to_json(decode(builder.form(), extracted.views(), builder.length())), R"([[{"a":5},{"a":6}]])");
}

TEST(TypedBuildersTest, ClearResetsToEmpty) {
  UserDefinedMap fields_map({{Field::x, "x"}, {Field::y, "y"}});
  ExampleBuilder builder(fields_map);
  fill_example(builder);
  builder.clear();
  EXPECT_EQ(builder.length(), 0u);
  auto extracted = extract(builder);
  EXPECT_EQ(extracted.bytes["node2-offsets"], testing::le_i64({0}));
  EXPECT_TRUE(extracted.bytes["node1-data"].empty());
}

}  // namespace
}  // namespace layoutkit::typed
