#include "layoutkit/layout_builder.hpp"

#include <random>

#include <gtest/gtest.h>

#include "layoutkit/bufferset.hpp"
#include "layoutkit/decoder.hpp"
#include "support/example.hpp"
#include "support/oracles.hpp"
#include "support/random_data.hpp"

namespace layoutkit {
namespace {

using testing::le_f64;
using testing::le_i32;
using testing::le_i64;

void fill_example(LayoutBuilder& builder) {
  auto& record = builder.root().as<RecordBuilder>();
  auto& x = record.field<PrimitiveBuilder>("x");
  auto& y = record.field<ListOffsetBuilder>("y");

  x.append(1.1);
  auto& inner = y.begin_list().as<PrimitiveBuilder>();
  inner.append<std::int32_t>(1);
  y.end_list();

  x.append(2.2);
  y.begin_list();
  y.end_list();

  x.append(3.3);
  y.begin_list();
  inner.append<std::int32_t>(1);
  inner.append<std::int32_t>(2);
  y.end_list();
}

const std::vector<std::byte>& bytes_of(const BufferSet& set, const std::string& name) {
  const auto* buffer = set.find(name);
  if (buffer == nullptr) throw std::runtime_error("no buffer " + name);
  return buffer->bytes;
}

TEST(LayoutBuilderTest, ExampleBuffersAndForm) {
  LayoutBuilder builder(testing::example_schema());
  fill_example(builder);
  ASSERT_FALSE(builder.check().has_value()) << *builder.check();
  EXPECT_EQ(builder.length(), 3u);
  EXPECT_EQ(builder.form(), testing::kExampleFormCanonical);
  EXPECT_EQ(builder.buffer_sizes(),
            (std::vector<BufferSize>{{"node1-data", 24}, {"node2-offsets", 32}, {"node3-data", 12}}));

  auto set = export_bufferset(builder);
  EXPECT_EQ(bytes_of(set, "node1-data"), le_f64({1.1, 2.2, 3.3}));
  EXPECT_EQ(bytes_of(set, "node2-offsets"), le_i64({0, 1, 1, 3}));
  EXPECT_EQ(bytes_of(set, "node3-data"), le_i32({1, 1, 2}));
  EXPECT_EQ(to_json(decode(set.form, set.views(), set.length)), testing::kExampleDecoded);
}

TEST(LayoutBuilderTest, NodesNumberedPreOrder) {
  LayoutBuilder builder(testing::example_schema());
  ASSERT_EQ(builder.node_count(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(builder.node(i).form_key(), "node" + std::to_string(i));
  EXPECT_EQ(builder.node(1).kind(), NodeKind::primitive);
  EXPECT_EQ(builder.node(2).kind(), NodeKind::list_offset);
  EXPECT_EQ(&builder.node(3), &builder.node(2).as<ListOffsetBuilder>().content());
}

TEST(LayoutBuilderTest, FieldAccess) {
  LayoutBuilder builder(testing::example_schema());
  auto& record = builder.root().as<RecordBuilder>();
  EXPECT_EQ(&record.field("x"), &builder.node(1));
  EXPECT_EQ(&record.field("y"), &builder.node(2));
  EXPECT_THROW(record.field("z"), BuilderError);
  EXPECT_THROW(record.field<ListOffsetBuilder>("x"), BuilderError);
}

TEST(LayoutBuilderTest, EmptyBuilders) {
  LayoutBuilder primitive(FormNode::primitive(PrimitiveType::float64));
  EXPECT_EQ(primitive.buffer_sizes(), (std::vector<BufferSize>{{"node0-data", 0}}));
  EXPECT_EQ(primitive.length(), 0u);

  LayoutBuilder nested(FormNode::list_offset(FormNode::list_offset(FormNode::primitive(PrimitiveType::int8))));
  EXPECT_EQ(nested.buffer_sizes(),
            (std::vector<BufferSize>{{"node0-offsets", 8}, {"node1-offsets", 8}, {"node2-data", 0}}));
  auto set = export_bufferset(nested);
  EXPECT_EQ(bytes_of(set, "node0-offsets"), le_i64({0}));
  EXPECT_EQ(to_json(decode(set.form, set.views(), set.length)), "[]");
}

TEST(LayoutBuilderTest, OffsetsFollowCumulativeLengths) {
  LayoutBuilder builder(FormNode::list_offset(FormNode::primitive(PrimitiveType::int32)));
  auto& list = builder.root().as<ListOffsetBuilder>();
  std::vector<std::vector<std::int32_t>> rows = {{1}, {}, {1, 2}};
  std::vector<std::size_t> lengths;
  for (const auto& row : rows) {
    auto& content = list.begin_list().as<PrimitiveBuilder>();
    for (auto v : row) content.append(v);
    list.end_list();
    lengths.push_back(row.size());
  }
  EXPECT_EQ(list.offsets().to_vector(), testing::cumulative_offsets(lengths));
  EXPECT_EQ(list.offsets().to_vector(), (std::vector<std::int64_t>{0, 1, 1, 3}));
}

TEST(LayoutBuilderTest, EmptyListsRepeatOffset) {
  LayoutBuilder builder(FormNode::list_offset(FormNode::primitive(PrimitiveType::int32)));
  auto& list = builder.root().as<ListOffsetBuilder>();
  EXPECT_EQ(list.offsets().to_vector(), (std::vector<std::int64_t>{0}));
  for (int i = 0; i < 3; ++i) {
    list.begin_list();
    list.end_list();
  }
  EXPECT_EQ(list.offsets().to_vector(), testing::cumulative_offsets({0, 0, 0}));
  EXPECT_EQ(list.offsets().to_vector(), (std::vector<std::int64_t>{0, 0, 0, 0}));
}

TEST(LayoutBuilderTest, ListProtocolErrors) {
  LayoutBuilder builder(FormNode::list_offset(FormNode::primitive(PrimitiveType::int32)));
  auto& list = builder.root().as<ListOffsetBuilder>();
  EXPECT_THROW(list.end_list(), BuilderError);
  list.begin_list();
  EXPECT_THROW(list.begin_list(), BuilderError);
  EXPECT_EQ(builder.check(), std::optional<std::string>("list still open at node0"));
}

TEST(LayoutBuilderTest, OptionIndexes) {
  LayoutBuilder builder(FormNode::indexed_option(FormNode::primitive(PrimitiveType::float64)));
  auto& option = builder.root().as<OptionBuilder>();
  // Index oracle: next present position, or -1.
  std::vector<std::optional<double>> values = {1.1, std::nullopt, 2.2};
  std::vector<std::int64_t> expected;
  std::int64_t next = 0;
  for (const auto& value : values) {
    if (value) {
      option.append_valid().as<PrimitiveBuilder>().append(*value);
      expected.push_back(next++);
    } else {
      option.append_missing();
      expected.push_back(-1);
    }
  }
  EXPECT_EQ(option.index().to_vector(), expected);
  EXPECT_EQ(expected, (std::vector<std::int64_t>{0, -1, 1}));
  auto set = export_bufferset(builder);
  EXPECT_EQ(bytes_of(set, "node1-data"), le_f64({1.1, 2.2}));
  EXPECT_EQ(to_json(decode(set.form, set.views(), set.length)), "[1.1,null,2.2]");
}

TEST(LayoutBuilderTest, AllMissingAndAllValid) {
  LayoutBuilder missing(FormNode::indexed_option(FormNode::primitive(PrimitiveType::int64)));
  for (int i = 0; i < 3; ++i) missing.root().as<OptionBuilder>().append_missing();
  EXPECT_EQ(missing.root().as<OptionBuilder>().index().to_vector(), (std::vector<std::int64_t>{-1, -1, -1}));
  EXPECT_FALSE(missing.check().has_value());

  LayoutBuilder valid(FormNode::indexed_option(FormNode::primitive(PrimitiveType::int64)));
  auto& option = valid.root().as<OptionBuilder>();
  option.append_valid().as<PrimitiveBuilder>().append_integer(4);
  option.append_valid().as<PrimitiveBuilder>().append_integer(5);
  EXPECT_EQ(option.index().to_vector(), (std::vector<std::int64_t>{0, 1}));
}

TEST(LayoutBuilderTest, ValidityDiagnostics) {
  LayoutBuilder builder(testing::example_schema());
  auto& record = builder.root().as<RecordBuilder>();
  record.field<PrimitiveBuilder>("x").append(1.0);
  record.field<PrimitiveBuilder>("x").append(2.0);
  record.field<ListOffsetBuilder>("y").begin_list();
  record.field<ListOffsetBuilder>("y").end_list();
  std::string error;
  EXPECT_FALSE(builder.is_valid(error));
  EXPECT_EQ(error, "record node0 length mismatch: field \"x\" has 2 entries, field \"y\" has 1");
  EXPECT_THROW(export_bufferset(builder), BuilderError);
}

TEST(LayoutBuilderTest, CorruptedStructureIsReported) {
  LayoutBuilder builder(FormNode::list_offset(FormNode::primitive(PrimitiveType::int32)));
  auto& list = builder.root().as<ListOffsetBuilder>();
  auto& content = list.content().as<PrimitiveBuilder>();
  for (int i = 0; i < 3; ++i) content.append<std::int32_t>(i);
  list.raw_offsets().append(2);
  list.raw_offsets().append(1);
  list.raw_offsets().append(3);
  EXPECT_EQ(builder.check(), std::optional<std::string>("offsets at node0 decrease at position 2 (2 > 1)"));

  LayoutBuilder option(FormNode::indexed_option(FormNode::primitive(PrimitiveType::int8)));
  option.root().as<OptionBuilder>().append_valid().as<PrimitiveBuilder>().append_integer(1);
  option.root().as<OptionBuilder>().raw_index().append(5);
  auto problem = option.check();
  ASSERT_TRUE(problem.has_value());
  EXPECT_NE(problem->find("option index at node0 out of range at position 1"), std::string::npos);
}

TEST(LayoutBuilderTest, ManyAppendsSpanPanels) {
  LayoutBuilder builder(FormNode::primitive(PrimitiveType::int64), 1024);
  auto& data = builder.root().as<PrimitiveBuilder>();
  std::vector<std::int64_t> oracle;
  for (std::int64_t i = 0; i < 10001; ++i) {
    data.append(i * 3);
    oracle.push_back(i * 3);
  }
  EXPECT_EQ(builder.length(), 10001u);
  EXPECT_EQ(data.buffer<std::int64_t>().panel_count(), 10u);
  EXPECT_EQ(bytes_of(export_bufferset(builder), "node0-data"), le_i64(oracle));
}

TEST(LayoutBuilderTest, ConvertingAppendsRejectLoss) {
  LayoutBuilder builder(FormNode::primitive(PrimitiveType::int8));
  auto& data = builder.root().as<PrimitiveBuilder>();
  data.append_integer(127);
  data.append_real(-128.0);
  EXPECT_THROW(data.append_integer(128), BuilderError);
  EXPECT_THROW(data.append_real(1.5), BuilderError);
  EXPECT_THROW(data.append_bool(true), BuilderError);
  EXPECT_THROW(data.append(1.0), BuilderError);
  EXPECT_EQ(builder.length(), 2u);

  LayoutBuilder real(FormNode::primitive(PrimitiveType::float32));
  real.root().as<PrimitiveBuilder>().append_real(0.1);
  EXPECT_THROW(real.root().as<PrimitiveBuilder>().append_real(1e300), BuilderError);
  LayoutBuilder flag(FormNode::primitive(PrimitiveType::boolean));
  flag.root().as<PrimitiveBuilder>().append_bool(true);
  EXPECT_THROW(flag.root().as<PrimitiveBuilder>().append_integer(1), BuilderError);
}

TEST(LayoutBuilderTest, ExtractionChecksDestinations) {
  LayoutBuilder builder(testing::example_schema());
  fill_example(builder);
  std::vector<std::byte> x(24), y(32), small(11), ok(12);
  std::map<std::string, std::span<std::byte>> missing{{"node1-data", x}, {"node2-offsets", y}};
  EXPECT_THROW(builder.to_buffers(missing), SizeError);
  std::map<std::string, std::span<std::byte>> undersized{{"node1-data", x}, {"node2-offsets", y}, {"node3-data", small}};
  EXPECT_THROW(builder.to_buffers(undersized), SizeError);
  EXPECT_EQ(x, std::vector<std::byte>(24));
  std::map<std::string, std::span<std::byte>> complete{{"node1-data", x}, {"node2-offsets", y}, {"node3-data", ok}};
  builder.to_buffers(complete);
  EXPECT_EQ(ok, le_i32({1, 1, 2}));
  std::vector<std::byte> single(32);
  builder.to_buffer(1, single);
  EXPECT_EQ(single, le_i64({0, 1, 1, 3}));
}

TEST(LayoutBuilderTest, DuplicateFieldSchemaRejected) {
  EXPECT_THROW(LayoutBuilder(FormNode::record({{"x", FormNode::primitive(PrimitiveType::float64)},
                                               {"x", FormNode::primitive(PrimitiveType::int32)}})),
               ConfigError);
}

TEST(LayoutBuilderTest, RandomBuildExportDecodeRoundTrips) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto filled = testing::random_case(rng, 4, 50);
    LayoutBuilder builder(filled.schema, 1 + rng() % 8);
    for (const auto& value : filled.values) testing::fill(builder.root(), value);
    ASSERT_FALSE(builder.check().has_value()) << *builder.check();
    auto set = export_bufferset(builder);
    ASSERT_EQ(decode(set.form, set.views(), set.length), filled.values) << set.form;
  }
}

// Changing one field's type changes only that field's buffer and subform.
TEST(LayoutBuilderTest, SchemaChangeIsLocal) {
  auto schema_a = FormNode::record({{"a", FormNode::primitive(PrimitiveType::int32)},
                                    {"b", FormNode::list_offset(FormNode::primitive(PrimitiveType::float64))}});
  auto schema_b = FormNode::record({{"a", FormNode::primitive(PrimitiveType::int64)},
                                    {"b", FormNode::list_offset(FormNode::primitive(PrimitiveType::float64))}});
  std::vector<LogicalValue> rows_a, rows_b;
  for (int i = 0; i < 5; ++i) {
    LogicalValue::List items;
    for (int j = 0; j < i; ++j) items.push_back(LogicalValue::real(j * 0.5));
    rows_a.push_back(LogicalValue::record({{"a", LogicalValue::integer(i, PrimitiveType::int32)},
                                           {"b", LogicalValue::list(items)}}));
    rows_b.push_back(LogicalValue::record({{"a", LogicalValue::integer(i, PrimitiveType::int64)},
                                           {"b", LogicalValue::list(items)}}));
  }
  LayoutBuilder a(schema_a), b(schema_b);
  for (const auto& row : rows_a) testing::fill(a.root(), row);
  for (const auto& row : rows_b) testing::fill(b.root(), row);
  auto set_a = export_bufferset(a);
  auto set_b = export_bufferset(b);
  EXPECT_NE(bytes_of(set_a, "node1-data"), bytes_of(set_b, "node1-data"));
  EXPECT_EQ(bytes_of(set_a, "node2-offsets"), bytes_of(set_b, "node2-offsets"));
  EXPECT_EQ(bytes_of(set_a, "node3-data"), bytes_of(set_b, "node3-data"));
  EXPECT_EQ(to_json(decode(set_a.form, set_a.views(), set_a.length)),
            to_json(decode(set_b.form, set_b.views(), set_b.length)));
}

TEST(LayoutBuilderTest, ClearEmptiesEveryNode) {
  LayoutBuilder builder(testing::example_schema());
  fill_example(builder);
  builder.clear();
  EXPECT_EQ(builder.length(), 0u);
  EXPECT_EQ(builder.buffer_sizes(),
            (std::vector<BufferSize>{{"node1-data", 0}, {"node2-offsets", 8}, {"node3-data", 0}}));
}

}  // namespace
}  // namespace layoutkit
