#pragma once

// Random schemas and values for property tests, plus a generic driver that
// fills a runtime builder from logical values through the public fill API.

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "layoutkit/form.hpp"
#include "layoutkit/layout_builder.hpp"
#include "layoutkit/logical_value.hpp"

namespace layoutkit::testing {

using Rng = std::mt19937_64;

inline PrimitiveType random_primitive(Rng& rng) {
  static constexpr PrimitiveType kTypes[] = {PrimitiveType::float64, PrimitiveType::float32, PrimitiveType::int64,
                                             PrimitiveType::int32,   PrimitiveType::int16,   PrimitiveType::int8,
                                             PrimitiveType::uint8,   PrimitiveType::boolean};
  return kTypes[rng() % std::size(kTypes)];
}

/// Random schema with at most `max_depth` levels of nesting below the root.
inline FormNode random_schema(Rng& rng, int max_depth) {
  int choice = max_depth <= 0 ? 0 : static_cast<int>(rng() % 4);
  switch (choice) {
    case 1:
      return FormNode::list_offset(random_schema(rng, max_depth - 1));
    case 2: {
      std::vector<std::pair<std::string, FormNode>> fields;
      std::size_t count = 1 + rng() % 3;
      for (std::size_t i = 0; i < count; ++i) {
        fields.emplace_back("f" + std::to_string(i), random_schema(rng, max_depth - 1));
      }
      return FormNode::record(std::move(fields));
    }
    case 3: {
      FormNode content = random_schema(rng, max_depth - 1);
      if (content.kind() == NodeKind::indexed_option) return content;
      return FormNode::indexed_option(std::move(content));
    }
    default:
      return FormNode::primitive(random_primitive(rng));
  }
}

inline LogicalValue random_number(Rng& rng, PrimitiveType type) {
  auto between = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  switch (type) {
    case PrimitiveType::float64:
      return LogicalValue::real(std::uniform_real_distribution<double>(-1e6, 1e6)(rng), type);
    case PrimitiveType::float32:
      return LogicalValue::real(static_cast<float>(std::uniform_real_distribution<double>(-1e3, 1e3)(rng)), type);
    case PrimitiveType::int64:
      return LogicalValue::integer(static_cast<std::int64_t>(rng()), type);
    case PrimitiveType::int32:
      return LogicalValue::integer(between(INT32_MIN, INT32_MAX), type);
    case PrimitiveType::int16:
      return LogicalValue::integer(between(INT16_MIN, INT16_MAX), type);
    case PrimitiveType::int8:
      return LogicalValue::integer(between(INT8_MIN, INT8_MAX), type);
    case PrimitiveType::uint8:
      return LogicalValue::integer(between(0, 255), type);
    case PrimitiveType::boolean:
      return LogicalValue::boolean(rng() % 2 == 0);
  }
  return LogicalValue::missing();
}

inline LogicalValue random_value(Rng& rng, const FormNode& schema) {
  switch (schema.kind()) {
    case NodeKind::primitive:
      return random_number(rng, schema.primitive_type());
    case NodeKind::list_offset: {
      LogicalValue::List items;
      std::size_t n = rng() % 5;
      for (std::size_t i = 0; i < n; ++i) items.push_back(random_value(rng, schema.content()));
      return LogicalValue::list(std::move(items));
    }
    case NodeKind::indexed_option:
      if (rng() % 3 == 0) return LogicalValue::missing();
      return random_value(rng, schema.content());
    case NodeKind::record: {
      LogicalValue::Record fields;
      for (std::size_t i = 0; i < schema.children().size(); ++i) {
        fields.emplace_back(schema.field_names()[i], random_value(rng, schema.children()[i]));
      }
      return LogicalValue::record(std::move(fields));
    }
  }
  return LogicalValue::missing();
}

template <typename T>
void append_exact(PrimitiveBuilder& builder, const LogicalValue::Number& number) {
  if constexpr (std::is_same_v<T, bool>) {
    builder.append<T>(std::get<bool>(number.value));
  } else if constexpr (std::is_floating_point_v<T>) {
    builder.append<T>(static_cast<T>(std::get<double>(number.value)));
  } else {
    builder.append<T>(static_cast<T>(std::get<std::int64_t>(number.value)));
  }
}

/// Writes one logical value through the builder's fill API.
inline void fill(BuilderNode& node, const LogicalValue& value) {
  switch (node.kind()) {
    case NodeKind::primitive: {
      auto& builder = node.as<PrimitiveBuilder>();
      const auto& number = value.number();
      switch (builder.type()) {
        case PrimitiveType::float64: append_exact<double>(builder, number); break;
        case PrimitiveType::float32: append_exact<float>(builder, number); break;
        case PrimitiveType::int64: append_exact<std::int64_t>(builder, number); break;
        case PrimitiveType::int32: append_exact<std::int32_t>(builder, number); break;
        case PrimitiveType::int16: append_exact<std::int16_t>(builder, number); break;
        case PrimitiveType::int8: append_exact<std::int8_t>(builder, number); break;
        case PrimitiveType::uint8: append_exact<std::uint8_t>(builder, number); break;
        case PrimitiveType::boolean: append_exact<bool>(builder, number); break;
      }
      return;
    }
    case NodeKind::list_offset: {
      auto& list = node.as<ListOffsetBuilder>();
      auto& content = list.begin_list();
      for (const auto& item : value.items()) fill(content, item);
      list.end_list();
      return;
    }
    case NodeKind::indexed_option: {
      auto& option = node.as<OptionBuilder>();
      if (value.is_missing()) {
        option.append_missing();
      } else {
        fill(option.append_valid(), value);
      }
      return;
    }
    case NodeKind::record: {
      auto& record = node.as<RecordBuilder>();
      for (const auto& [name, field] : value.fields()) fill(record.field(name), field);
      return;
    }
  }
}

/// A random schema with `rows` random values written into a fresh builder.
struct FilledCase {
  FormNode schema;
  std::vector<LogicalValue> values;
};

inline FilledCase random_case(Rng& rng, int max_depth, std::size_t max_rows) {
  FilledCase out{random_schema(rng, max_depth), {}};
  std::size_t rows = rng() % (max_rows + 1);
  for (std::size_t i = 0; i < rows; ++i) out.values.push_back(random_value(rng, out.schema));
  return out;
}

}  // namespace layoutkit::testing
