#include "layoutkit/logical_value.hpp"

#include "layoutkit/error.hpp"

#include <charconv>
#include <cstdlib>

namespace layoutkit {

using Json = nlohmann::ordered_json;

LogicalValue LogicalValue::real(double value, PrimitiveType type) {
  LogicalValue out;
  out.data_ = Number{type, value};
  return out;
}

LogicalValue LogicalValue::integer(std::int64_t value, PrimitiveType type) {
  LogicalValue out;
  out.data_ = Number{type, value};
  return out;
}

LogicalValue LogicalValue::boolean(bool value) {
  LogicalValue out;
  out.data_ = Number{PrimitiveType::boolean, value};
  return out;
}

LogicalValue LogicalValue::list(List items) {
  LogicalValue out;
  out.data_ = std::move(items);
  return out;
}

LogicalValue LogicalValue::record(Record fields) {
  LogicalValue out;
  out.data_ = std::move(fields);
  return out;
}

namespace {

Json number_json(const LogicalValue::Number& number) {
  if (const auto* b = std::get_if<bool>(&number.value)) return *b;
  if (const auto* i = std::get_if<std::int64_t>(&number.value)) return *i;
  double value = std::get<double>(number.value);
  if (number.type == PrimitiveType::float32) {
    // Shortest digits that identify the float32, re-read as a double so the
    // JSON writer does not print float32 rounding noise.
    char text[32];
    auto result = std::to_chars(text, text + sizeof(text) - 1, static_cast<float>(value));
    *result.ptr = '\0';
    value = std::strtod(text, nullptr);
  }
  return value;
}

}  // namespace

Json to_json_value(const LogicalValue& value) {
  if (value.is_missing()) return nullptr;
  if (value.is_number()) return number_json(value.number());
  if (value.is_list()) {
    Json out = Json::array();
    for (const auto& item : value.items()) out.push_back(to_json_value(item));
    return out;
  }
  Json out = Json::object();
  for (const auto& [name, field] : value.fields()) out[name] = to_json_value(field);
  return out;
}

std::string to_json(const LogicalValue& value) { return to_json_value(value).dump(); }

std::string to_json(const std::vector<LogicalValue>& values) {
  Json out = Json::array();
  for (const auto& value : values) out.push_back(to_json_value(value));
  return out.dump();
}

LogicalValue from_json_value(const Json& json) {
  switch (json.type()) {
    case Json::value_t::null:
      return LogicalValue::missing();
    case Json::value_t::boolean:
      return LogicalValue::boolean(json.get<bool>());
    case Json::value_t::number_integer:
      return LogicalValue::integer(json.get<std::int64_t>());
    case Json::value_t::number_unsigned: {
      auto u = json.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(INT64_MAX)) return LogicalValue::integer(static_cast<std::int64_t>(u));
      return LogicalValue::real(static_cast<double>(u));
    }
    case Json::value_t::number_float:
      return LogicalValue::real(json.get<double>());
    case Json::value_t::array: {
      LogicalValue::List items;
      items.reserve(json.size());
      for (const auto& item : json) items.push_back(from_json_value(item));
      return LogicalValue::list(std::move(items));
    }
    case Json::value_t::object: {
      LogicalValue::Record fields;
      for (const auto& [name, item] : json.items()) fields.emplace_back(name, from_json_value(item));
      return LogicalValue::record(std::move(fields));
    }
    default:
      break;
  }
  throw Error("unsupported JSON value: " + json.dump());
}

}  // namespace layoutkit
