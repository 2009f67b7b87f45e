#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutkit/form.hpp"

namespace layoutkit {

/// A decoded value: number, list, record or missing.
class LogicalValue {
 public:
  struct Missing {
    bool operator==(const Missing&) const = default;
  };
  struct Number {
    PrimitiveType type = PrimitiveType::float64;
    std::variant<std::int64_t, double, bool> value;
    bool operator==(const Number&) const = default;
  };
  using List = std::vector<LogicalValue>;
  using Record = std::vector<std::pair<std::string, LogicalValue>>;

  LogicalValue() : data_(Missing{}) {}

  static LogicalValue missing() { return LogicalValue(); }
  static LogicalValue real(double value, PrimitiveType type = PrimitiveType::float64);
  static LogicalValue integer(std::int64_t value, PrimitiveType type = PrimitiveType::int64);
  static LogicalValue boolean(bool value);
  static LogicalValue list(List items);
  static LogicalValue record(Record fields);

  bool is_missing() const noexcept { return std::holds_alternative<Missing>(data_); }
  bool is_number() const noexcept { return std::holds_alternative<Number>(data_); }
  bool is_list() const noexcept { return std::holds_alternative<List>(data_); }
  bool is_record() const noexcept { return std::holds_alternative<Record>(data_); }

  const Number& number() const { return std::get<Number>(data_); }
  const List& items() const { return std::get<List>(data_); }
  List& items() { return std::get<List>(data_); }
  const Record& fields() const { return std::get<Record>(data_); }
  Record& fields() { return std::get<Record>(data_); }

  bool operator==(const LogicalValue&) const = default;

 private:
  std::variant<Missing, Number, List, Record> data_;
};

/// Missing → null, records keep field order, floats in shortest round-trip form
/// for their own width.
nlohmann::ordered_json to_json_value(const LogicalValue& value);
std::string to_json(const LogicalValue& value);
std::string to_json(const std::vector<LogicalValue>& values);

/// Type-discovering conversion: integers → int64 (unsigned beyond int64 → float64),
/// other numbers → float64, objects → records in document order.
LogicalValue from_json_value(const nlohmann::ordered_json& json);

}  // namespace layoutkit
