#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace layoutkit {

enum class PrimitiveType { float64, float32, int64, int32, int16, int8, uint8, boolean };

std::string_view primitive_name(PrimitiveType type) noexcept;
std::optional<PrimitiveType> primitive_from_name(std::string_view name) noexcept;
std::size_t primitive_width(PrimitiveType type) noexcept;
bool is_floating(PrimitiveType type) noexcept;

template <typename T>
struct primitive_of;
template <> struct primitive_of<double> { static constexpr PrimitiveType value = PrimitiveType::float64; };
template <> struct primitive_of<float> { static constexpr PrimitiveType value = PrimitiveType::float32; };
template <> struct primitive_of<std::int64_t> { static constexpr PrimitiveType value = PrimitiveType::int64; };
template <> struct primitive_of<std::int32_t> { static constexpr PrimitiveType value = PrimitiveType::int32; };
template <> struct primitive_of<std::int16_t> { static constexpr PrimitiveType value = PrimitiveType::int16; };
template <> struct primitive_of<std::int8_t> { static constexpr PrimitiveType value = PrimitiveType::int8; };
template <> struct primitive_of<std::uint8_t> { static constexpr PrimitiveType value = PrimitiveType::uint8; };
template <> struct primitive_of<bool> { static constexpr PrimitiveType value = PrimitiveType::boolean; };

template <typename T>
inline constexpr PrimitiveType primitive_of_v = primitive_of<T>::value;

enum class NodeKind { primitive, list_offset, record, indexed_option };

/// One node of a Form: the tree that describes how flat buffers assemble
/// into nested values.
///
/// Nodes are plain values. Factories leave form keys empty; `assign_form_keys`
/// numbers a whole tree "node0", "node1", ... in pre-order, which is what
/// builders do before serializing.
class FormNode {
 public:
  static FormNode primitive(PrimitiveType type);
  static FormNode list_offset(FormNode content);
  static FormNode indexed_option(FormNode content);
  /// Throws ConfigError on duplicate field names. Zero fields is allowed; such
  /// a record owns no buffers and a builder for it always has length 0.
  static FormNode record(std::vector<std::pair<std::string, FormNode>> fields);

  NodeKind kind() const noexcept { return kind_; }
  PrimitiveType primitive_type() const noexcept { return primitive_; }
  const std::string& form_key() const noexcept { return form_key_; }
  void set_form_key(std::string key) { form_key_ = std::move(key); }

  /// Content of a list_offset or indexed_option node.
  const FormNode& content() const;
  FormNode& content();

  /// Record fields, in declaration order; children()[i] belongs to field_names()[i].
  const std::vector<std::string>& field_names() const noexcept { return field_names_; }
  const std::vector<FormNode>& children() const noexcept { return children_; }
  std::vector<FormNode>& children() noexcept { return children_; }

  /// "{form_key}-data", "-offsets" or "-index"; records own no buffer.
  std::optional<std::string> buffer_name() const;

  bool operator==(const FormNode&) const = default;

 private:
  NodeKind kind_ = NodeKind::primitive;
  PrimitiveType primitive_ = PrimitiveType::float64;
  std::string form_key_;
  std::vector<std::string> field_names_;
  std::vector<FormNode> children_;
};

/// Renumbers form keys in pre-order starting at "node0"; returns the node count.
std::size_t assign_form_keys(FormNode& root);

/// Canonical JSON: no insignificant whitespace, keys in a fixed order.
std::string serialize(const FormNode& form);

/// Throws FormError whose message begins with the JSON path of the problem.
FormNode parse_form(std::string_view text);

/// Owned buffer names in pre-order.
std::vector<std::string> buffer_names(const FormNode& form);

/// Pre-order node count.
std::size_t node_count(const FormNode& form);

}  // namespace layoutkit
