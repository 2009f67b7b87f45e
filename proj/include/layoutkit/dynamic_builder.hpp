#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "layoutkit/bufferset.hpp"
#include "layoutkit/form.hpp"
#include "layoutkit/growable_buffer.hpp"
#include "layoutkit/logical_value.hpp"

namespace layoutkit {

/// Layout type discovered so far at one position of a dynamic builder.
///
/// Types only generalize: unknown becomes concrete, bool widens to int64 and
/// int64 to float64, any node may become option-wrapped, and records gain
/// fields (option-wrapped, since earlier rows lack them). A list never
/// becomes a record or a number, and so on; those are kind conflicts.
struct InferredType {
  enum class Kind { unknown, boolean, integer, real, list, record, option };

  Kind kind = Kind::unknown;
  std::vector<std::string> field_names;
  std::vector<InferredType> children;

  static InferredType of(const LogicalValue& value);

  /// Least general type covering both; throws BuilderError naming `path` on a
  /// kind conflict.
  static InferredType join(const InferredType& a, const InferredType& b, const std::string& path);

  bool operator==(const InferredType&) const = default;
};

/// Builder that discovers the layout from the values appended to it.
///
/// Every append that needs no type change goes straight into the buffers;
/// otherwise the joined type is computed first, existing storage is promoted
/// to it, and only then is the value written, so a rejected value leaves the
/// builder untouched. An empty builder snapshots as a float64 NumpyArray.
class DynamicBuilder {
 public:
  explicit DynamicBuilder(std::size_t panel_capacity = kDefaultPanelCapacity);
  ~DynamicBuilder();
  DynamicBuilder(DynamicBuilder&&) noexcept;
  DynamicBuilder& operator=(DynamicBuilder&&) noexcept;

  void append_value(const LogicalValue& value);

  std::size_t length() const;
  InferredType inferred_type() const;

  /// Form with form keys assigned in pre-order.
  FormNode form_node() const;
  std::string form() const;

  /// Form text, row count and one contiguous buffer per node.
  BufferSet snapshot() const;

 private:
  struct Node;

  std::size_t panel_capacity_;
  std::unique_ptr<Node> root_;
  std::size_t rows_ = 0;
};

}  // namespace layoutkit
