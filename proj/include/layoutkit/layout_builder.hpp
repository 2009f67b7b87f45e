#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "layoutkit/error.hpp"
#include "layoutkit/form.hpp"
#include "layoutkit/growable_buffer.hpp"

namespace layoutkit {

class PrimitiveBuilder;
class ListOffsetBuilder;
class RecordBuilder;
class OptionBuilder;

/// Name and size of one buffer owned by a builder tree, in pre-order.
struct BufferSize {
  std::string name;
  std::size_t nbytes = 0;

  bool operator==(const BufferSize&) const = default;
};

/// Base of every node in a runtime-schema builder tree.
///
/// Filling never checks cross-node invariants; call LayoutBuilder::is_valid
/// (as often as the caller wants) before handing data out.
class BuilderNode {
 public:
  virtual ~BuilderNode() = default;
  BuilderNode(const BuilderNode&) = delete;
  BuilderNode& operator=(const BuilderNode&) = delete;

  NodeKind kind() const noexcept { return kind_; }
  std::size_t id() const noexcept { return id_; }
  std::string form_key() const { return "node" + std::to_string(id_); }

  virtual std::size_t length() const = 0;

  /// Appends a diagnostic and returns false on the first violated invariant
  /// in this subtree (pre-order).
  virtual bool validate(std::string& diagnostic) const = 0;

  virtual void collect_sizes(std::vector<BufferSize>& out) const = 0;
  /// Bytes of the buffer this node owns itself (0 for records).
  virtual std::size_t own_nbytes() const { return 0; }
  /// Copies this node's own buffer; `destination` holds at least own_nbytes().
  virtual void write_own(std::span<std::byte>) const {}
  virtual void write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const = 0;
  virtual void clear() = 0;

  /// Checked downcast; throws BuilderError naming the node on a kind mismatch.
  template <typename B>
  B& as();

 protected:
  BuilderNode(NodeKind kind, std::size_t id) : kind_(kind), id_(id) {}

  std::span<std::byte> destination_for(const std::map<std::string, std::span<std::byte>>& destinations,
                                       const std::string& name, std::size_t nbytes) const;

 private:
  NodeKind kind_;
  std::size_t id_;
};

class PrimitiveBuilder final : public BuilderNode {
 public:
  PrimitiveBuilder(std::size_t id, PrimitiveType type, std::size_t panel_capacity);

  PrimitiveType type() const noexcept { return type_; }

  /// Exact-type append; T must be the declared element type.
  template <typename T>
  void append(T value) {
    if (auto* buffer = std::get_if<GrowableBuffer<T>>(&data_)) {
      buffer->append(value);
    } else {
      throw BuilderError(form_key() + ": cannot append " + std::string(primitive_name(primitive_of_v<T>)) +
                         " to a " + std::string(primitive_name(type_)) + " node");
    }
  }

  template <typename T>
  void extend(std::span<const T> values) {
    if (auto* buffer = std::get_if<GrowableBuffer<T>>(&data_)) {
      buffer->extend(values);
    } else {
      throw BuilderError(form_key() + ": cannot extend " + std::string(primitive_name(type_)) + " node with " +
                         std::string(primitive_name(primitive_of_v<T>)));
    }
  }

  /// Converting appends. Throw BuilderError if the value does not fit the
  /// declared type exactly (out of range, fractional into an integer type,
  /// number into bool).
  void append_integer(std::int64_t value);
  void append_real(double value);
  void append_bool(bool value);

  /// Appends size / width elements given as little-endian bytes of the
  /// declared type. Throws BuilderError if the size is not a whole number of
  /// elements.
  void extend_bytes(std::span<const std::byte> bytes);

  template <typename T>
  const GrowableBuffer<T>& buffer() const {
    return std::get<GrowableBuffer<T>>(data_);
  }

  std::size_t length() const override;
  bool validate(std::string& diagnostic) const override;
  void collect_sizes(std::vector<BufferSize>& out) const override;
  std::size_t own_nbytes() const override;
  void write_own(std::span<std::byte> destination) const override;
  void write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const override;
  void clear() override;

 private:
  using Storage = std::variant<GrowableBuffer<double>, GrowableBuffer<float>, GrowableBuffer<std::int64_t>,
                               GrowableBuffer<std::int32_t>, GrowableBuffer<std::int16_t>,
                               GrowableBuffer<std::int8_t>, GrowableBuffer<std::uint8_t>, GrowableBuffer<bool>>;

  PrimitiveType type_;
  Storage data_;
};

class ListOffsetBuilder final : public BuilderNode {
 public:
  ListOffsetBuilder(std::size_t id, std::unique_ptr<BuilderNode> content, std::size_t panel_capacity);

  /// Opens a list and returns the content builder to fill it.
  BuilderNode& begin_list();
  void end_list();
  bool list_open() const noexcept { return open_; }

  BuilderNode& content() noexcept { return *content_; }
  const BuilderNode& content() const noexcept { return *content_; }

  const GrowableBuffer<std::int64_t>& offsets() const noexcept { return offsets_; }
  /// Direct access for corruption tests; bypasses every invariant.
  GrowableBuffer<std::int64_t>& raw_offsets() noexcept { return offsets_; }

  std::size_t length() const override { return offsets_.length() == 0 ? 0 : offsets_.length() - 1; }
  bool validate(std::string& diagnostic) const override;
  void collect_sizes(std::vector<BufferSize>& out) const override;
  std::size_t own_nbytes() const override { return offsets_.nbytes(); }
  void write_own(std::span<std::byte> destination) const override { offsets_.concatenate_into(destination); }
  void write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const override;
  void clear() override;

 private:
  GrowableBuffer<std::int64_t> offsets_;
  std::unique_ptr<BuilderNode> content_;
  bool open_ = false;
};

class RecordBuilder final : public BuilderNode {
 public:
  RecordBuilder(std::size_t id, std::vector<std::pair<std::string, std::unique_ptr<BuilderNode>>> fields);

  /// Throws BuilderError for an unknown name.
  BuilderNode& field(std::string_view name);
  const BuilderNode& field(std::string_view name) const;

  template <typename B>
  B& field(std::string_view name) {
    return field(name).template as<B>();
  }

  BuilderNode& field_at(std::size_t index) { return *fields_.at(index).second; }
  const BuilderNode& field_at(std::size_t index) const { return *fields_.at(index).second; }
  const std::string& field_name(std::size_t index) const { return fields_.at(index).first; }
  std::size_t field_count() const noexcept { return fields_.size(); }

  /// Minimum child length while filling; uniform once valid. Zero fields → 0.
  std::size_t length() const override;
  bool validate(std::string& diagnostic) const override;
  void collect_sizes(std::vector<BufferSize>& out) const override;
  void write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const override;
  void clear() override;

 private:
  std::vector<std::pair<std::string, std::unique_ptr<BuilderNode>>> fields_;
};

class OptionBuilder final : public BuilderNode {
 public:
  OptionBuilder(std::size_t id, std::unique_ptr<BuilderNode> content, std::size_t panel_capacity);

  /// Records a present value at the current content length; the caller then
  /// fills exactly one content element through the returned builder.
  BuilderNode& append_valid();
  void append_missing();

  BuilderNode& content() noexcept { return *content_; }
  const BuilderNode& content() const noexcept { return *content_; }

  const GrowableBuffer<std::int64_t>& index() const noexcept { return index_; }
  /// Direct access for corruption tests; bypasses every invariant.
  GrowableBuffer<std::int64_t>& raw_index() noexcept { return index_; }

  std::size_t length() const override { return index_.length(); }
  bool validate(std::string& diagnostic) const override;
  void collect_sizes(std::vector<BufferSize>& out) const override;
  std::size_t own_nbytes() const override { return index_.nbytes(); }
  void write_own(std::span<std::byte> destination) const override { index_.concatenate_into(destination); }
  void write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const override;
  void clear() override;

 private:
  GrowableBuffer<std::int64_t> index_;
  std::unique_ptr<BuilderNode> content_;
};

template <typename B>
B& BuilderNode::as() {
  static_assert(std::is_base_of_v<BuilderNode, B>);
  NodeKind expected = std::is_same_v<B, PrimitiveBuilder>    ? NodeKind::primitive
                      : std::is_same_v<B, ListOffsetBuilder> ? NodeKind::list_offset
                      : std::is_same_v<B, RecordBuilder>     ? NodeKind::record
                                                             : NodeKind::indexed_option;
  if (kind_ != expected) {
    throw BuilderError(form_key() + ": builder is not of the requested kind");
  }
  return static_cast<B&>(*this);
}

/// Builder tree constructed at run time from a schema (a Form tree whose
/// form keys are ignored and reassigned "node0".. in pre-order).
///
/// Three phases: construct from the schema, fill through the node handles,
/// then report buffer sizes and copy the buffers into caller-owned memory
/// together with the Form text and the row count.
class LayoutBuilder {
 public:
  explicit LayoutBuilder(FormNode schema, std::size_t panel_capacity = kDefaultPanelCapacity);

  BuilderNode& root() noexcept { return *root_; }
  const BuilderNode& root() const noexcept { return *root_; }

  /// Pre-order node access; node(i).form_key() == "node{i}".
  BuilderNode& node(std::size_t id) { return *nodes_.at(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  std::size_t length() const { return root_->length(); }

  /// Empty optional when every invariant holds, otherwise a diagnostic naming
  /// the first failing node.
  std::optional<std::string> check() const;
  bool is_valid(std::string& error) const;

  /// One entry per owned buffer in pre-order; same order as buffer_names(schema()).
  std::vector<BufferSize> buffer_sizes() const;
  void buffer_nbytes(std::map<std::string, std::size_t>& names_nbytes) const;

  /// Fills every destination. Requires a valid tree; throws BuilderError if it
  /// is not and SizeError for a missing or undersized destination. No region
  /// is written unless all checks pass.
  void to_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const;
  /// Caller guarantees each pointer addresses at least the reported nbytes.
  void to_buffers(const std::map<std::string, void*>& buffers) const;

  /// Fills the `index`-th buffer of buffer_sizes() alone, with the same checks.
  void to_buffer(std::size_t index, std::span<std::byte> destination) const;
  std::size_t buffer_count() const noexcept { return buffer_owners_.size(); }

  const std::string& form() const noexcept { return form_; }
  const FormNode& schema() const noexcept { return schema_; }

  void clear() { root_->clear(); }

 private:
  std::unique_ptr<BuilderNode> build(const FormNode& node, std::size_t panel_capacity);

  FormNode schema_;
  std::string form_;
  std::vector<BuilderNode*> nodes_;
  std::vector<BuilderNode*> buffer_owners_;
  std::unique_ptr<BuilderNode> root_;
};

}  // namespace layoutkit
