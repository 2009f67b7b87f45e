#pragma once

// Compile-time builder composition. The layout is fixed by template
// arguments, so filling is a direct append into the right GrowableBuffer
// with no dispatch. Record field names are supplied at construction through
// a map from field id to name.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "layoutkit/error.hpp"
#include "layoutkit/form.hpp"
#include "layoutkit/growable_buffer.hpp"

namespace layoutkit::typed {

using UserDefinedMap = std::map<std::size_t, std::string>;

template <typename T>
class NumpyBuilder {
 public:
  using value_type = T;

  explicit NumpyBuilder(std::size_t panel_capacity = kDefaultPanelCapacity) : data_(panel_capacity) {}

  void append(T value) { data_.append(value); }
  void extend(std::span<const T> values) { data_.extend(values); }

  std::size_t length() const noexcept { return data_.length(); }
  const GrowableBuffer<T>& data() const noexcept { return data_; }

  void clear() { data_.clear(); }

  void set_id(std::size_t& id) { id_ = id++; }
  std::string form_key() const { return "node" + std::to_string(id_); }

  bool is_valid(std::string&) const { return true; }

  void buffer_nbytes(std::map<std::string, std::size_t>& names_nbytes) const {
    names_nbytes[form_key() + "-data"] = data_.nbytes();
  }

  void to_buffers(std::map<std::string, void*>& buffers) const {
    data_.concatenate_into(lookup(buffers, form_key() + "-data"));
  }

  FormNode form_node() const {
    FormNode node = FormNode::primitive(primitive_of_v<T>);
    node.set_form_key(form_key());
    return node;
  }

  std::string form() const { return serialize(form_node()); }

 protected:
  static void* lookup(std::map<std::string, void*>& buffers, const std::string& name) {
    auto it = buffers.find(name);
    if (it == buffers.end()) {
      throw SizeError("missing destination buffer \"" + name + "\"");
    }
    return it->second;
  }

 private:
  GrowableBuffer<T> data_;
  std::size_t id_ = 0;
};

/// Offset type first, as in ListOffsetBuilder<int64_t, NumpyBuilder<int32_t>>;
/// only 64-bit offsets are supported.
template <typename Offset, typename Content>
class ListOffsetBuilder {
  static_assert(std::is_same_v<Offset, std::int64_t>, "ListOffsetBuilder supports int64_t offsets only");

 public:
  explicit ListOffsetBuilder(std::size_t panel_capacity = kDefaultPanelCapacity) : offsets_(panel_capacity) {
    offsets_.append(0);
    std::size_t id = 0;
    set_id(id);
  }

  /// For contents that need constructor arguments (records).
  explicit ListOffsetBuilder(Content content, std::size_t panel_capacity = kDefaultPanelCapacity)
      : offsets_(panel_capacity), content_(std::move(content)) {
    offsets_.append(0);
    std::size_t id = 0;
    set_id(id);
  }

  Content& content() noexcept { return content_; }
  const Content& content() const noexcept { return content_; }

  Content& begin_list() {
    if (open_) {
      throw BuilderError(form_key() + ": begin_list called while a list is already open");
    }
    open_ = true;
    return content_;
  }

  void end_list() {
    if (!open_) {
      throw BuilderError(form_key() + ": end_list called without begin_list");
    }
    open_ = false;
    offsets_.append(static_cast<std::int64_t>(content_.length()));
  }

  std::size_t length() const noexcept { return offsets_.length() - 1; }
  const GrowableBuffer<std::int64_t>& offsets() const noexcept { return offsets_; }

  void clear() {
    offsets_.clear();
    offsets_.append(0);
    open_ = false;
    content_.clear();
  }

  void set_id(std::size_t& id) {
    id_ = id++;
    content_.set_id(id);
  }
  std::string form_key() const { return "node" + std::to_string(id_); }

  bool is_valid(std::string& error) const {
    if (open_) {
      error = "list still open at " + form_key();
      return false;
    }
    if (offsets_.last() != static_cast<std::int64_t>(content_.length())) {
      error = "offsets at " + form_key() + " end at " + std::to_string(offsets_.last()) + " but content " +
              content_.form_key() + " has length " + std::to_string(content_.length());
      return false;
    }
    return content_.is_valid(error);
  }

  void buffer_nbytes(std::map<std::string, std::size_t>& names_nbytes) const {
    names_nbytes[form_key() + "-offsets"] = offsets_.nbytes();
    content_.buffer_nbytes(names_nbytes);
  }

  void to_buffers(std::map<std::string, void*>& buffers) const {
    auto it = buffers.find(form_key() + "-offsets");
    if (it == buffers.end()) {
      throw SizeError("missing destination buffer \"" + form_key() + "-offsets\"");
    }
    offsets_.concatenate_into(it->second);
    content_.to_buffers(buffers);
  }

  FormNode form_node() const {
    FormNode node = FormNode::list_offset(content_.form_node());
    node.set_form_key(form_key());
    return node;
  }

  std::string form() const { return serialize(form_node()); }

 private:
  GrowableBuffer<std::int64_t> offsets_;
  Content content_;
  std::size_t id_ = 0;
  bool open_ = false;
};

template <typename Content>
class IndexedOptionBuilder {
 public:
  explicit IndexedOptionBuilder(std::size_t panel_capacity = kDefaultPanelCapacity) : index_(panel_capacity) {
    std::size_t id = 0;
    set_id(id);
  }

  explicit IndexedOptionBuilder(Content content, std::size_t panel_capacity = kDefaultPanelCapacity)
      : index_(panel_capacity), content_(std::move(content)) {
    std::size_t id = 0;
    set_id(id);
  }

  Content& content() noexcept { return content_; }

  /// Marks the next entry present; fill exactly one content element next.
  Content& append_valid() {
    index_.append(static_cast<std::int64_t>(content_.length()));
    return content_;
  }

  void append_missing() { index_.append(-1); }

  std::size_t length() const noexcept { return index_.length(); }

  void clear() {
    index_.clear();
    content_.clear();
  }

  void set_id(std::size_t& id) {
    id_ = id++;
    content_.set_id(id);
  }
  std::string form_key() const { return "node" + std::to_string(id_); }

  bool is_valid(std::string& error) const {
    auto content_length = static_cast<std::int64_t>(content_.length());
    bool ok = true;
    std::int64_t present = 0;
    index_.for_each([&](std::size_t i, std::int64_t value) {
      if (ok && (value < -1 || value >= content_length)) {
        error = "option index at " + form_key() + " out of range at position " + std::to_string(i);
        ok = false;
      }
      if (value >= 0) ++present;
    });
    if (ok && present != content_length) {
      error = "option " + form_key() + " has " + std::to_string(present) + " present entries but content " +
              content_.form_key() + " has length " + std::to_string(content_length);
      return false;
    }
    return ok && content_.is_valid(error);
  }

  void buffer_nbytes(std::map<std::string, std::size_t>& names_nbytes) const {
    names_nbytes[form_key() + "-index"] = index_.nbytes();
    content_.buffer_nbytes(names_nbytes);
  }

  void to_buffers(std::map<std::string, void*>& buffers) const {
    auto it = buffers.find(form_key() + "-index");
    if (it == buffers.end()) {
      throw SizeError("missing destination buffer \"" + form_key() + "-index\"");
    }
    index_.concatenate_into(it->second);
    content_.to_buffers(buffers);
  }

  FormNode form_node() const {
    FormNode node = FormNode::indexed_option(content_.form_node());
    node.set_form_key(form_key());
    return node;
  }

  std::string form() const { return serialize(form_node()); }

 private:
  GrowableBuffer<std::int64_t> index_;
  Content content_;
  std::size_t id_ = 0;
};

/// One record field: a user-chosen id (typically an enumerator) and its builder.
template <std::size_t FieldId, typename Builder>
struct RecordField {
  static constexpr std::size_t id = FieldId;
  using builder_type = Builder;
  Builder builder;
};

/// Record of heterogeneous builders. Names come from `fields_map`, which must
/// hold a distinct name for every field id. Fields whose builders need
/// constructor arguments (nested records) are passed in explicitly.
template <typename... Fields>
class RecordBuilder {
 public:
  explicit RecordBuilder(const UserDefinedMap& fields_map) { init(fields_map); }

  RecordBuilder(const UserDefinedMap& fields_map, typename Fields::builder_type... builders)
      : fields_(Fields{std::move(builders)}...) {
    init(fields_map);
  }

  template <std::size_t FieldId>
  auto& field() {
    return std::get<index_of<FieldId>()>(fields_).builder;
  }

  template <std::size_t FieldId>
  const auto& field() const {
    return std::get<index_of<FieldId>()>(fields_).builder;
  }

  std::size_t length() const {
    if constexpr (sizeof...(Fields) == 0) {
      return 0;
    } else {
      std::size_t shortest = SIZE_MAX;
      std::apply([&](const auto&... f) { ((shortest = std::min(shortest, f.builder.length())), ...); }, fields_);
      return shortest;
    }
  }

  void clear() {
    std::apply([](auto&... f) { (f.builder.clear(), ...); }, fields_);
  }

  void set_id(std::size_t& id) {
    id_ = id++;
    std::apply([&](auto&... f) { (f.builder.set_id(id), ...); }, fields_);
  }
  std::string form_key() const { return "node" + std::to_string(id_); }

  bool is_valid(std::string& error) const {
    bool ok = true;
    std::size_t first = 0;
    std::size_t i = 0;
    std::apply(
        [&](const auto&... f) {
          (
              [&] {
                if (!ok) return;
                std::size_t len = f.builder.length();
                if (i == 0) {
                  first = len;
                } else if (len != first) {
                  error = "record " + form_key() + " length mismatch: field \"" + names_[0] + "\" has " +
                          std::to_string(first) + " entries, field \"" + names_[i] + "\" has " +
                          std::to_string(len);
                  ok = false;
                }
                ++i;
              }(),
              ...);
        },
        fields_);
    if (!ok) return false;
    std::apply([&](const auto&... f) { ((ok = ok && f.builder.is_valid(error)), ...); }, fields_);
    return ok;
  }

  void buffer_nbytes(std::map<std::string, std::size_t>& names_nbytes) const {
    std::apply([&](const auto&... f) { (f.builder.buffer_nbytes(names_nbytes), ...); }, fields_);
  }

  void to_buffers(std::map<std::string, void*>& buffers) const {
    std::apply([&](const auto&... f) { (f.builder.to_buffers(buffers), ...); }, fields_);
  }

  FormNode form_node() const {
    std::vector<std::pair<std::string, FormNode>> contents;
    std::size_t i = 0;
    std::apply([&](const auto&... f) { (contents.emplace_back(names_[i++], f.builder.form_node()), ...); },
               fields_);
    FormNode node = FormNode::record(std::move(contents));
    node.set_form_key(form_key());
    return node;
  }

  std::string form() const { return serialize(form_node()); }

 private:
  template <std::size_t FieldId>
  static constexpr std::size_t index_of() {
    constexpr std::array<std::size_t, sizeof...(Fields)> ids{Fields::id...};
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == FieldId) return i;
    }
    return ids.size();
  }

  void init(const UserDefinedMap& fields_map) {
    std::set<std::string> seen;
    std::size_t i = 0;
    ((names_[i++] = name_for(fields_map, Fields::id, seen)), ...);
    std::size_t id = 0;
    set_id(id);
  }

  static std::string name_for(const UserDefinedMap& fields_map, std::size_t id, std::set<std::string>& seen) {
    auto it = fields_map.find(id);
    if (it == fields_map.end()) {
      throw ConfigError("no name given for record field id " + std::to_string(id));
    }
    if (!seen.insert(it->second).second) {
      throw ConfigError("duplicate record field \"" + it->second + "\"");
    }
    return it->second;
  }

  std::tuple<Fields...> fields_;
  std::array<std::string, sizeof...(Fields)> names_;
  std::size_t id_ = 0;
};

}  // namespace layoutkit::typed
