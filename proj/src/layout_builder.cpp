#include "layoutkit/layout_builder.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

namespace layoutkit {

namespace {

template <typename T>
GrowableBuffer<T> make_buffer(std::size_t capacity) {
  return GrowableBuffer<T>(capacity);
}

std::string describe(std::int64_t value) { return std::to_string(value); }

std::string describe(double value) {
  char text[32];
  auto result = std::to_chars(text, text + sizeof(text), value);
  return std::string(text, result.ptr);
}

}  // namespace

std::span<std::byte> BuilderNode::destination_for(const std::map<std::string, std::span<std::byte>>& destinations,
                                                  const std::string& name, std::size_t nbytes) const {
  auto it = destinations.find(name);
  if (it == destinations.end()) {
    throw SizeError("missing destination buffer \"" + name + "\"");
  }
  if (it->second.size() < nbytes) {
    throw SizeError("destination buffer \"" + name + "\" holds " + std::to_string(it->second.size()) +
                    " bytes, needs " + std::to_string(nbytes));
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// PrimitiveBuilder

PrimitiveBuilder::PrimitiveBuilder(std::size_t id, PrimitiveType type, std::size_t panel_capacity)
    : BuilderNode(NodeKind::primitive, id), type_(type), data_(make_buffer<double>(panel_capacity)) {
  switch (type) {
    case PrimitiveType::float64:
      break;
    case PrimitiveType::float32:
      data_ = make_buffer<float>(panel_capacity);
      break;
    case PrimitiveType::int64:
      data_ = make_buffer<std::int64_t>(panel_capacity);
      break;
    case PrimitiveType::int32:
      data_ = make_buffer<std::int32_t>(panel_capacity);
      break;
    case PrimitiveType::int16:
      data_ = make_buffer<std::int16_t>(panel_capacity);
      break;
    case PrimitiveType::int8:
      data_ = make_buffer<std::int8_t>(panel_capacity);
      break;
    case PrimitiveType::uint8:
      data_ = make_buffer<std::uint8_t>(panel_capacity);
      break;
    case PrimitiveType::boolean:
      data_ = make_buffer<bool>(panel_capacity);
      break;
  }
}

void PrimitiveBuilder::append_integer(std::int64_t value) {
  std::visit(
      [&](auto& buffer) {
        using T = typename std::decay_t<decltype(buffer)>::value_type;
        if constexpr (std::is_same_v<T, bool>) {
          throw BuilderError(form_key() + ": cannot store number " + describe(value) + " in a bool node");
        } else if constexpr (std::is_floating_point_v<T>) {
          auto converted = static_cast<T>(value);
          if (static_cast<long double>(converted) != static_cast<long double>(value)) {
            throw BuilderError(form_key() + ": integer " + describe(value) + " is not exactly representable as " +
                               std::string(primitive_name(type_)));
          }
          buffer.append(converted);
        } else {
          if (!std::in_range<T>(value)) {
            throw BuilderError(form_key() + ": integer " + describe(value) + " out of range for " +
                               std::string(primitive_name(type_)));
          }
          buffer.append(static_cast<T>(value));
        }
      },
      data_);
}

void PrimitiveBuilder::append_real(double value) {
  std::visit(
      [&](auto& buffer) {
        using T = typename std::decay_t<decltype(buffer)>::value_type;
        if constexpr (std::is_same_v<T, bool>) {
          throw BuilderError(form_key() + ": cannot store number " + describe(value) + " in a bool node");
        } else if constexpr (std::is_same_v<T, double>) {
          buffer.append(value);
        } else if constexpr (std::is_same_v<T, float>) {
          if (std::isfinite(value) && std::fabs(value) > std::numeric_limits<float>::max()) {
            throw BuilderError(form_key() + ": " + describe(value) + " out of range for float32");
          }
          buffer.append(static_cast<float>(value));
        } else {
          double integral = 0.0;
          bool whole = std::isfinite(value) && std::modf(value, &integral) == 0.0;
          double upper = std::ldexp(1.0, std::numeric_limits<T>::digits);
          double lower = std::is_signed_v<T> ? -upper : 0.0;
          if (!whole || value < lower || value >= upper) {
            throw BuilderError(form_key() + ": " + describe(value) + " does not fit " +
                               std::string(primitive_name(type_)) + " without loss");
          }
          buffer.append(static_cast<T>(value));
        }
      },
      data_);
}

void PrimitiveBuilder::append_bool(bool value) {
  if (auto* buffer = std::get_if<GrowableBuffer<bool>>(&data_)) {
    buffer->append(value);
  } else {
    throw BuilderError(form_key() + ": cannot store a boolean in a " + std::string(primitive_name(type_)) +
                       " node");
  }
}

void PrimitiveBuilder::extend_bytes(std::span<const std::byte> bytes) {
  std::size_t width = primitive_width(type_);
  if (bytes.size() % width != 0) {
    throw BuilderError(form_key() + ": " + std::to_string(bytes.size()) + " bytes is not a whole number of " +
                       std::string(primitive_name(type_)) + " elements");
  }
  std::visit(
      [&](auto& buffer) {
        using T = typename std::decay_t<decltype(buffer)>::value_type;
        std::size_t count = bytes.size() / width;
        for (std::size_t i = 0; i < count; ++i) {
          std::array<std::byte, sizeof(T)> raw;
          std::memcpy(raw.data(), bytes.data() + i * sizeof(T), sizeof(T));
          if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
            std::reverse(raw.begin(), raw.end());
          }
          if constexpr (std::is_same_v<T, bool>) {
            buffer.append(raw[0] != std::byte{0});
          } else {
            buffer.append(std::bit_cast<T>(raw));
          }
        }
      },
      data_);
}

std::size_t PrimitiveBuilder::length() const {
  return std::visit([](const auto& buffer) { return buffer.length(); }, data_);
}

bool PrimitiveBuilder::validate(std::string&) const { return true; }

void PrimitiveBuilder::collect_sizes(std::vector<BufferSize>& out) const {
  out.push_back({form_key() + "-data", std::visit([](const auto& b) { return b.nbytes(); }, data_)});
}

void PrimitiveBuilder::write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const {
  std::visit(
      [&](const auto& buffer) {
        buffer.concatenate_into(destination_for(destinations, form_key() + "-data", buffer.nbytes()));
      },
      data_);
}

std::size_t PrimitiveBuilder::own_nbytes() const {
  return std::visit([](const auto& b) { return b.nbytes(); }, data_);
}

void PrimitiveBuilder::write_own(std::span<std::byte> destination) const {
  std::visit([&](const auto& buffer) { buffer.concatenate_into(destination); }, data_);
}

void PrimitiveBuilder::clear() {
  std::visit([](auto& buffer) { buffer.clear(); }, data_);
}

// ---------------------------------------------------------------------------
// ListOffsetBuilder

ListOffsetBuilder::ListOffsetBuilder(std::size_t id, std::unique_ptr<BuilderNode> content,
                                     std::size_t panel_capacity)
    : BuilderNode(NodeKind::list_offset, id), offsets_(panel_capacity), content_(std::move(content)) {
  offsets_.append(0);
}

BuilderNode& ListOffsetBuilder::begin_list() {
  if (open_) {
    throw BuilderError(form_key() + ": begin_list called while a list is already open");
  }
  open_ = true;
  return *content_;
}

void ListOffsetBuilder::end_list() {
  if (!open_) {
    throw BuilderError(form_key() + ": end_list called without begin_list");
  }
  offsets_.append(static_cast<std::int64_t>(content_->length()));
  open_ = false;
}

bool ListOffsetBuilder::validate(std::string& diagnostic) const {
  if (open_) {
    diagnostic = "list still open at " + form_key();
    return false;
  }
  if (offsets_.length() == 0) {
    diagnostic = "offsets at " + form_key() + " are empty";
    return false;
  }
  std::optional<std::string> problem;
  std::int64_t previous = 0;
  offsets_.for_each([&](std::size_t i, std::int64_t value) {
    if (problem) return;
    if (i == 0 && value != 0) {
      problem = "offsets at " + form_key() + " start at " + std::to_string(value) + ", expected 0";
    } else if (i > 0 && value < previous) {
      problem = "offsets at " + form_key() + " decrease at position " + std::to_string(i) + " (" +
                std::to_string(previous) + " > " + std::to_string(value) + ")";
    }
    previous = value;
  });
  if (problem) {
    diagnostic = *problem;
    return false;
  }
  auto content_length = static_cast<std::int64_t>(content_->length());
  if (offsets_.last() != content_length) {
    diagnostic = "offsets at " + form_key() + " end at " + std::to_string(offsets_.last()) + " but content " +
                 content_->form_key() + " has length " + std::to_string(content_length);
    return false;
  }
  return content_->validate(diagnostic);
}

void ListOffsetBuilder::collect_sizes(std::vector<BufferSize>& out) const {
  out.push_back({form_key() + "-offsets", offsets_.nbytes()});
  content_->collect_sizes(out);
}

void ListOffsetBuilder::write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const {
  offsets_.concatenate_into(destination_for(destinations, form_key() + "-offsets", offsets_.nbytes()));
  content_->write_buffers(destinations);
}

void ListOffsetBuilder::clear() {
  offsets_.clear();
  offsets_.append(0);
  open_ = false;
  content_->clear();
}

// ---------------------------------------------------------------------------
// RecordBuilder

RecordBuilder::RecordBuilder(std::size_t id,
                             std::vector<std::pair<std::string, std::unique_ptr<BuilderNode>>> fields)
    : BuilderNode(NodeKind::record, id), fields_(std::move(fields)) {}

BuilderNode& RecordBuilder::field(std::string_view name) {
  return const_cast<BuilderNode&>(std::as_const(*this).field(name));
}

const BuilderNode& RecordBuilder::field(std::string_view name) const {
  for (const auto& [field_name, child] : fields_) {
    if (field_name == name) return *child;
  }
  throw BuilderError(form_key() + ": unknown field \"" + std::string(name) + "\"");
}

std::size_t RecordBuilder::length() const {
  if (fields_.empty()) return 0;
  std::size_t shortest = std::numeric_limits<std::size_t>::max();
  for (const auto& [name, child] : fields_) {
    shortest = std::min(shortest, child->length());
  }
  return shortest;
}

bool RecordBuilder::validate(std::string& diagnostic) const {
  for (std::size_t i = 1; i < fields_.size(); ++i) {
    std::size_t expected = fields_[0].second->length();
    std::size_t actual = fields_[i].second->length();
    if (actual != expected) {
      diagnostic = "record " + form_key() + " length mismatch: field \"" + fields_[0].first + "\" has " +
                   std::to_string(expected) + " entries, field \"" + fields_[i].first + "\" has " +
                   std::to_string(actual);
      return false;
    }
  }
  for (const auto& [name, child] : fields_) {
    if (!child->validate(diagnostic)) return false;
  }
  return true;
}

void RecordBuilder::collect_sizes(std::vector<BufferSize>& out) const {
  for (const auto& [name, child] : fields_) {
    child->collect_sizes(out);
  }
}

void RecordBuilder::write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const {
  for (const auto& [name, child] : fields_) {
    child->write_buffers(destinations);
  }
}

void RecordBuilder::clear() {
  for (auto& [name, child] : fields_) {
    child->clear();
  }
}

// ---------------------------------------------------------------------------
// OptionBuilder

OptionBuilder::OptionBuilder(std::size_t id, std::unique_ptr<BuilderNode> content, std::size_t panel_capacity)
    : BuilderNode(NodeKind::indexed_option, id), index_(panel_capacity), content_(std::move(content)) {}

BuilderNode& OptionBuilder::append_valid() {
  index_.append(static_cast<std::int64_t>(content_->length()));
  return *content_;
}

void OptionBuilder::append_missing() { index_.append(-1); }

bool OptionBuilder::validate(std::string& diagnostic) const {
  auto content_length = static_cast<std::int64_t>(content_->length());
  std::optional<std::string> problem;
  std::int64_t valid = 0;
  index_.for_each([&](std::size_t i, std::int64_t value) {
    if (value >= 0) ++valid;
    if (problem) return;
    if (value < -1 || value >= content_length) {
      problem = "option index at " + form_key() + " out of range at position " + std::to_string(i) + " (index " +
                std::to_string(value) + ", content length " + std::to_string(content_length) + ")";
    }
  });
  if (problem) {
    diagnostic = *problem;
    return false;
  }
  if (valid != content_length) {
    diagnostic = "option " + form_key() + " has " + std::to_string(valid) + " present entries but content " +
                 content_->form_key() + " has length " + std::to_string(content_length);
    return false;
  }
  return content_->validate(diagnostic);
}

void OptionBuilder::collect_sizes(std::vector<BufferSize>& out) const {
  out.push_back({form_key() + "-index", index_.nbytes()});
  content_->collect_sizes(out);
}

void OptionBuilder::write_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const {
  index_.concatenate_into(destination_for(destinations, form_key() + "-index", index_.nbytes()));
  content_->write_buffers(destinations);
}

void OptionBuilder::clear() {
  index_.clear();
  content_->clear();
}

// ---------------------------------------------------------------------------
// LayoutBuilder

LayoutBuilder::LayoutBuilder(FormNode schema, std::size_t panel_capacity) : schema_(std::move(schema)) {
  if (panel_capacity == 0) {
    throw ConfigError("panel capacity must be positive");
  }
  assign_form_keys(schema_);
  form_ = serialize(schema_);
  root_ = build(schema_, panel_capacity);
  for (auto* node : nodes_) {
    if (node->kind() != NodeKind::record) buffer_owners_.push_back(node);
  }
}

std::unique_ptr<BuilderNode> LayoutBuilder::build(const FormNode& node, std::size_t panel_capacity) {
  std::size_t id = nodes_.size();
  nodes_.push_back(nullptr);
  std::unique_ptr<BuilderNode> built;
  switch (node.kind()) {
    case NodeKind::primitive:
      built = std::make_unique<PrimitiveBuilder>(id, node.primitive_type(), panel_capacity);
      break;
    case NodeKind::list_offset:
      built = std::make_unique<ListOffsetBuilder>(id, build(node.content(), panel_capacity), panel_capacity);
      break;
    case NodeKind::indexed_option:
      built = std::make_unique<OptionBuilder>(id, build(node.content(), panel_capacity), panel_capacity);
      break;
    case NodeKind::record: {
      std::vector<std::pair<std::string, std::unique_ptr<BuilderNode>>> fields;
      for (std::size_t i = 0; i < node.children().size(); ++i) {
        fields.emplace_back(node.field_names()[i], build(node.children()[i], panel_capacity));
      }
      built = std::make_unique<RecordBuilder>(id, std::move(fields));
      break;
    }
  }
  nodes_[id] = built.get();
  return built;
}

std::optional<std::string> LayoutBuilder::check() const {
  std::string diagnostic;
  if (root_->validate(diagnostic)) return std::nullopt;
  return diagnostic;
}

bool LayoutBuilder::is_valid(std::string& error) const {
  auto problem = check();
  if (problem) {
    error = *problem;
    return false;
  }
  return true;
}

std::vector<BufferSize> LayoutBuilder::buffer_sizes() const {
  std::vector<BufferSize> out;
  root_->collect_sizes(out);
  return out;
}

void LayoutBuilder::buffer_nbytes(std::map<std::string, std::size_t>& names_nbytes) const {
  for (auto& entry : buffer_sizes()) {
    names_nbytes[entry.name] = entry.nbytes;
  }
}

void LayoutBuilder::to_buffers(const std::map<std::string, std::span<std::byte>>& destinations) const {
  if (auto problem = check()) {
    throw BuilderError("cannot export an invalid builder: " + *problem);
  }
  for (const auto& entry : buffer_sizes()) {
    auto it = destinations.find(entry.name);
    if (it == destinations.end()) {
      throw SizeError("missing destination buffer \"" + entry.name + "\"");
    }
    if (it->second.size() < entry.nbytes) {
      throw SizeError("destination buffer \"" + entry.name + "\" holds " + std::to_string(it->second.size()) +
                      " bytes, needs " + std::to_string(entry.nbytes));
    }
  }
  root_->write_buffers(destinations);
}

void LayoutBuilder::to_buffer(std::size_t index, std::span<std::byte> destination) const {
  if (index >= buffer_owners_.size()) {
    throw SizeError("no buffer with index " + std::to_string(index));
  }
  if (auto problem = check()) {
    throw BuilderError("cannot export an invalid builder: " + *problem);
  }
  const BuilderNode& owner = *buffer_owners_[index];
  if (destination.size() < owner.own_nbytes()) {
    throw SizeError("destination for buffer " + std::to_string(index) + " holds " +
                    std::to_string(destination.size()) + " bytes, needs " + std::to_string(owner.own_nbytes()));
  }
  owner.write_own(destination);
}

void LayoutBuilder::to_buffers(const std::map<std::string, void*>& buffers) const {
  std::map<std::string, std::span<std::byte>> regions;
  for (const auto& entry : buffer_sizes()) {
    auto it = buffers.find(entry.name);
    if (it == buffers.end()) {
      throw SizeError("missing destination buffer \"" + entry.name + "\"");
    }
    regions.emplace(entry.name, std::span<std::byte>(static_cast<std::byte*>(it->second), entry.nbytes));
  }
  to_buffers(regions);
}

}  // namespace layoutkit
