#include "layoutkit/decoder.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include "layoutkit/error.hpp"

namespace layoutkit {

namespace {

std::string where(const FormNode& node, const std::string& path) { return node.form_key() + " at " + path; }

class Reader {
 public:
  Reader(const BufferViews& buffers, ReadLog* log) : buffers_(buffers), log_(log) {}

  /// The node's buffer, which must hold exactly `count` elements of `width` bytes.
  std::span<const std::byte> require(const FormNode& node, const std::string& path, std::size_t count,
                                     std::size_t width) const {
    std::string name = *node.buffer_name();
    auto it = buffers_.find(name);
    if (it == buffers_.end()) {
      throw DecodeError(where(node, path) + ": missing buffer \"" + name + "\"");
    }
    std::size_t have = it->second.size();
    if (count > have / width) {
      throw DecodeError(where(node, path) + ": truncated buffer \"" + name + "\" has " + std::to_string(have) +
                        " bytes, needs " + (count > SIZE_MAX / width ? std::string("more")
                                                                      : std::to_string(count * width)));
    }
    if (have != count * width) {
      throw DecodeError(where(node, path) + ": buffer \"" + name + "\" has " + std::to_string(have) +
                        " bytes, expected " + std::to_string(count * width));
    }
    return it->second;
  }

  template <typename T>
  T read(const FormNode& node, std::span<const std::byte> bytes, std::size_t index) const {
    std::size_t end = (index + 1) * sizeof(T);
    if (index >= bytes.size() / sizeof(T)) {
      throw DecodeError(node.form_key() + ": read past the end of \"" + *node.buffer_name() + "\"");
    }
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes.data() + index * sizeof(T), sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      std::reverse(raw.begin(), raw.end());
    }
    if (log_ != nullptr) {
      auto& mark = log_->high_water[*node.buffer_name()];
      mark = std::max(mark, end);
    }
    if constexpr (std::is_same_v<T, bool>) {
      return raw[0] != std::byte{0};
    } else {
      return std::bit_cast<T>(raw);
    }
  }

 private:
  const BufferViews& buffers_;
  ReadLog* log_;
};

void check(const Reader& reader, const FormNode& node, std::size_t length, const std::string& path) {
  switch (node.kind()) {
    case NodeKind::primitive:
      reader.require(node, path, length, primitive_width(node.primitive_type()));
      return;
    case NodeKind::list_offset: {
      auto bytes = reader.require(node, path, length + 1, sizeof(std::int64_t));
      auto first = reader.read<std::int64_t>(node, bytes, 0);
      if (first != 0) {
        throw DecodeError(where(node, path) + ": offsets start at " + std::to_string(first) + ", expected 0");
      }
      std::int64_t previous = 0;
      for (std::size_t i = 1; i <= length; ++i) {
        auto value = reader.read<std::int64_t>(node, bytes, i);
        if (value < previous) {
          throw DecodeError(where(node, path) + ": offsets decrease at position " + std::to_string(i) + " (" +
                            std::to_string(previous) + " > " + std::to_string(value) + ")");
        }
        previous = value;
      }
      check(reader, node.content(), static_cast<std::size_t>(previous), path + "[]");
      return;
    }
    case NodeKind::indexed_option: {
      auto bytes = reader.require(node, path, length, sizeof(std::int64_t));
      std::int64_t present = 0;
      for (std::size_t i = 0; i < length; ++i) {
        if (reader.read<std::int64_t>(node, bytes, i) >= 0) ++present;
      }
      for (std::size_t i = 0; i < length; ++i) {
        auto value = reader.read<std::int64_t>(node, bytes, i);
        if (value < -1 || value >= present) {
          throw DecodeError(where(node, path) + ": option index out of range at position " + std::to_string(i) +
                            " (index " + std::to_string(value) + ", content length " + std::to_string(present) +
                            ")");
        }
      }
      check(reader, node.content(), static_cast<std::size_t>(present), path + "?");
      return;
    }
    case NodeKind::record:
      for (std::size_t f = 0; f < node.children().size(); ++f) {
        check(reader, node.children()[f], length, path + "." + node.field_names()[f]);
      }
      return;
  }
}

std::vector<LogicalValue> materialize(const Reader& reader, const FormNode& node, std::size_t length,
                                      const std::string& path) {
  std::vector<LogicalValue> out;
  out.reserve(length);
  switch (node.kind()) {
    case NodeKind::primitive: {
      auto type = node.primitive_type();
      auto bytes = reader.require(node, path, length, primitive_width(type));
      for (std::size_t i = 0; i < length; ++i) {
        switch (type) {
          case PrimitiveType::float64:
            out.push_back(LogicalValue::real(reader.read<double>(node, bytes, i), type));
            break;
          case PrimitiveType::float32:
            out.push_back(LogicalValue::real(reader.read<float>(node, bytes, i), type));
            break;
          case PrimitiveType::int64:
            out.push_back(LogicalValue::integer(reader.read<std::int64_t>(node, bytes, i), type));
            break;
          case PrimitiveType::int32:
            out.push_back(LogicalValue::integer(reader.read<std::int32_t>(node, bytes, i), type));
            break;
          case PrimitiveType::int16:
            out.push_back(LogicalValue::integer(reader.read<std::int16_t>(node, bytes, i), type));
            break;
          case PrimitiveType::int8:
            out.push_back(LogicalValue::integer(reader.read<std::int8_t>(node, bytes, i), type));
            break;
          case PrimitiveType::uint8:
            out.push_back(LogicalValue::integer(reader.read<std::uint8_t>(node, bytes, i), type));
            break;
          case PrimitiveType::boolean:
            out.push_back(LogicalValue::boolean(reader.read<bool>(node, bytes, i)));
            break;
        }
      }
      return out;
    }
    case NodeKind::list_offset: {
      auto bytes = reader.require(node, path, length + 1, sizeof(std::int64_t));
      auto total = static_cast<std::size_t>(reader.read<std::int64_t>(node, bytes, length));
      auto content = materialize(reader, node.content(), total, path + "[]");
      auto begin = static_cast<std::size_t>(reader.read<std::int64_t>(node, bytes, 0));
      for (std::size_t i = 0; i < length; ++i) {
        auto end = static_cast<std::size_t>(reader.read<std::int64_t>(node, bytes, i + 1));
        LogicalValue::List items(std::make_move_iterator(content.begin() + static_cast<std::ptrdiff_t>(begin)),
                                 std::make_move_iterator(content.begin() + static_cast<std::ptrdiff_t>(end)));
        out.push_back(LogicalValue::list(std::move(items)));
        begin = end;
      }
      return out;
    }
    case NodeKind::indexed_option: {
      auto bytes = reader.require(node, path, length, sizeof(std::int64_t));
      std::size_t present = 0;
      for (std::size_t i = 0; i < length; ++i) {
        if (reader.read<std::int64_t>(node, bytes, i) >= 0) ++present;
      }
      auto content = materialize(reader, node.content(), present, path + "?");
      for (std::size_t i = 0; i < length; ++i) {
        auto index = reader.read<std::int64_t>(node, bytes, i);
        out.push_back(index < 0 ? LogicalValue::missing() : content[static_cast<std::size_t>(index)]);
      }
      return out;
    }
    case NodeKind::record: {
      std::vector<std::vector<LogicalValue>> columns;
      for (std::size_t f = 0; f < node.children().size(); ++f) {
        columns.push_back(materialize(reader, node.children()[f], length, path + "." + node.field_names()[f]));
      }
      for (std::size_t i = 0; i < length; ++i) {
        LogicalValue::Record fields;
        fields.reserve(columns.size());
        for (std::size_t f = 0; f < columns.size(); ++f) {
          fields.emplace_back(node.field_names()[f], std::move(columns[f][i]));
        }
        out.push_back(LogicalValue::record(std::move(fields)));
      }
      return out;
    }
  }
  return out;
}

}  // namespace

std::vector<LogicalValue> decode(const FormNode& form, const BufferViews& buffers, std::size_t length,
                                 ReadLog* log) {
  Reader reader(buffers, log);
  check(reader, form, length, "$");
  return materialize(reader, form, length, "$");
}

std::vector<LogicalValue> decode(std::string_view form_json, const BufferViews& buffers, std::size_t length,
                                 ReadLog* log) {
  return decode(parse_form(form_json), buffers, length, log);
}

std::optional<std::string> validate_buffers(const FormNode& form, const BufferViews& buffers, std::size_t length) {
  try {
    Reader reader(buffers, nullptr);
    check(reader, form, length, "$");
  } catch (const DecodeError& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

}  // namespace layoutkit
