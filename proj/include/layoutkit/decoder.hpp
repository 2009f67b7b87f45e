#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutkit/form.hpp"
#include "layoutkit/logical_value.hpp"

namespace layoutkit {

using BufferViews = std::map<std::string, std::span<const std::byte>>;

/// Highest byte offset (exclusive) read from each buffer during a decode.
struct ReadLog {
  std::map<std::string, std::size_t> high_water;
};

/// Reconstructs `length` top-level values from a Form and its named buffers.
///
/// Every buffer must be exactly as long as the structure requires: primitive
/// data holds one element per row, offsets hold rows + 1 entries starting at
/// 0 and ending at the content length, option indexes are -1 or below the
/// count of present entries, which is the content length. Violations throw
/// DecodeError naming the node ("node2 at $.y: ...").
std::vector<LogicalValue> decode(const FormNode& form, const BufferViews& buffers, std::size_t length,
                                 ReadLog* log = nullptr);
std::vector<LogicalValue> decode(std::string_view form_json, const BufferViews& buffers, std::size_t length,
                                 ReadLog* log = nullptr);

/// Runs the structural checks of `decode` without materializing values.
/// Empty optional when decodable.
std::optional<std::string> validate_buffers(const FormNode& form, const BufferViews& buffers, std::size_t length);

}  // namespace layoutkit
