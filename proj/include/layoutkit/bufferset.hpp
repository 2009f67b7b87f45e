#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "layoutkit/decoder.hpp"

namespace layoutkit {

class LayoutBuilder;

struct NamedBuffer {
  std::string name;
  std::vector<std::byte> bytes;

  bool operator==(const NamedBuffer&) const = default;
};

/// Everything a consumer needs to rebuild the array: Form text, row count,
/// and the named buffers in pre-order.
struct BufferSet {
  std::string form;
  std::size_t length = 0;
  std::vector<NamedBuffer> buffers;

  const NamedBuffer* find(const std::string& name) const;
  BufferViews views() const;

  bool operator==(const BufferSet&) const = default;
};

/// Copies a valid builder's buffers into freshly owned memory.
BufferSet export_bufferset(const LayoutBuilder& builder);

/// On-disk layout: form.json (the Form text as is), meta.json
/// ({"length": N, "buffers": {name: nbytes, ...}}) and one "{name}.raw" file
/// of little-endian bytes per buffer.
void write_bufferset(const BufferSet& set, const std::filesystem::path& directory);

/// Reads the files named by the Form's buffers. Throws Error naming the first
/// missing or unreadable file. Sizes are taken from the files themselves;
/// structural problems surface when decoding.
BufferSet read_bufferset(const std::filesystem::path& directory);

/// Mismatches between meta.json and the directory contents (absent files,
/// byte counts that differ from file sizes, length disagreement). Empty when
/// consistent.
std::vector<std::string> check_meta(const std::filesystem::path& directory);

}  // namespace layoutkit
