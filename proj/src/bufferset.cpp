#include "layoutkit/bufferset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "layoutkit/error.hpp"
#include "layoutkit/layout_builder.hpp"

namespace layoutkit {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("missing file " + path.filename().string());
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) {
    throw Error("cannot write " + path.string());
  }
}

Json read_meta(const fs::path& directory) {
  try {
    return Json::parse(read_text(directory / "meta.json"));
  } catch (const Json::exception& e) {
    throw Error(std::string("meta.json: ") + e.what());
  }
}

}  // namespace

const NamedBuffer* BufferSet::find(const std::string& name) const {
  for (const auto& buffer : buffers) {
    if (buffer.name == name) return &buffer;
  }
  return nullptr;
}

BufferViews BufferSet::views() const {
  BufferViews out;
  for (const auto& buffer : buffers) {
    out.emplace(buffer.name, std::span<const std::byte>(buffer.bytes));
  }
  return out;
}

BufferSet export_bufferset(const LayoutBuilder& builder) {
  BufferSet set;
  set.form = builder.form();
  set.length = builder.length();
  std::map<std::string, std::span<std::byte>> regions;
  auto sizes = builder.buffer_sizes();
  set.buffers.reserve(sizes.size());
  for (const auto& entry : sizes) {
    set.buffers.push_back({entry.name, std::vector<std::byte>(entry.nbytes)});
  }
  for (auto& buffer : set.buffers) {
    regions.emplace(buffer.name, std::span<std::byte>(buffer.bytes));
  }
  builder.to_buffers(regions);
  return set;
}

void write_bufferset(const BufferSet& set, const fs::path& directory) {
  fs::create_directories(directory);
  write_bytes(directory / "form.json", set.form.data(), set.form.size());
  Json meta = Json::object();
  meta["length"] = set.length;
  Json sizes = Json::object();
  for (const auto& buffer : set.buffers) {
    sizes[buffer.name] = buffer.bytes.size();
    write_bytes(directory / (buffer.name + ".raw"), buffer.bytes.data(), buffer.bytes.size());
  }
  meta["buffers"] = std::move(sizes);
  std::string text = meta.dump();
  write_bytes(directory / "meta.json", text.data(), text.size());
}

BufferSet read_bufferset(const fs::path& directory) {
  BufferSet set;
  set.form = read_text(directory / "form.json");
  FormNode form = parse_form(set.form);
  Json meta = read_meta(directory);
  if (!meta.contains("length") || !meta["length"].is_number_unsigned()) {
    throw Error("meta.json: missing or invalid \"length\"");
  }
  set.length = meta["length"].get<std::size_t>();
  for (const auto& name : buffer_names(form)) {
    fs::path file = directory / (name + ".raw");
    if (!fs::exists(file)) {
      throw Error("missing buffer file " + name + ".raw");
    }
    std::string raw = read_text(file);
    NamedBuffer buffer{name, std::vector<std::byte>(raw.size())};
    if (!raw.empty()) std::memcpy(buffer.bytes.data(), raw.data(), raw.size());
    set.buffers.push_back(std::move(buffer));
  }
  return set;
}

std::vector<std::string> check_meta(const fs::path& directory) {
  std::vector<std::string> problems;
  Json meta = read_meta(directory);
  if (!meta.contains("buffers") || !meta["buffers"].is_object()) {
    problems.push_back("meta.json: missing \"buffers\" object");
    return problems;
  }
  FormNode form = parse_form(read_text(directory / "form.json"));
  auto expected = buffer_names(form);
  for (const auto& name : expected) {
    fs::path file = directory / (name + ".raw");
    if (!fs::exists(file)) {
      problems.push_back("missing buffer file " + name + ".raw");
      continue;
    }
    if (!meta["buffers"].contains(name)) {
      problems.push_back("meta.json does not list buffer " + name);
      continue;
    }
    auto size = fs::file_size(file);
    auto stated = meta["buffers"][name].get<std::uintmax_t>();
    if (size != stated) {
      problems.push_back(name + ".raw has " + std::to_string(size) + " bytes, meta.json states " +
                         std::to_string(stated));
    }
  }
  for (const auto& [name, value] : meta["buffers"].items()) {
    if (std::find(expected.begin(), expected.end(), name) == expected.end()) {
      problems.push_back("meta.json lists buffer " + name + " that the form does not own");
    }
  }
  return problems;
}

}  // namespace layoutkit
