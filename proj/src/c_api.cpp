#include "layoutkit/c_api.h"

#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>

#include <nlohmann/json.hpp>

#include "layoutkit/bufferset.hpp"
#include "layoutkit/dynamic_builder.hpp"
#include "layoutkit/error.hpp"
#include "layoutkit/layout_builder.hpp"

namespace {

using layoutkit::BufferSet;
using layoutkit::DynamicBuilder;
using layoutkit::LayoutBuilder;

struct Entry {
  std::variant<LayoutBuilder, DynamicBuilder> builder;
  // Dynamic builders export from a snapshot taken at the first size query
  // after the last append.
  std::optional<BufferSet> snapshot;
};

class Registry {
 public:
  lk_handle add(std::shared_ptr<Entry> entry) {
    std::lock_guard lock(mutex_);
    lk_handle id = next_++;
    live_.emplace(id, std::move(entry));
    return id;
  }

  std::shared_ptr<Entry> find(lk_handle id) {
    std::lock_guard lock(mutex_);
    auto it = live_.find(id);
    return it == live_.end() ? nullptr : it->second;
  }

  /// True if the id was ever issued.
  bool release(lk_handle id) {
    std::lock_guard lock(mutex_);
    live_.erase(id);
    return id != 0 && id < next_;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<lk_handle, std::shared_ptr<Entry>> live_;
  lk_handle next_ = 1;
};

Registry& registry() {
  static Registry instance;
  return instance;
}

thread_local std::string last_error;

int32_t fail(int32_t status, std::string message) {
  last_error = std::move(message);
  return status;
}

int32_t write_text(const std::string& text, char* out, size_t capacity, size_t* out_len) {
  if (out_len != nullptr) *out_len = text.size();
  if (out == nullptr) return LK_OK;
  if (capacity < text.size()) {
    return fail(LK_ERR_TRUNCATED, "output holds " + std::to_string(capacity) + " bytes, text needs " +
                                      std::to_string(text.size()));
  }
  if (!text.empty()) std::memcpy(out, text.data(), text.size());
  return LK_OK;
}

/// Runs `body` against a live entry, mapping exceptions to status codes.
template <typename F>
int32_t with_entry(lk_handle handle, F&& body) {
  auto entry = registry().find(handle);
  if (!entry) {
    return fail(LK_ERR_INVALID_HANDLE, "invalid handle " + std::to_string(handle));
  }
  try {
    return body(*entry);
  } catch (const layoutkit::SizeError& e) {
    return fail(LK_ERR_SIZE_MISMATCH, e.what());
  } catch (const layoutkit::FormError& e) {
    return fail(LK_ERR_FORM, e.what());
  } catch (const layoutkit::Error& e) {
    return fail(LK_ERR_BUILDER, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LK_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(LK_ERR_INTERNAL, e.what());
  }
}

template <typename F>
int32_t with_layout(lk_handle handle, F&& body) {
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    auto* builder = std::get_if<LayoutBuilder>(&entry.builder);
    if (builder == nullptr) {
      return fail(LK_ERR_ARGUMENT, "handle " + std::to_string(handle) + " is a dynamic builder");
    }
    return body(*builder);
  });
}

template <typename F>
int32_t with_node(lk_handle handle, uint64_t node, F&& body) {
  return with_layout(handle, [&](LayoutBuilder& builder) -> int32_t {
    if (node >= builder.node_count()) {
      return fail(LK_ERR_ARGUMENT, "no node" + std::to_string(node));
    }
    body(builder.node(node));
    return LK_OK;
  });
}

const BufferSet& snapshot_of(Entry& entry) {
  auto& dynamic = std::get<DynamicBuilder>(entry.builder);
  if (!entry.snapshot) entry.snapshot = dynamic.snapshot();
  return *entry.snapshot;
}

}  // namespace

extern "C" {

int32_t lk_create_from_form(const char* form_json, size_t form_len, lk_handle* out_handle) {
  if (form_json == nullptr || out_handle == nullptr) {
    return fail(LK_ERR_ARGUMENT, "null argument");
  }
  try {
    auto schema = layoutkit::parse_form(std::string_view(form_json, form_len));
    auto entry = std::make_shared<Entry>(Entry{LayoutBuilder(std::move(schema)), std::nullopt});
    *out_handle = registry().add(std::move(entry));
    return LK_OK;
  } catch (const layoutkit::FormError& e) {
    return fail(LK_ERR_FORM, e.what());
  } catch (const std::exception& e) {
    return fail(LK_ERR_INTERNAL, e.what());
  }
}

int32_t lk_create_dynamic(lk_handle* out_handle) {
  if (out_handle == nullptr) return fail(LK_ERR_ARGUMENT, "null argument");
  auto entry = std::make_shared<Entry>(Entry{DynamicBuilder(), std::nullopt});
  *out_handle = registry().add(std::move(entry));
  return LK_OK;
}

int32_t lk_append_integer(lk_handle handle, uint64_t node, int64_t value) {
  return with_node(handle, node, [&](layoutkit::BuilderNode& target) {
    auto& primitive = target.as<layoutkit::PrimitiveBuilder>();
    if (primitive.type() == layoutkit::PrimitiveType::boolean) {
      if (value != 0 && value != 1) {
        throw layoutkit::BuilderError(target.form_key() + ": boolean must be 0 or 1");
      }
      primitive.append_bool(value == 1);
    } else {
      primitive.append_integer(value);
    }
  });
}

int32_t lk_extend(lk_handle handle, uint64_t node, const void* elements, size_t nbytes) {
  if (elements == nullptr && nbytes != 0) return fail(LK_ERR_ARGUMENT, "null elements");
  return with_node(handle, node, [&](layoutkit::BuilderNode& target) {
    target.as<layoutkit::PrimitiveBuilder>().extend_bytes(
        std::span<const std::byte>(static_cast<const std::byte*>(elements), nbytes));
  });
}

int32_t lk_begin_list(lk_handle handle, uint64_t node) {
  return with_node(handle, node,
                   [](layoutkit::BuilderNode& target) { target.as<layoutkit::ListOffsetBuilder>().begin_list(); });
}

int32_t lk_end_list(lk_handle handle, uint64_t node) {
  return with_node(handle, node,
                   [](layoutkit::BuilderNode& target) { target.as<layoutkit::ListOffsetBuilder>().end_list(); });
}

int32_t lk_append_valid(lk_handle handle, uint64_t node) {
  return with_node(handle, node,
                   [](layoutkit::BuilderNode& target) { target.as<layoutkit::OptionBuilder>().append_valid(); });
}

int32_t lk_append_missing(lk_handle handle, uint64_t node) {
  return with_node(handle, node,
                   [](layoutkit::BuilderNode& target) { target.as<layoutkit::OptionBuilder>().append_missing(); });
}

int32_t lk_dynamic_append_json(lk_handle handle, const char* json, size_t json_len) {
  if (json == nullptr) return fail(LK_ERR_ARGUMENT, "null json");
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    auto* dynamic = std::get_if<DynamicBuilder>(&entry.builder);
    if (dynamic == nullptr) {
      return fail(LK_ERR_ARGUMENT, "handle " + std::to_string(handle) + " is not a dynamic builder");
    }
    auto value = layoutkit::from_json_value(nlohmann::ordered_json::parse(std::string_view(json, json_len)));
    dynamic->append_value(value);
    entry.snapshot.reset();
    return LK_OK;
  });
}

int32_t lk_is_valid(lk_handle handle, char* message, size_t capacity, size_t* message_len) {
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    std::string problem;
    if (auto* builder = std::get_if<LayoutBuilder>(&entry.builder)) {
      if (auto found = builder->check()) problem = *found;
    }
    int32_t status = write_text(problem, message, capacity, message_len);
    if (status != LK_OK) return status;
    return problem.empty() ? LK_OK : fail(LK_ERR_INVALID_STATE, problem);
  });
}

int32_t lk_length(lk_handle handle, uint64_t* out_length) {
  if (out_length == nullptr) return fail(LK_ERR_ARGUMENT, "null argument");
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    std::visit([&](const auto& builder) { *out_length = builder.length(); }, entry.builder);
    return LK_OK;
  });
}

int32_t lk_form(lk_handle handle, char* out, size_t capacity, size_t* out_len) {
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    if (auto* builder = std::get_if<LayoutBuilder>(&entry.builder)) {
      return write_text(builder->form(), out, capacity, out_len);
    }
    return write_text(snapshot_of(entry).form, out, capacity, out_len);
  });
}

int32_t lk_buffer_count(lk_handle handle, uint64_t* out_count) {
  if (out_count == nullptr) return fail(LK_ERR_ARGUMENT, "null argument");
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    if (auto* builder = std::get_if<LayoutBuilder>(&entry.builder)) {
      *out_count = builder->buffer_count();
    } else {
      *out_count = snapshot_of(entry).buffers.size();
    }
    return LK_OK;
  });
}

int32_t lk_buffer_name(lk_handle handle, uint64_t index, char* out, size_t capacity, size_t* out_len) {
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    if (auto* builder = std::get_if<LayoutBuilder>(&entry.builder)) {
      auto sizes = builder->buffer_sizes();
      if (index >= sizes.size()) return fail(LK_ERR_ARGUMENT, "no buffer " + std::to_string(index));
      return write_text(sizes[index].name, out, capacity, out_len);
    }
    const auto& buffers = snapshot_of(entry).buffers;
    if (index >= buffers.size()) return fail(LK_ERR_ARGUMENT, "no buffer " + std::to_string(index));
    return write_text(buffers[index].name, out, capacity, out_len);
  });
}

int32_t lk_buffer_nbytes(lk_handle handle, uint64_t index, uint64_t* out_nbytes) {
  if (out_nbytes == nullptr) return fail(LK_ERR_ARGUMENT, "null argument");
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    if (auto* builder = std::get_if<LayoutBuilder>(&entry.builder)) {
      if (index >= builder->buffer_count()) return fail(LK_ERR_ARGUMENT, "no buffer " + std::to_string(index));
      *out_nbytes = builder->buffer_sizes()[index].nbytes;
      return LK_OK;
    }
    const auto& buffers = snapshot_of(entry).buffers;
    if (index >= buffers.size()) return fail(LK_ERR_ARGUMENT, "no buffer " + std::to_string(index));
    *out_nbytes = buffers[index].bytes.size();
    return LK_OK;
  });
}

int32_t lk_fill_buffer(lk_handle handle, uint64_t index, void* destination, size_t destination_nbytes) {
  if (destination == nullptr && destination_nbytes != 0) return fail(LK_ERR_ARGUMENT, "null destination");
  return with_entry(handle, [&](Entry& entry) -> int32_t {
    if (auto* builder = std::get_if<LayoutBuilder>(&entry.builder)) {
      if (index >= builder->buffer_count()) return fail(LK_ERR_ARGUMENT, "no buffer " + std::to_string(index));
      if (auto problem = builder->check()) {
        return fail(LK_ERR_INVALID_STATE, *problem);
      }
      auto expected = builder->buffer_sizes()[index].nbytes;
      if (destination_nbytes != expected) {
        return fail(LK_ERR_SIZE_MISMATCH, "buffer " + std::to_string(index) + " is " + std::to_string(expected) +
                                              " bytes, destination is " + std::to_string(destination_nbytes));
      }
      builder->to_buffer(index, std::span<std::byte>(static_cast<std::byte*>(destination), destination_nbytes));
      return LK_OK;
    }
    const auto& buffers = snapshot_of(entry).buffers;
    if (index >= buffers.size()) return fail(LK_ERR_ARGUMENT, "no buffer " + std::to_string(index));
    const auto& bytes = buffers[index].bytes;
    if (destination_nbytes != bytes.size()) {
      return fail(LK_ERR_SIZE_MISMATCH, "buffer " + std::to_string(index) + " is " + std::to_string(bytes.size()) +
                                            " bytes, destination is " + std::to_string(destination_nbytes));
    }
    if (!bytes.empty()) std::memcpy(destination, bytes.data(), bytes.size());
    return LK_OK;
  });
}

int32_t lk_release(lk_handle handle) {
  if (!registry().release(handle)) {
    return fail(LK_ERR_INVALID_HANDLE, "handle " + std::to_string(handle) + " was never issued");
  }
  return LK_OK;
}

int32_t lk_last_error(char* out, size_t capacity, size_t* out_len) {
  return write_text(last_error, out, capacity, out_len);
}

}  // extern "C"
