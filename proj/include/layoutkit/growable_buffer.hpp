#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "layoutkit/error.hpp"

namespace layoutkit {

inline constexpr std::size_t kDefaultPanelCapacity = 1024;

/// Append-only buffer of fixed-width elements.
///
/// Storage is a singly linked chain of panels that all share one capacity.
/// A new panel is allocated only when the tail panel is full, so earlier
/// elements never move. `concatenate_into` copies everything, in append
/// order, into a caller-provided contiguous region as little-endian bytes.
template <typename T>
class GrowableBuffer {
  static_assert(std::is_arithmetic_v<T>, "GrowableBuffer holds numeric elements");

 public:
  using value_type = T;

  explicit GrowableBuffer(std::size_t panel_capacity = kDefaultPanelCapacity)
      : panel_capacity_(panel_capacity) {
    if (panel_capacity == 0) {
      throw ConfigError("GrowableBuffer panel capacity must be positive");
    }
    head_ = std::make_unique<Panel>(panel_capacity_);
    tail_ = head_.get();
  }

  GrowableBuffer(GrowableBuffer&&) noexcept = default;
  GrowableBuffer& operator=(GrowableBuffer&&) noexcept = default;
  GrowableBuffer(const GrowableBuffer&) = delete;
  GrowableBuffer& operator=(const GrowableBuffer&) = delete;

  ~GrowableBuffer() {
    // Unlink iteratively; a long chain would otherwise recurse per panel.
    auto next = std::move(head_);
    while (next) {
      next = std::move(next->next);
    }
  }

  void append(T value) {
    if (tail_->fill == tail_->capacity) {
      add_panel();
    }
    tail_->data[tail_->fill++] = value;
    ++length_;
  }

  void extend(std::span<const T> values) {
    while (!values.empty()) {
      if (tail_->fill == tail_->capacity) {
        add_panel();
      }
      std::size_t room = tail_->capacity - tail_->fill;
      std::size_t take = std::min(room, values.size());
      std::copy_n(values.data(), take, tail_->data.get() + tail_->fill);
      tail_->fill += take;
      length_ += take;
      values = values.subspan(take);
    }
  }

  /// Element access in append order. Linear in the panel index; intended
  /// for the few callers that read back a single element (e.g. last offset).
  T at(std::size_t index) const {
    if (index >= length_) {
      throw std::out_of_range("GrowableBuffer index out of range");
    }
    const Panel* panel = head_.get();
    while (index >= panel->fill) {
      index -= panel->fill;
      panel = panel->next.get();
    }
    return panel->data[index];
  }

  T last() const {
    if (length_ == 0) {
      throw std::out_of_range("GrowableBuffer is empty");
    }
    return tail_->data[tail_->fill - 1];
  }

  std::size_t length() const noexcept { return length_; }
  std::size_t nbytes() const noexcept { return length_ * sizeof(T); }
  std::size_t panel_capacity() const noexcept { return panel_capacity_; }
  static constexpr std::size_t element_width() noexcept { return sizeof(T); }

  std::size_t panel_count() const noexcept {
    std::size_t count = 0;
    for (const Panel* p = head_.get(); p != nullptr; p = p->next.get()) {
      ++count;
    }
    return count;
  }

  std::vector<std::size_t> panel_fill_counts() const {
    std::vector<std::size_t> fills;
    for (const Panel* p = head_.get(); p != nullptr; p = p->next.get()) {
      fills.push_back(p->fill);
    }
    return fills;
  }

  /// Copies all elements into `destination`, which must hold nbytes().
  void concatenate_into(std::span<std::byte> destination) const {
    if (destination.size() < nbytes()) {
      throw SizeError("destination holds " + std::to_string(destination.size()) +
                      " bytes, buffer needs " + std::to_string(nbytes()));
    }
    std::byte* out = destination.data();
    for (const Panel* p = head_.get(); p != nullptr; p = p->next.get()) {
      std::size_t bytes = p->fill * sizeof(T);
      if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
        if (bytes != 0) {
          std::memcpy(out, p->data.get(), bytes);
        }
      } else {
        for (std::size_t i = 0; i < p->fill; ++i) {
          auto raw = std::bit_cast<std::array<std::byte, sizeof(T)>>(p->data[i]);
          std::reverse_copy(raw.begin(), raw.end(), out + i * sizeof(T));
        }
      }
      out += bytes;
    }
  }

  /// Unchecked variant taking a raw pointer, matching the hand-off API where
  /// the caller already sized the region from nbytes().
  void concatenate_into(void* destination) const {
    concatenate_into(std::span<std::byte>(static_cast<std::byte*>(destination), nbytes()));
  }

  /// Visits every element in append order.
  template <typename F>
  void for_each(F&& visit) const {
    std::size_t position = 0;
    for (const Panel* p = head_.get(); p != nullptr; p = p->next.get()) {
      for (std::size_t i = 0; i < p->fill; ++i) {
        visit(position++, p->data[i]);
      }
    }
  }

  std::vector<T> to_vector() const {
    std::vector<T> out;
    out.reserve(length_);
    for (const Panel* p = head_.get(); p != nullptr; p = p->next.get()) {
      out.insert(out.end(), p->data.get(), p->data.get() + p->fill);
    }
    return out;
  }

  /// Drops all data and returns to a single empty panel.
  void clear() {
    auto next = std::move(head_->next);
    while (next) {
      next = std::move(next->next);
    }
    head_->fill = 0;
    tail_ = head_.get();
    length_ = 0;
  }

 private:
  struct Panel {
    explicit Panel(std::size_t cap) : data(std::make_unique_for_overwrite<T[]>(cap)), capacity(cap) {}

    std::unique_ptr<T[]> data;
    std::size_t capacity;
    std::size_t fill = 0;
    std::unique_ptr<Panel> next;
  };

  void add_panel() {
    tail_->next = std::make_unique<Panel>(panel_capacity_);
    tail_ = tail_->next.get();
  }

  std::size_t panel_capacity_;
  std::unique_ptr<Panel> head_;
  Panel* tail_ = nullptr;
  std::size_t length_ = 0;
};

}  // namespace layoutkit
