#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "evidential/errors.hpp"

namespace evidential {

inline constexpr std::size_t kMaxFrameSize = 64;

/// A subset of a frame, stored as one machine word. Bit i is element i of the
/// frame in declaration order.
class FocalSet {
public:
  using word_type = std::uint64_t;

  constexpr FocalSet() noexcept = default;
  constexpr explicit FocalSet(word_type bits) noexcept : bits_(bits) {}

  static constexpr FocalSet singleton(std::size_t index) noexcept {
    return FocalSet{word_type{1} << index};
  }

  /// All elements of a frame of the given size.
  static constexpr FocalSet full(std::size_t frame_size) noexcept {
    return frame_size >= 64 ? FocalSet{~word_type{0}}
                            : FocalSet{(word_type{1} << frame_size) - 1};
  }

  constexpr word_type bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::size_t cardinality() const noexcept {
    return static_cast<std::size_t>(std::popcount(bits_));
  }
  constexpr bool contains(std::size_t index) const noexcept {
    return index < 64 && ((bits_ >> index) & 1U) != 0;
  }
  constexpr bool subset_of(FocalSet other) const noexcept {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool strict_subset_of(FocalSet other) const noexcept {
    return subset_of(other) && bits_ != other.bits_;
  }
  constexpr bool intersects(FocalSet other) const noexcept {
    return (bits_ & other.bits_) != 0;
  }
  /// True when no bit is set at or above `frame_size`.
  constexpr bool fits(std::size_t frame_size) const noexcept {
    return subset_of(full(frame_size));
  }

  constexpr FocalSet operator&(FocalSet o) const noexcept { return FocalSet{bits_ & o.bits_}; }
  constexpr FocalSet operator|(FocalSet o) const noexcept { return FocalSet{bits_ | o.bits_}; }
  constexpr FocalSet operator-(FocalSet o) const noexcept { return FocalSet{bits_ & ~o.bits_}; }
  constexpr FocalSet& operator&=(FocalSet o) noexcept { bits_ &= o.bits_; return *this; }
  constexpr FocalSet& operator|=(FocalSet o) noexcept { bits_ |= o.bits_; return *this; }

  constexpr auto operator<=>(const FocalSet&) const noexcept = default;

  /// Calls `fn(index)` for every member, ascending.
  template <typename Fn>
  constexpr void for_each(Fn&& fn) const {
    for (word_type rest = bits_; rest != 0; rest &= rest - 1) {
      fn(static_cast<std::size_t>(std::countr_zero(rest)));
    }
  }

private:
  word_type bits_ = 0;
};

struct FocalSetHash {
  std::size_t operator()(FocalSet s) const noexcept {
    // splitmix64 finalizer
    std::uint64_t z = s.bits() + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

/// The frame of discernment: an ordered list of distinct labels. Copies share
/// the same immutable storage, so passing frames around is cheap.
class Frame {
public:
  explicit Frame(std::vector<std::string> labels)
      : labels_(std::make_shared<const std::vector<std::string>>(validate(std::move(labels)))) {}

  /// Frame with labels "x0", "x1", ...
  static Frame anonymous(std::size_t size) {
    std::vector<std::string> labels;
    labels.reserve(size);
    for (std::size_t i = 0; i < size; ++i) labels.push_back("x" + std::to_string(i));
    return Frame{std::move(labels)};
  }

  std::size_t size() const noexcept { return labels_->size(); }
  const std::string& label(std::size_t index) const { return labels_->at(index); }
  const std::vector<std::string>& labels() const noexcept { return *labels_; }
  FocalSet theta() const noexcept { return FocalSet::full(size()); }

  /// Index of `label`, or size() when absent.
  std::size_t find(std::string_view label) const noexcept {
    const auto& l = *labels_;
    return static_cast<std::size_t>(std::find(l.begin(), l.end(), label) - l.begin());
  }

  FocalSet set_of(const std::vector<std::string>& members) const {
    FocalSet s;
    for (const auto& m : members) {
      const std::size_t i = find(m);
      if (i == size()) throw UnknownElement("unknown element '" + m + "'");
      s |= FocalSet::singleton(i);
    }
    return s;
  }

  friend bool operator==(const Frame& a, const Frame& b) noexcept {
    return a.labels_ == b.labels_ || *a.labels_ == *b.labels_;
  }

private:
  static std::vector<std::string> validate(std::vector<std::string> labels) {
    if (labels.empty() || labels.size() > kMaxFrameSize) {
      throw InvalidParameter("frame size must be between 1 and 64, got " +
                             std::to_string(labels.size()));
    }
    for (const auto& l : labels) {
      // labels must survive the text document format unchanged
      if (l.empty() || l.find_first_of(" \t\r\n,#:") != std::string::npos) {
        throw InvalidParameter("invalid frame element label '" + l + "'");
      }
    }
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end()) {
      throw InvalidParameter("duplicate frame element '" + *it + "'");
    }
    return labels;
  }

  std::shared_ptr<const std::vector<std::string>> labels_;
};

}  // namespace evidential
