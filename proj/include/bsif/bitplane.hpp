#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bsif/image.hpp"

namespace bsif {

/// Packed binary raster. Each row occupies words_per_row() 64-bit words;
/// column x lives in word x / 64 at bit x % 64. Padding bits past the
/// width are always zero.
class BitPlane {
 public:
  BitPlane() = default;
  BitPlane(int width, int height);

  static BitPlane from_grid(const BinaryGrid& grid);
  BinaryGrid to_grid() const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int words_per_row() const noexcept { return words_per_row_; }

  bool get(int x, int y) const {
    return (words_[word_index(x, y)] >> (static_cast<unsigned>(x) & 63u)) & 1u;
  }
  void set(int x, int y, bool value) {
    auto& w = words_[word_index(x, y)];
    const std::uint64_t bit = std::uint64_t{1} << (static_cast<unsigned>(x) & 63u);
    w = value ? (w | bit) : (w & ~bit);
  }

  std::span<std::uint64_t> row(int y) {
    return {words_.data() + static_cast<std::size_t>(y) * words_per_row_, static_cast<std::size_t>(words_per_row_)};
  }
  std::span<const std::uint64_t> row(int y) const {
    return {words_.data() + static_cast<std::size_t>(y) * words_per_row_, static_cast<std::size_t>(words_per_row_)};
  }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// Same semantics as shift_columns(): out(x) = in((x - k) mod width).
  BitPlane shifted(int k) const;
  BitPlane operator&(const BitPlane& other) const;

  friend bool operator==(const BitPlane&, const BitPlane&) = default;

 private:
  std::size_t word_index(int x, int y) const {
    return static_cast<std::size_t>(y) * words_per_row_ + (static_cast<unsigned>(x) >> 6);
  }

  int width_ = 0;
  int height_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Writes into dst the row src circularly read from column `start`:
/// dst bit x = src bit ((start + x) mod width).
void rotate_row(std::span<const std::uint64_t> src, int width, int start, std::span<std::uint64_t> dst);

}  // namespace bsif
