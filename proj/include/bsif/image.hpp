#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bsif/error.hpp"

namespace bsif {

inline constexpr int kIrisWidth = 512;  // angular samples
inline constexpr int kIrisHeight = 64;  // radial samples

/// Row-major 2-D raster. Column index x runs along the angle for polar
/// images, row index y along the radius (pupil at row 0).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw PreconditionError("grid dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Grid(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 || data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw PreconditionError("grid data size does not match dimensions");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> row(int y) { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(const auto& other) const { return width_ == other.width() && height_ == other.height(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x); }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayImage = Grid<std::uint8_t>;
/// Cells hold 0 or 1.
using BinaryGrid = Grid<std::uint8_t>;

/// Circular shift along columns: out(x, y) = in((x - k) mod width, y).
template <typename T>
Grid<T> shift_columns(const Grid<T>& in, int k) {
  Grid<T> out(in.width(), in.height());
  const int w = in.width();
  if (w == 0) return out;
  const int s = ((k % w) + w) % w;
  for (int y = 0; y < in.height(); ++y) {
    auto src = in.row(y);
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[(x + s) % w] = src[x];
  }
  return out;
}

inline std::size_t count_set(const BinaryGrid& g) {
  std::size_t c = 0;
  for (auto v : g.values()) c += v != 0;
  return c;
}

/// Normalized (polar) iris image with its occlusion mask.
struct NormalizedIris {
  std::string id;
  GrayImage pixels;
  BinaryGrid mask;  // 1 = valid iris texture
  bool patch_source = false;  // relaxed dimensions, only usable for patch extraction

  int width() const noexcept { return pixels.width(); }
  int height() const noexcept { return pixels.height(); }
};

/// Throws DataError unless pixels and mask agree and, for pipeline images,
/// the size is exactly 512x64.
void check_normalized_iris(const NormalizedIris& iris);

}  // namespace bsif
