#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bsif/image.hpp"

namespace bsif {

/// Pupil and iris boundary circles in source-image pixel coordinates.
struct CircleParams {
  double pupil_x = 0, pupil_y = 0, pupil_r = 0;
  double iris_x = 0, iris_y = 0, iris_r = 0;
};

struct RegionMask {
  BinaryGrid grid;
  std::string source_id;
};

struct Rect {
  int col = 0, row = 0, width = 0, height = 0;
  long long area() const noexcept { return static_cast<long long>(width) * height; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class PatchSource { Annotation, Gaze, Random };

std::string to_string(PatchSource s);
PatchSource parse_patch_source(const std::string& s);

/// Square l x l patches, raw 8-bit intensities stored back to back.
struct PatchSet {
  int side = 0;
  PatchSource source = PatchSource::Random;
  std::vector<std::uint8_t> pixels;

  std::size_t count() const noexcept {
    return side == 0 ? 0 : pixels.size() / (static_cast<std::size_t>(side) * side);
  }
  std::span<const std::uint8_t> patch(std::size_t i) const {
    const std::size_t n = static_cast<std::size_t>(side) * side;
    return std::span<const std::uint8_t>(pixels).subspan(i * n, n);
  }
  friend bool operator==(const PatchSet&, const PatchSet&) = default;
};

/// Maps a Cartesian region onto the 512x64 polar grid. Column j samples the
/// angle 2*pi*j/512 (0 along +x, counter-clockwise as displayed, i.e. towards
/// smaller row indices); row k samples the point k/63 of the way from the
/// pupil boundary to the iris boundary. Each sample takes the nearest source
/// pixel.
RegionMask normalize_region(const RegionMask& region, const CircleParams& circles);

/// Maximal-area axis-aligned rectangle of set cells. Ties go to the smallest
/// row, then smallest column, then the wider rectangle. Throws DataError for
/// an empty region.
Rect largest_inscribed_rectangle(const BinaryGrid& region);

/// `count` l x l windows of `image` with top-left corners uniform over the
/// admissible offsets inside `rect` (with replacement). Returns an empty set
/// when the square does not fit.
PatchSet sample_squares(const GrayImage& image, const Rect& rect, int side, int count, std::uint64_t seed,
                        PatchSource source = PatchSource::Random);

/// One region of interest attached to an image. `keep` carries the
/// upstream selection predicate (e.g. correctly classified genuine pairs).
struct RegionEntry {
  std::size_t image_index = 0;
  BinaryGrid region;
  PatchSource source = PatchSource::Annotation;
  bool keep = true;
};

struct Corpus {
  PatchSource source = PatchSource::Random;
  std::map<int, PatchSet> by_side;
  std::size_t regions_used = 0;
  std::vector<std::string> warnings;
};

/// Builds one PatchSet per side. Every entry must share one source tag.
Corpus build_corpus(std::span<const NormalizedIris> images, std::span<const RegionEntry> regions,
                    std::span<const int> sides, int per_region_count, std::uint64_t seed);

/// Random axis-aligned rectangular regions fully inside the valid mask, used
/// to build the random-patch baseline corpus.
std::vector<BinaryGrid> random_regions(const BinaryGrid& valid, int count, int min_side, int max_side,
                                       std::uint64_t seed);

// "BSP1" corpus files: magic, u32 l, u32 count, count*l*l bytes.
void save_patch_set(const PatchSet& set, const std::filesystem::path& path);
PatchSet load_patch_set(const std::filesystem::path& path);

}  // namespace bsif
