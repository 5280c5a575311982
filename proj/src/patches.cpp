#include "bsif/patches.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "bsif/error.hpp"
#include "bsif/imgio.hpp"
#include "bsif/rng.hpp"

namespace bsif {

namespace {

// cos/sin of 2*pi*j/512, exact at the four quadrant angles.
std::pair<double, double> unit_direction(int j) {
  const int quarter = kIrisWidth / 4;
  const int q = j / quarter;
  const double a = 2.0 * std::numbers::pi * (j % quarter) / kIrisWidth;
  const double c = std::cos(a), s = std::sin(a);
  switch (q) {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
  }
}

}  // namespace

std::string to_string(PatchSource s) {
  switch (s) {
    case PatchSource::Annotation: return "annotation";
    case PatchSource::Gaze: return "gaze";
    case PatchSource::Random: return "random";
  }
  return "random";
}

PatchSource parse_patch_source(const std::string& s) {
  if (s == "annotation") return PatchSource::Annotation;
  if (s == "gaze") return PatchSource::Gaze;
  if (s == "random") return PatchSource::Random;
  throw PreconditionError("unknown patch source '" + s + "' (expected annotation, gaze or random)");
}

RegionMask normalize_region(const RegionMask& region, const CircleParams& c) {
  if (!(c.pupil_r > 0) || !(c.iris_r > 0) || !(c.pupil_r < c.iris_r))
    throw PreconditionError("degenerate circle radii (need 0 < pupil radius < iris radius)");
  const auto& src = region.grid;
  RegionMask out{BinaryGrid(kIrisWidth, kIrisHeight), region.source_id};
  for (int j = 0; j < kIrisWidth; ++j) {
    const auto [cs, sn] = unit_direction(j);
    const double px = c.pupil_x + c.pupil_r * cs, py = c.pupil_y - c.pupil_r * sn;
    const double ix = c.iris_x + c.iris_r * cs, iy = c.iris_y - c.iris_r * sn;
    for (int k = 0; k < kIrisHeight; ++k) {
      const double t = static_cast<double>(k) / (kIrisHeight - 1);
      const long x = std::lround((1.0 - t) * px + t * ix);
      const long y = std::lround((1.0 - t) * py + t * iy);
      if (x < 0 || y < 0 || x >= src.width() || y >= src.height())
        throw DataError("circles extend outside the source image '" + region.source_id + "'");
      out.grid.at(j, k) = src.at(static_cast<int>(x), static_cast<int>(y)) ? 1 : 0;
    }
  }
  return out;
}

Rect largest_inscribed_rectangle(const BinaryGrid& region) {
  const int w = region.width(), h = region.height();
  std::vector<int> heights(static_cast<std::size_t>(w), 0), left(w), right(w), stack;
  stack.reserve(static_cast<std::size_t>(w));
  Rect best;
  auto better = [](const Rect& a, const Rect& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.width > b.width;
  };
  for (int y = 0; y < h; ++y) {
    auto row = region.row(y);
    for (int x = 0; x < w; ++x) heights[x] = row[x] ? heights[x] + 1 : 0;
    stack.clear();
    for (int x = 0; x < w; ++x) {
      while (!stack.empty() && heights[stack.back()] >= heights[x]) stack.pop_back();
      left[x] = stack.empty() ? -1 : stack.back();
      stack.push_back(x);
    }
    stack.clear();
    for (int x = w - 1; x >= 0; --x) {
      while (!stack.empty() && heights[stack.back()] >= heights[x]) stack.pop_back();
      right[x] = stack.empty() ? w : stack.back();
      stack.push_back(x);
    }
    for (int x = 0; x < w; ++x) {
      if (heights[x] == 0) continue;
      Rect r{left[x] + 1, y - heights[x] + 1, right[x] - left[x] - 1, heights[x]};
      if (best.area() == 0 || better(r, best)) best = r;
    }
  }
  if (best.area() == 0) throw DataError("region is empty: no inscribed rectangle");
  return best;
}

PatchSet sample_squares(const GrayImage& image, const Rect& rect, int side, int count, std::uint64_t seed,
                        PatchSource source) {
  if (side < 1 || side % 2 == 0) throw PreconditionError("patch side must be odd");
  if (count < 0) throw PreconditionError("patch count must be non-negative");
  if (rect.col < 0 || rect.row < 0 || rect.col + rect.width > image.width() || rect.row + rect.height > image.height())
    throw PreconditionError("rectangle lies outside the image");
  PatchSet set{side, source, {}};
  if (side > rect.width || side > rect.height) return set;
  Rng rng(seed);
  std::uniform_int_distribution<int> dx(0, rect.width - side), dy(0, rect.height - side);
  set.pixels.reserve(static_cast<std::size_t>(count) * side * side);
  for (int i = 0; i < count; ++i) {
    const int x0 = rect.col + dx(rng);
    const int y0 = rect.row + dy(rng);
    for (int y = 0; y < side; ++y) {
      auto r = image.row(y0 + y).subspan(static_cast<std::size_t>(x0), static_cast<std::size_t>(side));
      set.pixels.insert(set.pixels.end(), r.begin(), r.end());
    }
  }
  return set;
}

Corpus build_corpus(std::span<const NormalizedIris> images, std::span<const RegionEntry> regions,
                    std::span<const int> sides, int per_region_count, std::uint64_t seed) {
  Corpus corpus;
  for (int s : sides)
    if (s < 1 || s % 2 == 0) throw PreconditionError("patch sides must be odd");
  if (per_region_count < 0) throw PreconditionError("per-region count must be non-negative");
  if (!regions.empty()) corpus.source = regions.front().source;
  for (const auto& r : regions) {
    if (r.source != corpus.source)
      throw PreconditionError("annotation, gaze and random regions must not be mixed in one corpus");
    if (r.image_index >= images.size()) throw DataError("region refers to a missing image");
    if (!r.region.same_shape(images[r.image_index].pixels))
      throw DataError("region and image dimensions differ for '" + images[r.image_index].id + "'");
  }
  for (int s : sides) corpus.by_side[s] = PatchSet{s, corpus.source, {}};
  if (regions.empty()) {
    corpus.warnings.push_back("no regions given: corpus is empty");
    return corpus;
  }

  // Per-region results are computed independently and concatenated in region
  // order, so the corpus does not depend on the thread schedule.
  const auto n = static_cast<std::ptrdiff_t>(regions.size());
  std::vector<std::vector<PatchSet>> per_region(regions.size());
  std::vector<std::string> skipped(regions.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& entry = regions[static_cast<std::size_t>(i)];
    if (!entry.keep) continue;
    if (count_set(entry.region) == 0) {
      skipped[i] = "region " + std::to_string(i) + " is empty and was skipped";
      continue;
    }
    const Rect rect = largest_inscribed_rectangle(entry.region);
    const auto& img = images[entry.image_index].pixels;
    for (int s : sides)
      per_region[i].push_back(sample_squares(img, rect, s, per_region_count,
                                             derive_seed(seed, {kTagPatches, static_cast<std::uint64_t>(i),
                                                                static_cast<std::uint64_t>(s)}),
                                             entry.source));
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!skipped[i].empty()) corpus.warnings.push_back(skipped[i]);
    if (per_region[i].empty()) continue;
    ++corpus.regions_used;
    for (std::size_t k = 0; k < sides.size(); ++k) {
      auto& dst = corpus.by_side[sides[k]].pixels;
      const auto& src = per_region[i][k].pixels;
      dst.insert(dst.end(), src.begin(), src.end());
    }
  }
  for (const auto& [s, set] : corpus.by_side)
    if (set.count() == 0) corpus.warnings.push_back("no region fits patches of side " + std::to_string(s));
  return corpus;
}

std::vector<BinaryGrid> random_regions(const BinaryGrid& valid, int count, int min_side, int max_side,
                                       std::uint64_t seed) {
  if (min_side < 1 || max_side < min_side) throw PreconditionError("invalid random region size range");
  std::vector<BinaryGrid> out;
  const int w = valid.width(), h = valid.height();
  if (min_side > w || min_side > h) return out;
  Rng rng(seed);
  std::uniform_int_distribution<int> size_w(min_side, std::min(max_side, w)), size_h(min_side, std::min(max_side, h));
  const int max_attempts = 1000 * std::max(count, 1);
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
    const int rw = size_w(rng), rh = size_h(rng);
    const int x0 = std::uniform_int_distribution<int>(0, w - rw)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, h - rh)(rng);
    bool inside = true;
    for (int y = y0; y < y0 + rh && inside; ++y)
      for (int x = x0; x < x0 + rw; ++x)
        if (!valid.at(x, y)) {
          inside = false;
          break;
        }
    if (!inside) continue;
    BinaryGrid g(w, h);
    for (int y = y0; y < y0 + rh; ++y)
      for (int x = x0; x < x0 + rw; ++x) g.at(x, y) = 1;
    out.push_back(std::move(g));
  }
  return out;
}

void save_patch_set(const PatchSet& set, const std::filesystem::path& path) {
  std::vector<std::uint8_t> out{'B', 'S', 'P', '1'};
  auto put = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(static_cast<std::uint32_t>(set.side));
  put(static_cast<std::uint32_t>(set.count()));
  out.insert(out.end(), set.pixels.begin(), set.pixels.end());
  io::write_file(path, out);
}

PatchSet load_patch_set(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  if (bytes.size() < 12) throw DataError("truncated patch corpus " + path.string());
  if (std::memcmp(bytes.data(), "BSP1", 4) != 0) throw DataError("bad patch corpus magic in " + path.string());
  auto get = [&](std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    return v;
  };
  const auto side = get(4), count = get(8);
  if (side < 1 || side % 2 == 0 || side > 1023) throw DataError("patch side out of range in " + path.string());
  const std::size_t payload = static_cast<std::size_t>(count) * side * side;
  if (bytes.size() != 12 + payload) throw DataError("patch corpus payload size mismatch in " + path.string());
  PatchSet set;
  set.side = static_cast<int>(side);
  set.pixels.assign(bytes.begin() + 12, bytes.end());
  return set;
}

}  // namespace bsif
