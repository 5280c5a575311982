#include "bsif/synth.hpp"

#include <algorithm>
#include <cmath>

#include "bsif/error.hpp"
#include "bsif/imgio.hpp"
#include "bsif/rng.hpp"

namespace bsif {

Grid<double> synth_texture(std::uint64_t seed) {
  Rng rng(seed);
  const int w = kIrisWidth, h = kIrisHeight;
  Grid<double> noise(w, h);
  std::normal_distribution<double> normal;
  for (auto& v : noise.values()) v = normal(rng);

  // 5x5 box blur of white noise, wrapping along the angle.
  Grid<double> tex(w, h, 128.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0;
      int cnt = 0;
      for (int dy = -2; dy <= 2; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -2; dx <= 2; ++dx, ++cnt) s += noise.at(((x + dx) % w + w) % w, yy);
      }
      tex.at(x, y) += 30.0 * s / std::sqrt(static_cast<double>(cnt));
    }

  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h), usig(1.2, 3.5), uamp(25.0, 60.0);
  std::bernoulli_distribution dark(0.5);
  for (int b = 0; b < 350; ++b) {
    const double cx = ux(rng), cy = uy(rng), sig = usig(rng);
    const double amp = dark(rng) ? -uamp(rng) : uamp(rng);
    const int reach = static_cast<int>(std::ceil(3 * sig));
    for (int dy = -reach; dy <= reach; ++dy) {
      const int y = static_cast<int>(std::floor(cy)) + dy;
      if (y < 0 || y >= h) continue;
      for (int dx = -reach; dx <= reach; ++dx) {
        const int xi = static_cast<int>(std::floor(cx)) + dx;
        const double ddx = xi - cx, ddy = y - cy;
        tex.at(((xi % w) + w) % w, y) += amp * std::exp(-(ddx * ddx + ddy * ddy) / (2 * sig * sig));
      }
    }
  }
  return tex;
}

SynthDataset make_synthetic_dataset(const SynthConfig& cfg) {
  if (cfg.classes < 1 || cfg.samples_per_class < 1) throw PreconditionError("synthetic dataset needs classes and samples");
  if (cfg.max_occlusion < 0 || cfg.max_occlusion > 0.9) throw PreconditionError("occlusion fraction out of range");
  SynthDataset d;
  const int w = kIrisWidth, h = kIrisHeight;
  for (int c = 0; c < cfg.classes; ++c) {
    const auto texture = synth_texture(derive_seed(cfg.seed, {kTagSynth, static_cast<std::uint64_t>(c)}));
    for (int s = 0; s < cfg.samples_per_class; ++s) {
      Rng rng(derive_seed(cfg.seed, {kTagSynth, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(s) + 1}));
      const int shift = std::uniform_int_distribution<int>(-cfg.max_shift / 2, cfg.max_shift / 2)(rng);
      const auto shifted = shift_columns(texture, shift);
      std::normal_distribution<double> noise(0.0, cfg.noise_sigma);

      // Occlusion: a block at the outer (large-radius) rows, like an eyelid.
      BinaryGrid mask(w, h, 1);
      const double frac = std::uniform_real_distribution<double>(0.0, cfg.max_occlusion)(rng);
      const int rows = std::uniform_int_distribution<int>(8, 32)(rng);
      const int cols = std::min(w, static_cast<int>(frac * w * h / rows));
      const int start = std::uniform_int_distribution<int>(0, w - 1)(rng);
      for (int y = h - rows; y < h; ++y)
        for (int k = 0; k < cols; ++k) mask.at((start + k) % w, y) = 0;

      NormalizedIris iris;
      iris.id = "c" + std::to_string(c) + "_s" + std::to_string(s);
      iris.pixels = GrayImage(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double v = mask.at(x, y) ? shifted.at(x, y) + noise(rng) : 230.0 + noise(rng);
          iris.pixels.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
      iris.mask = std::move(mask);
      d.images.push_back(std::move(iris));
      d.labels.push_back(c);
      d.shifts.push_back(shift);

      ManifestRecord r;
      r.subject = "s" + std::to_string(c);
      r.eye = c % 2 == 0 ? Eye::Left : Eye::Right;
      r.sensor = s < (cfg.samples_per_class + 1) / 2 ? "A" : "B";
      r.iris_id = r.subject + (r.eye == Eye::Left ? "L" : "R");
      r.image = d.images.back().id + ".pgm";
      r.mask = d.images.back().id + "_mask.pgm";
      d.manifest.records.push_back(std::move(r));
    }
  }
  return d;
}

void write_synthetic_dataset(SynthDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    auto& r = data.manifest.records[i];
    r.image = dir / (data.images[i].id + ".pgm");
    r.mask = dir / (data.images[i].id + "_mask.pgm");
    io::write_pgm(r.image, data.images[i].pixels);
    io::write_mask(r.mask, data.images[i].mask);
  }
  save_manifest(data.manifest, dir / "manifest.csv");
}

}  // namespace bsif
