#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bsif/image.hpp"
#include "bsif/manifest.hpp"

namespace bsif {

/// Synthetic normalized irises: each class has a fixed random texture of
/// dot-like blobs on smoothed noise; each sample adds pixel noise, a random
/// circular shift of at most max_shift / 2 columns and a random occlusion
/// block.
struct SynthConfig {
  int classes = 20;
  int samples_per_class = 4;
  double noise_sigma = 8.0;
  int max_shift = 16;  // largest rotation between two samples of a class
  double max_occlusion = 0.25;  // fraction of pixels
  std::uint64_t seed = 1;
};

/// Class texture, periodic along columns, values roughly in [40, 215].
Grid<double> synth_texture(std::uint64_t seed);

struct SynthDataset {
  std::vector<NormalizedIris> images;
  std::vector<int> labels;     // class of each image
  std::vector<int> shifts;     // applied column shift
  DatasetManifest manifest;    // paths filled in by write_synthetic_dataset
};

/// Class c becomes subject "s<c>" (eye alternating L/R); the first half of
/// its samples are from sensor "A", the rest from sensor "B".
SynthDataset make_synthetic_dataset(const SynthConfig& cfg);

/// Writes <id>.pgm, <id>_mask.pgm and manifest.csv into dir.
void write_synthetic_dataset(SynthDataset& data, const std::filesystem::path& dir);

}  // namespace bsif
