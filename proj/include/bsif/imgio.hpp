#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bsif/filter_bank.hpp"
#include "bsif/image.hpp"
#include "bsif/iris_template.hpp"

namespace bsif::io {

namespace fs = std::filesystem;

// Binary PGM (P5, maxval <= 255).
GrayImage read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const GrayImage& image);

/// Reads a mask from PGM (value > 127 is valid) or PBM P4 (bit 1 is valid).
BinaryGrid read_mask(const fs::path& path);
/// Writes a 0/255 PGM.
void write_mask(const fs::path& path, const BinaryGrid& mask);

/// With strict set, both files must be exactly 512x64. Without it the result
/// is tagged as a patch-source image.
NormalizedIris load_normalized_iris(const fs::path& image_path, const fs::path& mask_path, bool strict = true);

// "BSF1" filter banks: 16-byte header, then n*l*l little-endian doubles.
std::vector<std::uint8_t> serialize_bank(const FilterBank& bank);
FilterBank deserialize_bank(const std::vector<std::uint8_t>& bytes);
void save_filter_bank(const FilterBank& bank, const fs::path& path);
FilterBank load_filter_bank(const fs::path& path);

// "BST1" templates: magic, n, width, height, 32-byte fingerprint, packed
// planes then packed mask (row-major, MSB-first within a byte).
std::vector<std::uint8_t> serialize_template(const IrisTemplate& t);
IrisTemplate deserialize_template(const std::vector<std::uint8_t>& bytes);
void save_template(const IrisTemplate& t, const fs::path& path);
IrisTemplate load_template(const fs::path& path);

std::vector<std::uint8_t> read_file(const fs::path& path);
void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const fs::path& path, const std::string& text);

}  // namespace bsif::io
