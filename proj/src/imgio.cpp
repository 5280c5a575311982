#include "bsif/imgio.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/sha.h>

#include "bsif/error.hpp"

namespace bsif::io {

namespace {

constexpr std::size_t kBankHeaderSize = 16;
constexpr std::size_t kTemplateHeaderSize = 16 + 32;

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 1;
  std::size_t data_offset = 0;
};

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') tok.push_back(static_cast<char>(bytes[pos++]));
  return tok;
}

int parse_positive(const std::string& tok, const fs::path& path, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9)
    throw DataError("malformed " + std::string(what) + " in header of " + path.string());
  return std::stoi(tok);
}

PnmHeader parse_header(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  PnmHeader h;
  std::size_t pos = 0;
  h.magic = next_token(bytes, pos);
  if (h.magic != "P5" && h.magic != "P4") throw DataError("unsupported image format '" + h.magic + "' in " + path.string());
  h.width = parse_positive(next_token(bytes, pos), path, "width");
  h.height = parse_positive(next_token(bytes, pos), path, "height");
  if (h.magic == "P5") {
    h.maxval = parse_positive(next_token(bytes, pos), path, "maxval");
    if (h.maxval < 1 || h.maxval > 255) throw DataError("only 8-bit PGM is supported: " + path.string());
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw DataError("malformed header in " + path.string());
  h.data_offset = pos + 1;
  return h;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

std::size_t packed_size(int width, int height) {
  return (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 7) / 8;
}

void pack_plane(const BitPlane& p, std::vector<std::uint8_t>& out) {
  const std::size_t base = out.size();
  out.resize(base + packed_size(p.width(), p.height()), 0);
  std::size_t k = 0;
  for (int y = 0; y < p.height(); ++y)
    for (int x = 0; x < p.width(); ++x, ++k)
      if (p.get(x, y)) out[base + k / 8] |= static_cast<std::uint8_t>(0x80u >> (k % 8));
}

BitPlane unpack_plane(const std::vector<std::uint8_t>& in, std::size_t pos, int width, int height) {
  BitPlane p(width, height);
  std::size_t k = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x, ++k)
      if (in[pos + k / 8] & (0x80u >> (k % 8))) p.set(x, y, true);
  return p;
}

}  // namespace

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed for " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

GrayImage read_pgm(const fs::path& path) {
  const auto bytes = read_file(path);
  const auto h = parse_header(bytes, path);
  if (h.magic != "P5") throw DataError("expected binary PGM (P5): " + path.string());
  const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() < h.data_offset + n) throw DataError("truncated PGM data in " + path.string());
  return GrayImage(h.width, h.height,
                   std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset),
                                             bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset + n)));
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.values().begin(), image.values().end());
  write_file(path, bytes);
}

BinaryGrid read_mask(const fs::path& path) {
  const auto bytes = read_file(path);
  const auto h = parse_header(bytes, path);
  BinaryGrid mask(h.width, h.height);
  if (h.magic == "P5") {
    const std::size_t n = mask.size();
    if (bytes.size() < h.data_offset + n) throw DataError("truncated PGM mask " + path.string());
    for (std::size_t i = 0; i < n; ++i) mask.values()[i] = bytes[h.data_offset + i] > 127 ? 1 : 0;
    return mask;
  }
  const std::size_t row_bytes = (static_cast<std::size_t>(h.width) + 7) / 8;
  if (bytes.size() < h.data_offset + row_bytes * h.height) throw DataError("truncated PBM mask " + path.string());
  for (int y = 0; y < h.height; ++y)
    for (int x = 0; x < h.width; ++x) {
      const auto b = bytes[h.data_offset + y * row_bytes + x / 8];
      mask.at(x, y) = (b >> (7 - x % 8)) & 1u;
    }
  return mask;
}

void write_mask(const fs::path& path, const BinaryGrid& mask) {
  GrayImage img(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) img.values()[i] = mask.values()[i] ? 255 : 0;
  write_pgm(path, img);
}

NormalizedIris load_normalized_iris(const fs::path& image_path, const fs::path& mask_path, bool strict) {
  NormalizedIris iris;
  iris.id = image_path.stem().string();
  iris.pixels = read_pgm(image_path);
  iris.mask = read_mask(mask_path);
  iris.patch_source = !strict;
  if (!iris.pixels.same_shape(iris.mask))
    throw DataError("dimension mismatch between " + image_path.string() + " and " + mask_path.string());
  check_normalized_iris(iris);
  return iris;
}

std::vector<std::uint8_t> serialize_bank(const FilterBank& bank) {
  if (bank.count() < 1) throw PreconditionError("cannot serialize an empty filter bank");
  std::vector<std::uint8_t> out{'B', 'S', 'F', '1'};
  out.reserve(kBankHeaderSize + bank.coefficients().size() * 8);
  put_u32(out, static_cast<std::uint32_t>(bank.count()));
  put_u32(out, static_cast<std::uint32_t>(bank.side()));
  put_u32(out, 0);
  for (double c : bank.coefficients()) {
    const auto bits = std::bit_cast<std::uint64_t>(c);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

FilterBank deserialize_bank(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kBankHeaderSize) throw DataError("truncated filter bank header");
  if (std::memcmp(bytes.data(), "BSF1", 4) != 0) throw DataError("bad filter bank magic");
  const auto n = get_u32(bytes, 4);
  const auto l = get_u32(bytes, 8);
  if (n < 1 || n > kMaxFilters) throw DataError("filter count out of range: " + std::to_string(n));
  if (l < 3 || l % 2 == 0 || l > 1023) throw DataError("filter side out of range: " + std::to_string(l));
  if (get_u32(bytes, 12) != 0) throw DataError("reserved filter bank field is not zero");
  const std::size_t count = static_cast<std::size_t>(n) * l * l;
  if (bytes.size() != kBankHeaderSize + count * 8)
    throw DataError(bytes.size() < kBankHeaderSize + count * 8 ? "truncated filter bank payload"
                                                               : "trailing bytes after filter bank payload");
  std::vector<double> coeffs(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[kBankHeaderSize + 8 * k + i]) << (8 * i);
    coeffs[k] = std::bit_cast<double>(bits);
    if (!std::isfinite(coeffs[k])) throw DataError("non-finite filter coefficient");
  }
  return FilterBank(static_cast<int>(n), static_cast<int>(l), std::move(coeffs));
}

void save_filter_bank(const FilterBank& bank, const fs::path& path) { write_file(path, serialize_bank(bank)); }

FilterBank load_filter_bank(const fs::path& path) { return deserialize_bank(read_file(path)); }

std::vector<std::uint8_t> serialize_template(const IrisTemplate& t) {
  check_template(t);
  std::vector<std::uint8_t> out{'B', 'S', 'T', '1'};
  put_u32(out, static_cast<std::uint32_t>(t.count()));
  put_u32(out, static_cast<std::uint32_t>(t.width()));
  put_u32(out, static_cast<std::uint32_t>(t.height()));
  out.insert(out.end(), t.bank_fingerprint.begin(), t.bank_fingerprint.end());
  for (const auto& p : t.planes) pack_plane(p, out);
  pack_plane(t.mask, out);
  return out;
}

IrisTemplate deserialize_template(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kTemplateHeaderSize) throw DataError("truncated template header");
  if (std::memcmp(bytes.data(), "BST1", 4) != 0) throw DataError("bad template magic");
  const auto n = get_u32(bytes, 4);
  const auto w = get_u32(bytes, 8);
  const auto h = get_u32(bytes, 12);
  if (n < 1 || n > kMaxFilters) throw DataError("template plane count out of range");
  if (w < 1 || h < 1 || w > 1u << 16 || h > 1u << 16) throw DataError("template dimensions out of range");
  const std::size_t section = packed_size(static_cast<int>(w), static_cast<int>(h));
  const std::size_t expected = kTemplateHeaderSize + section * (n + 1);
  if (bytes.size() != expected)
    throw DataError(bytes.size() < expected ? "truncated template payload" : "trailing bytes after template payload");
  IrisTemplate t;
  std::copy_n(bytes.begin() + 16, 32, t.bank_fingerprint.begin());
  std::size_t pos = kTemplateHeaderSize;
  for (std::uint32_t i = 0; i < n; ++i, pos += section)
    t.planes.push_back(unpack_plane(bytes, pos, static_cast<int>(w), static_cast<int>(h)));
  t.mask = unpack_plane(bytes, pos, static_cast<int>(w), static_cast<int>(h));
  return t;
}

void save_template(const IrisTemplate& t, const fs::path& path) { write_file(path, serialize_template(t)); }

IrisTemplate load_template(const fs::path& path) { return deserialize_template(read_file(path)); }

}  // namespace bsif::io

namespace bsif {

Fingerprint fingerprint(const FilterBank& bank) {
  const auto bytes = io::serialize_bank(bank);
  Fingerprint fp{};
  SHA256(bytes.data(), bytes.size(), fp.data());
  return fp;
}

}  // namespace bsif
