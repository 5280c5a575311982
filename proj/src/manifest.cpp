#include "bsif/manifest.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "bsif/error.hpp"

namespace bsif {

namespace {

const char* kHeader = "image,mask,subject,eye,sensor,iris_id";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::set<std::string> DatasetManifest::subjects() const {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.subject);
  return s;
}

void validate_manifest(const DatasetManifest& manifest) {
  std::set<std::string> images;
  std::map<std::string, std::pair<std::string, Eye>> irises;
  for (const auto& r : manifest.records) {
    if (r.iris_id.empty() || r.subject.empty()) throw DataError("manifest record with empty subject or iris_id");
    if (!images.insert(r.image.lexically_normal().string()).second)
      throw DataError("duplicate image in manifest: " + r.image.string());
    auto [it, inserted] = irises.emplace(r.iris_id, std::make_pair(r.subject, r.eye));
    if (!inserted && (it->second.first != r.subject || it->second.second != r.eye))
      throw DataError("iris_id '" + r.iris_id + "' is shared by records with different subject or eye");
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  const auto base = path.parent_path();
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty manifest " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  if (line != kHeader) throw DataError("manifest header must be '" + std::string(kHeader) + "'");
  DatasetManifest m;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 6) throw DataError("manifest line " + std::to_string(lineno) + ": expected 6 columns");
    ManifestRecord r;
    r.image = std::filesystem::path(cells[0]);
    r.mask = std::filesystem::path(cells[1]);
    if (r.image.is_relative()) r.image = base / r.image;
    if (r.mask.is_relative()) r.mask = base / r.mask;
    r.subject = cells[2];
    if (cells[3] == "L") r.eye = Eye::Left;
    else if (cells[3] == "R") r.eye = Eye::Right;
    else throw DataError("manifest line " + std::to_string(lineno) + ": eye must be L or R");
    r.sensor = cells[4];
    r.iris_id = cells[5];
    m.records.push_back(std::move(r));
  }
  validate_manifest(m);
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  const auto base = path.parent_path();
  out << kHeader << '\n';
  for (const auto& r : manifest.records) {
    auto rel = [&](const std::filesystem::path& p) {
      return base.empty() ? p.generic_string() : p.lexically_proximate(base).generic_string();
    };
    out << rel(r.image) << ',' << rel(r.mask) << ',' << r.subject << ',' << (r.eye == Eye::Left ? "L" : "R") << ','
        << r.sensor << ',' << r.iris_id << '\n';
  }
}

}  // namespace bsif
