#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace bsif {

enum class Eye { Left, Right };

struct ManifestRecord {
  std::filesystem::path image;
  std::filesystem::path mask;
  std::string subject;
  Eye eye = Eye::Left;
  std::string sensor;
  std::string iris_id;
};

/// CSV with header `image,mask,subject,eye,sensor,iris_id`. Relative paths are
/// resolved against the manifest's directory when loading.
struct DatasetManifest {
  std::vector<ManifestRecord> records;

  std::set<std::string> subjects() const;
};

/// Throws DataError on duplicate image paths or an iris_id whose records
/// disagree on subject or eye.
void validate_manifest(const DatasetManifest& manifest);

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace bsif
