// Dataset manifest: one JSON object per line binding an image file to
// (subject, finger class, impression, material). Line-delimited so a
// 20k-record manifest can be streamed.

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fpsynth/core.hpp"

namespace fpsynth {

struct ManifestRecord {
  std::string path;          // image file, relative to the manifest
  int64_t subject = 0;       // seed id; shared across finger classes
  FingerClass finger_class{1};
  int impression = 1;        // 1-based
  Material material = Material::Live;

  bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;

  bool operator==(const DatasetManifest&) const = default;

  /// Structural validation: field ranges plus uniqueness of the
  /// (subject, class, impression, material) tuple. Throws on the first
  /// violation, naming the offending record (1-based).
  void validate() const {
    std::set<std::tuple<int64_t, int, int, int>> seen;
    for (size_t i = 0; i < records.size(); ++i) {
      const ManifestRecord& r = records[i];
      const std::string where = "manifest record " + std::to_string(i + 1) + ": ";
      if (r.subject < 0) throw std::invalid_argument(where + "subject must be >= 0");
      if (r.impression < 1) throw std::invalid_argument(where + "impression must be >= 1");
      if (r.path.empty()) throw std::invalid_argument(where + "path must be non-empty");
      const auto key = std::make_tuple(r.subject, r.finger_class.index(), r.impression,
                                       static_cast<int>(r.material));
      if (!seen.insert(key).second) {
        throw std::invalid_argument(where +
                                    "duplicate (subject, class, impression, material) tuple");
      }
    }
  }

  /// Returns the indices (0-based) of records whose image file does not
  /// exist under `root`.
  std::vector<size_t> missing_files(const std::filesystem::path& root) const {
    std::vector<size_t> missing;
    for (size_t i = 0; i < records.size(); ++i) {
      if (!std::filesystem::exists(root / records[i].path)) missing.push_back(i);
    }
    return missing;
  }
};

inline void write_manifest(const DatasetManifest& manifest, std::ostream& out) {
  manifest.validate();
  for (const ManifestRecord& r : manifest.records) {
    nlohmann::ordered_json j;
    j["path"] = r.path;
    j["subject"] = r.subject;
    j["class"] = r.finger_class.index();
    j["impression"] = r.impression;
    j["material"] = std::string(to_string(r.material));
    out << j.dump() << '\n';
  }
}

inline void write_manifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  write_manifest(manifest, f);
  if (!f) throw std::runtime_error("short write: " + path.string());
}

inline DatasetManifest read_manifest(std::istream& in) {
  DatasetManifest manifest;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "manifest record " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(where + "malformed JSON (" + e.what() + ")");
    }
    ManifestRecord r;
    try {
      r.path = j.at("path").get<std::string>();
      r.subject = j.at("subject").get<int64_t>();
      r.finger_class = FingerClass(j.at("class").get<int>());
      r.impression = j.at("impression").get<int>();
      const std::string mat = j.at("material").get<std::string>();
      const auto m = material_from_string(mat);
      if (!m) throw std::invalid_argument("unknown material \"" + mat + "\"");
      r.material = *m;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(where + e.what());
    } catch (const std::out_of_range& e) {
      throw std::runtime_error(where + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + e.what());
    }
    manifest.records.push_back(std::move(r));
  }
  manifest.validate();
  return manifest;
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
  return read_manifest(f);
}

}  // namespace fpsynth
