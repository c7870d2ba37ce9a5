// Dataset generation driver: enumerates (class, subject, impression)
// tuples, derives one RNG stream per image, and renders master prints,
// impressions, and optional spoof variants. Output is a pure function of
// the spec; worker count never changes a byte.

#pragma once

#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/image.hpp"
#include "fpsynth/impression.hpp"
#include "fpsynth/manifest.hpp"
#include "fpsynth/masterprint.hpp"
#include "fpsynth/parallel.hpp"
#include "fpsynth/png_io.hpp"
#include "fpsynth/rng.hpp"
#include "fpsynth/spoof.hpp"

namespace fpsynth {

struct GenerateSpec {
  std::vector<FingerClass> classes;
  int subjects_per_class = 1;
  int impressions = 1;
  Material material = Material::Live;
  uint64_t master_seed = 0;
  int workers = 1;

  void validate() const {
    if (classes.empty()) throw std::invalid_argument("generate spec: class list is empty");
    std::set<int> seen;
    for (FingerClass c : classes) {
      if (!seen.insert(c.index()).second) {
        throw std::invalid_argument("generate spec: duplicate class " +
                                    std::to_string(c.index()));
      }
    }
    if (subjects_per_class < 1) throw std::invalid_argument("generate spec: subjects must be >= 1");
    if (impressions < 1) throw std::invalid_argument("generate spec: impressions must be >= 1");
  }

  size_t item_count() const {
    return classes.size() * static_cast<size_t>(subjects_per_class) *
           static_cast<size_t>(impressions);
  }
};

inline constexpr uint64_t kSpoofForkTag = 0x5B00F;

/// Directory layout: <material>/<class>/<subject>_<impression>.png.
inline std::string relative_image_path(const ManifestRecord& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04lld_%d.png", static_cast<long long>(r.subject),
                r.impression);
  return std::string(to_string(r.material)) + "/" + std::to_string(r.finger_class.index()) +
         "/" + buf;
}

namespace detail {

inline ManifestRecord make_record(const GenerateSpec& spec, size_t class_idx,
                                  int64_t subject, int impression) {
  ManifestRecord r;
  r.subject = subject;
  r.finger_class = spec.classes[class_idx];
  r.impression = impression;
  r.material = spec.material;
  r.path = relative_image_path(r);
  return r;
}

/// Renders one image. The master stream is the impression-0 slot of the
/// (seed, subject, class) tuple, so all impressions of a finger share
/// one master print; spoofing uses a forked stream so it never disturbs
/// the live impression.
inline GrayImage render_item(const GenerateSpec& spec, size_t class_idx, int64_t subject,
                             int impression, const GrayImage& master) {
  RngStream rng = derive_rng(spec.master_seed, static_cast<uint64_t>(subject),
                             spec.classes[class_idx], static_cast<uint64_t>(impression));
  GrayImage img = generate_impression(master, rng);
  if (spec.material != Material::Live) {
    RngStream spoof_rng = rng.fork(kSpoofForkTag);
    img = apply_spoof(img, spec.material, spoof_rng);
  }
  return img;
}

inline GrayImage render_master(const GenerateSpec& spec, size_t class_idx, int64_t subject) {
  RngStream master_rng = derive_rng(spec.master_seed, static_cast<uint64_t>(subject),
                                    spec.classes[class_idx], 0);
  const MasterPrintParams params = sample_master_params(spec.classes[class_idx], master_rng);
  return synthesize_master(params, spec.classes[class_idx], master_rng);
}

}  // namespace detail

struct GeneratedItem {
  ManifestRecord record;
  GrayImage image;
};

/// Generates the whole dataset in memory, ordered by (class position,
/// subject, impression).
inline std::vector<GeneratedItem> generate_in_memory(const GenerateSpec& spec) {
  spec.validate();
  std::vector<GeneratedItem> items(spec.item_count());
  const size_t n_masters = spec.classes.size() * static_cast<size_t>(spec.subjects_per_class);
  parallel_for(n_masters, spec.workers, [&](size_t begin, size_t end) {
    for (size_t m = begin; m < end; ++m) {
      const size_t class_idx = m / spec.subjects_per_class;
      const int64_t subject = static_cast<int64_t>(m % spec.subjects_per_class);
      const GrayImage master = detail::render_master(spec, class_idx, subject);
      for (int imp = 1; imp <= spec.impressions; ++imp) {
        const size_t slot = m * spec.impressions + (imp - 1);
        items[slot].record = detail::make_record(spec, class_idx, subject, imp);
        items[slot].image = detail::render_item(spec, class_idx, subject, imp, master);
      }
    }
  });
  return items;
}

/// Generates the dataset under out_dir and writes manifest.jsonl beside
/// the images. Rerunning the same spec reproduces every byte.
inline DatasetManifest generate_dataset(const GenerateSpec& spec,
                                        const std::filesystem::path& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (FingerClass c : spec.classes) {
    fs::create_directories(out_dir / std::string(to_string(spec.material)) /
                           std::to_string(c.index()));
  }

  DatasetManifest manifest;
  manifest.records.resize(spec.item_count());
  const size_t n_masters = spec.classes.size() * static_cast<size_t>(spec.subjects_per_class);
  parallel_for(n_masters, spec.workers, [&](size_t begin, size_t end) {
    for (size_t m = begin; m < end; ++m) {
      const size_t class_idx = m / spec.subjects_per_class;
      const int64_t subject = static_cast<int64_t>(m % spec.subjects_per_class);
      const GrayImage master = detail::render_master(spec, class_idx, subject);
      for (int imp = 1; imp <= spec.impressions; ++imp) {
        const size_t slot = m * spec.impressions + (imp - 1);
        ManifestRecord record = detail::make_record(spec, class_idx, subject, imp);
        const GrayImage img = detail::render_item(spec, class_idx, subject, imp, master);
        write_png_gray8(out_dir / record.path, img);
        manifest.records[slot] = std::move(record);
      }
    }
  });
  write_manifest(manifest, out_dir / "manifest.jsonl");
  return manifest;
}

}  // namespace fpsynth
