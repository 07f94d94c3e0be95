#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "augbench/error.hpp"
#include "augbench/image.hpp"
#include "augbench/png_io.hpp"

namespace augbench {

/// Side length every ingested image is rescaled to.
inline constexpr int kImageSize = 64;

inline constexpr int kCircularClasses = 36;
inline constexpr int kTriangularClasses = 16;

inline constexpr const char* kManifestFormat = "augbench-manifest";
inline constexpr int kManifestVersion = 1;

enum class ShapeFamily { circular, triangular, synthetic };
enum class Split { train, test };

inline std::string to_string(ShapeFamily f) {
  switch (f) {
    case ShapeFamily::circular: return "circular";
    case ShapeFamily::triangular: return "triangular";
    case ShapeFamily::synthetic: return "synthetic";
  }
  return "?";
}

inline ShapeFamily parse_family(const std::string& s) {
  if (s == "circular") return ShapeFamily::circular;
  if (s == "triangular") return ShapeFamily::triangular;
  if (s == "synthetic") return ShapeFamily::synthetic;
  throw ConfigError("unknown shape family '" + s + "' (expected circular|triangular|synthetic)");
}

inline std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw ValidationError("unknown split '" + s + "' (expected train|test)");
}

struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long area() const { return static_cast<long>(std::max(w, 0)) * std::max(h, 0); }
  bool operator==(const BoundingBox&) const = default;
};

/// One labelled image. Pixel buffers are immutable and shared, so copying a
/// sample (or a whole Dataset) never copies raster data.
struct ImageSample {
  std::shared_ptr<const Image> pixels;
  int class_index = 0;
  Split split = Split::train;
  std::optional<BoundingBox> bbox;
  std::optional<double> quality;

  const Image& image() const { return *pixels; }
};

inline ImageSample make_sample(Image image, int class_index, Split split = Split::train) {
  ImageSample s;
  s.pixels = std::make_shared<const Image>(std::move(image));
  s.class_index = class_index;
  s.split = split;
  return s;
}

struct Dataset {
  std::vector<ImageSample> samples;
  int num_classes = 0;
  ShapeFamily family = ShapeFamily::synthetic;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
    for (const auto& s : samples) {
      if (s.class_index >= 0 && s.class_index < num_classes) ++counts[s.class_index];
    }
    return counts;
  }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.class_index);
    return out;
  }

  Dataset with_samples(std::vector<ImageSample> s) const {
    return Dataset{std::move(s), num_classes, family};
  }

  Dataset split(Split which) const {
    std::vector<ImageSample> out;
    for (const auto& s : samples) {
      if (s.split == which) out.push_back(s);
    }
    return with_samples(std::move(out));
  }
};

inline int expected_classes(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::circular: return kCircularClasses;
    case ShapeFamily::triangular: return kTriangularClasses;
    case ShapeFamily::synthetic: return 0;
  }
  return 0;
}

/// Checks labels, class-count conventions and pixel ranges. Throws ValidationError.
inline void validate_dataset(const Dataset& d) {
  if (d.num_classes < 1) throw ValidationError("num_classes must be >= 1");
  const int expected = expected_classes(d.family);
  if (expected != 0 && d.num_classes != expected) {
    throw ValidationError(to_string(d.family) + " datasets have " + std::to_string(expected) +
                          " classes, manifest declares " + std::to_string(d.num_classes));
  }
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& s = d.samples[i];
    if (s.class_index < 0 || s.class_index >= d.num_classes) {
      throw ValidationError("sample " + std::to_string(i) + ": class_index " +
                            std::to_string(s.class_index) + " outside [0, " +
                            std::to_string(d.num_classes) + ")");
    }
    if (!s.pixels) throw ValidationError("sample " + std::to_string(i) + " has no pixels");
    if (!s.pixels->in_unit_range()) {
      throw ValidationError("sample " + std::to_string(i) + " has pixel values outside [0,1]");
    }
    if (s.quality && (*s.quality < 0.0 || *s.quality > 1.0)) {
      throw ValidationError("sample " + std::to_string(i) + ": quality outside [0,1]");
    }
  }
}

// ---------------------------------------------------------------------------
// Manifest I/O
//
// {
//   "format": "augbench-manifest", "version": 1,
//   "family": "circular", "num_classes": 36,
//   "samples": [
//     {"path": "images/000000.png", "class_index": 4, "split": "train",
//      "bbox": [x, y, w, h], "quality": 0.83},
//     ...
//   ]
// }
//
// Paths are relative to the manifest's directory. bbox and quality may be
// omitted or null.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string row_label(std::size_t row) { return "manifest row " + std::to_string(row); }

inline ImageSample parse_row(const nlohmann::json& row, std::size_t index,
                             const std::filesystem::path& base) {
  try {
    ImageSample s;
    const auto rel = row.at("path").get<std::string>();
    const auto path = base / rel;
    if (!std::filesystem::exists(path)) {
      throw IoError(row_label(index) + ": image file '" + path.string() + "' does not exist");
    }
    Image img;
    try {
      img = read_png(path);
    } catch (const IoError& e) {
      throw IoError(row_label(index) + ": " + e.what());
    }
    s.pixels = std::make_shared<const Image>(rescale_image(img, kImageSize));
    s.class_index = row.at("class_index").get<int>();
    s.split = parse_split(row.at("split").get<std::string>());
    if (row.contains("bbox") && !row["bbox"].is_null()) {
      const auto b = row["bbox"].get<std::vector<int>>();
      if (b.size() != 4) throw ValidationError("bbox must have four integers");
      s.bbox = BoundingBox{b[0], b[1], b[2], b[3]};
    }
    if (row.contains("quality") && !row["quality"].is_null()) {
      s.quality = row["quality"].get<double>();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(row_label(index) + ": " + e.what());
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind("manifest row", 0) == 0) throw;
    throw ValidationError(row_label(index) + ": " + msg);
  }
}

}  // namespace detail

/// Loads a manifest, rescaling every image to 64x64. Sample order equals row order.
inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
  if (!std::filesystem::exists(manifest_path)) {
    throw IoError("manifest '" + manifest_path.string() + "' does not exist");
  }
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest '" + manifest_path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
  }
  if (doc.value("format", std::string{}) != kManifestFormat) {
    throw ValidationError("manifest '" + manifest_path.string() + "' has wrong format tag");
  }
  if (doc.value("version", 0) != kManifestVersion) {
    throw ValidationError("unsupported manifest version " + doc.value("version", nlohmann::json{}).dump());
  }
  Dataset d;
  try {
    d.family = parse_family(doc.at("family").get<std::string>());
    d.num_classes = doc.at("num_classes").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest header: ") + e.what());
  }
  const auto& rows = doc.value("samples", nlohmann::json::array());
  if (rows.empty()) throw ValidationError("empty dataset: manifest has no samples");
  const auto base = manifest_path.parent_path();
  d.samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) d.samples.push_back(detail::parse_row(rows[i], i, base));
  validate_dataset(d);
  return d;
}

inline nlohmann::json manifest_row(const std::string& path, const ImageSample& s) {
  nlohmann::json row;
  row["path"] = path;
  row["class_index"] = s.class_index;
  row["split"] = to_string(s.split);
  row["bbox"] = s.bbox ? nlohmann::json{s.bbox->x, s.bbox->y, s.bbox->w, s.bbox->h}
                       : nlohmann::json(nullptr);
  row["quality"] = s.quality ? nlohmann::json(*s.quality) : nlohmann::json(nullptr);
  return row;
}

/// Writes images as 8-bit PNGs under out_dir/images and a manifest.json.
/// Samples that share a pixel buffer share one image file.
inline std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& out_dir) {
  if (d.empty()) throw ValidationError("empty dataset: refusing to save a manifest with no samples");
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) throw IoError("cannot create '" + (out_dir / "images").string() + "': " + ec.message());

  nlohmann::json doc;
  doc["format"] = kManifestFormat;
  doc["version"] = kManifestVersion;
  doc["family"] = to_string(d.family);
  doc["num_classes"] = d.num_classes;
  auto rows = nlohmann::json::array();

  std::unordered_map<const Image*, std::string> written;
  for (const auto& s : d.samples) {
    auto it = written.find(s.pixels.get());
    if (it == written.end()) {
      char name[32];
      std::snprintf(name, sizeof(name), "images/%06zu.png", written.size());
      write_png(out_dir / name, s.image());
      it = written.emplace(s.pixels.get(), name).first;
    }
    rows.push_back(manifest_row(it->second, s));
  }
  doc["samples"] = std::move(rows);

  const auto manifest = out_dir / "manifest.json";
  std::ofstream out(manifest);
  if (!out) throw IoError("cannot write manifest '" + manifest.string() + "'");
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("write failed for '" + manifest.string() + "'");
  return manifest;
}

/// Picks the n highest-quality samples. Quality comes from the quality field
/// when every sample has one, otherwise from bounding-box area. Ties go to the
/// earlier sample; the result keeps dataset order.
inline Dataset select_gan_subset(const Dataset& d, long n) {
  if (n < 0) throw ValidationError("subset size must be >= 0");
  if (static_cast<std::size_t>(n) > d.size()) {
    throw ValidationError("subset size " + std::to_string(n) + " exceeds dataset size " +
                          std::to_string(d.size()));
  }
  const bool all_quality =
      std::all_of(d.samples.begin(), d.samples.end(), [](const auto& s) { return s.quality.has_value(); });
  std::vector<double> score(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& s = d.samples[i];
    score[i] = all_quality ? *s.quality : (s.bbox ? static_cast<double>(s.bbox->area()) : 0.0);
  }
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  order.resize(static_cast<std::size_t>(n));
  std::sort(order.begin(), order.end());
  std::vector<ImageSample> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(d.samples[i]);
  return d.with_samples(std::move(out));
}

/// Concatenation used to build the GAN training pool (base + generated).
inline Dataset merge_datasets(const Dataset& a, const Dataset& b) {
  if (a.num_classes != b.num_classes) {
    throw ValidationError("cannot merge datasets with different class counts");
  }
  Dataset out = a;
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

}  // namespace augbench
