#pragma once

// Single-file model archive shared by the GAN and the classifier.
//
//   bytes 0..7   magic "AUGBCKPT"
//   u32          format version (kArchiveVersion)
//   u64          header length L
//   L bytes      UTF-8 JSON header: {"meta": {...}, "arrays": [{"name", "shape", "offset", "count"}]}
//   ...          float32 little-endian payload, arrays back to back (offset in floats)

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "augbench/error.hpp"
#include "augbench/nn/layers.hpp"

namespace augbench {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr char kArchiveMagic[8] = {'A', 'U', 'G', 'B', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kArchiveVersion = 1;

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

struct Archive {
  nlohmann::json meta;
  std::vector<NamedArray> arrays;

  const NamedArray& find(const std::string& name) const {
    for (const auto& a : arrays) {
      if (a.name == name) return a;
    }
    throw ValidationError("checkpoint has no array named '" + name + "'");
  }
};

inline void write_archive(const std::filesystem::path& path, const Archive& archive) {
  nlohmann::json header;
  header["meta"] = archive.meta;
  header["arrays"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& a : archive.arrays) {
    header["arrays"].push_back({{"name", a.name}, {"shape", a.shape}, {"offset", offset}, {"count", a.data.size()}});
    offset += a.data.size();
  }
  const std::string text = header.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::uint32_t version = kArchiveVersion;
  const std::uint64_t length = text.size();
  out.write(kArchiveMagic, sizeof(kArchiveMagic));
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&length), sizeof(length));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& a : archive.arrays) {
    out.write(reinterpret_cast<const char*>(a.data.data()), static_cast<std::streamsize>(a.data.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline Archive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t length = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&length), sizeof(length));
  if (!in || std::memcmp(magic, kArchiveMagic, sizeof(magic)) != 0) {
    throw ValidationError("'" + path.string() + "' is not an augbench checkpoint");
  }
  if (version != kArchiveVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  }
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("corrupt checkpoint header: " + std::string(e.what()));
  }
  Archive archive;
  archive.meta = header.at("meta");
  for (const auto& entry : header.at("arrays")) {
    NamedArray a;
    a.name = entry.at("name").get<std::string>();
    a.shape = entry.at("shape").get<std::vector<int>>();
    a.data.resize(entry.at("count").get<std::size_t>());
    in.read(reinterpret_cast<char*>(a.data.data()), static_cast<std::streamsize>(a.data.size() * sizeof(float)));
    archive.arrays.push_back(std::move(a));
  }
  if (!in) throw ValidationError("checkpoint '" + path.string() + "' is truncated");
  return archive;
}

template <typename T>
void append_parameters(Archive& archive, const nn::ParameterList<T>& params) {
  for (const auto* p : params) {
    NamedArray a;
    a.name = p->name;
    a.shape = {p->value.n, p->value.c, p->value.h, p->value.w};
    a.data.assign(p->value.data.begin(), p->value.data.end());
    archive.arrays.push_back(std::move(a));
  }
}

template <typename T>
void restore_parameters(const Archive& archive, const nn::ParameterList<T>& params) {
  for (auto* p : params) {
    const auto& a = archive.find(p->name);
    if (a.data.size() != p->value.size()) {
      throw ValidationError("checkpoint array '" + p->name + "' has " + std::to_string(a.data.size()) +
                            " values, model expects " + std::to_string(p->value.size()));
    }
    std::copy(a.data.begin(), a.data.end(), p->value.data.begin());
  }
}

}  // namespace augbench
