#pragma once

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "augbench/error.hpp"
#include "augbench/image.hpp"

namespace augbench {

inline std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

/// Reads any PNG libpng understands and converts it to 8-bit RGB, then to [0,1].
inline Image read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&img, path.string().c_str()) == 0) {
    throw IoError("cannot read PNG '" + path.string() + "': " + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
  if (png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr) == 0) {
    png_image_free(&img);
    throw IoError("cannot decode PNG '" + path.string() + "': " + img.message);
  }
  Image out(static_cast<int>(img.height), static_cast<int>(img.width));
  auto& data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = buffer[i] / 255.0f;
  return out;
}

inline void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                           const std::vector<std::uint8_t>& rgb) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&img, path.string().c_str(), 0, rgb.data(), 0, nullptr) == 0) {
    throw IoError("cannot write PNG '" + path.string() + "': " + img.message);
  }
}

inline void write_png(const std::filesystem::path& path, const Image& image) {
  std::vector<std::uint8_t> bytes(image.size());
  const auto& data = image.data();
  for (std::size_t i = 0; i < data.size(); ++i) bytes[i] = to_byte(data[i]);
  write_png_rgb8(path, image.width(), image.height(), bytes);
}

}  // namespace augbench
