#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "augbench/error.hpp"

namespace augbench {

/// H x W x 3 raster, channels interleaved (HWC), values nominally in [0, 1].
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int height, int width, float fill = 0.0f) : height_(height), width_(width) {
    if (height < 1 || width < 1) {
      throw ValidationError("image dimensions must be positive, got " + std::to_string(height) +
                            "x" + std::to_string(width));
    }
    data_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  float& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  float at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  // Border-replicating access.
  float clamped(int y, int x, int c) const {
    return at(std::clamp(y, 0, height_ - 1), std::clamp(x, 0, width_ - 1), c);
  }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const Image& other) const = default;

  void clip() {
    for (auto& v : data_) v = std::clamp(v, 0.0f, 1.0f);
  }

  bool in_unit_range() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](float v) { return v >= 0.0f && v <= 1.0f; });
  }

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Bilinear sample with half-pixel centres and border replication.
inline float sample_bilinear(const Image& img, double y, double x, int c) {
  const double fy = std::floor(y);
  const double fx = std::floor(x);
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  const double wy = y - fy;
  const double wx = x - fx;
  const double top = (1.0 - wx) * img.clamped(y0, x0, c) + wx * img.clamped(y0, x0 + 1, c);
  const double bottom =
      (1.0 - wx) * img.clamped(y0 + 1, x0, c) + wx * img.clamped(y0 + 1, x0 + 1, c);
  return static_cast<float>((1.0 - wy) * top + wy * bottom);
}

/// Bilinear resize to target x target. Uses half-pixel centre alignment, so an
/// input already at the target size is returned unchanged.
inline Image rescale_image(const Image& src, int target) {
  if (target < 1) throw ValidationError("rescale target must be >= 1");
  if (src.empty()) throw ValidationError("cannot rescale an empty image");
  if (src.height() == target && src.width() == target) return src;

  Image out(target, target);
  const double sy = static_cast<double>(src.height()) / target;
  const double sx = static_cast<double>(src.width()) / target;
  for (int y = 0; y < target; ++y) {
    const double yy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    for (int x = 0; x < target; ++x) {
      const double xx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
      for (int c = 0; c < Image::kChannels; ++c) {
        out.at(y, x, c) = std::clamp(sample_bilinear(src, yy, xx, c), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

}  // namespace augbench
