#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/image.hpp"
#include "augbench/rng.hpp"

namespace augbench {

enum class Technique { blur, brightness, contrast, displacement, occlusion, rotation, scaling };

inline constexpr std::array<Technique, 7> kAllTechniques{Technique::blur,         Technique::brightness,
                                                         Technique::contrast,     Technique::displacement,
                                                         Technique::occlusion,    Technique::rotation,
                                                         Technique::scaling};

inline std::string to_string(Technique t) {
  switch (t) {
    case Technique::blur: return "blur";
    case Technique::brightness: return "brightness";
    case Technique::contrast: return "contrast";
    case Technique::displacement: return "displacement";
    case Technique::occlusion: return "occlusion";
    case Technique::rotation: return "rotation";
    case Technique::scaling: return "scaling";
  }
  return "?";
}

inline std::optional<Technique> parse_technique(const std::string& s) {
  for (auto t : kAllTechniques) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

/// Parameter tuple layout per technique:
///   blur          (sigma)
///   brightness    (delta)
///   contrast      (factor)
///   displacement  (dx, dy)            pixels
///   occlusion     (x, y, w, h, fill)  pixels, rectangle clipped to the image
///   rotation      (degrees)
///   scaling       (factor)
inline std::size_t param_count(Technique t) {
  switch (t) {
    case Technique::displacement: return 2;
    case Technique::occlusion: return 5;
    default: return 1;
  }
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// One classical technique with its sampling ranges (one interval per tuple entry).
struct AugmentationSpec {
  Technique technique = Technique::contrast;
  std::vector<Interval> ranges;
  std::uint64_t seed = 1;
};

/// Calibrated defaults: ranges chosen so a sign stays recognisable.
inline std::vector<Interval> default_ranges(Technique t) {
  switch (t) {
    case Technique::blur: return {{0.5, 2.0}};
    case Technique::brightness: return {{-0.25, 0.25}};
    case Technique::contrast: return {{0.6, 1.4}};
    case Technique::displacement: return {{-6.0, 6.0}, {-6.0, 6.0}};
    // w, h <= 32 keeps the rectangle within 25% of a 64x64 image.
    case Technique::occlusion: return {{0.0, 48.0}, {0.0, 48.0}, {0.0, 32.0}, {0.0, 32.0}, {0.5, 0.5}};
    case Technique::rotation: return {{-15.0, 15.0}};
    case Technique::scaling: return {{0.8, 1.2}};
  }
  return {};
}

inline AugmentationSpec default_spec(Technique t, std::uint64_t seed = 1) { return {t, default_ranges(t), seed}; }

namespace detail {

inline void require(bool ok, Technique t, const std::string& what) {
  if (!ok) throw ValidationError(to_string(t) + ": " + what);
}

inline void check_params(Technique t, const std::vector<double>& p) {
  require(p.size() == param_count(t), t,
          "expected " + std::to_string(param_count(t)) + " parameters, got " + std::to_string(p.size()));
  for (double v : p) require(std::isfinite(v), t, "parameters must be finite");
  switch (t) {
    case Technique::blur: require(p[0] >= 0.0 && p[0] <= 16.0, t, "sigma must lie in [0, 16]"); break;
    case Technique::brightness: require(p[0] >= -1.0 && p[0] <= 1.0, t, "delta must lie in [-1, 1]"); break;
    case Technique::contrast: require(p[0] >= 0.0 && p[0] <= 10.0, t, "factor must lie in [0, 10]"); break;
    case Technique::displacement:
      require(std::abs(p[0]) <= 64.0 && std::abs(p[1]) <= 64.0, t, "offsets must lie in [-64, 64]");
      break;
    case Technique::occlusion:
      require(p[2] >= 0.0 && p[3] >= 0.0, t, "rectangle size must be non-negative");
      require(p[4] >= 0.0 && p[4] <= 1.0, t, "fill must lie in [0, 1]");
      break;
    case Technique::rotation: require(std::abs(p[0]) <= 360.0, t, "angle must lie in [-360, 360]"); break;
    case Technique::scaling: require(p[0] > 0.0 && p[0] <= 10.0, t, "factor must lie in (0, 10]"); break;
  }
}

inline std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable Gaussian blur with border replication.
inline Image blur(const Image& src, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  if (r == 0) return src;
  const int h = src.height(), w = src.width();
  std::vector<double> tmp(static_cast<std::size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * src.clamped(y, x + i, c);
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  Image out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          const int yy = std::clamp(y + i, 0, h - 1);
          acc += k[i + r] * tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
        }
        out.at(y, x, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

// Inverse-mapped warp: out(y, x) = src(map(y, x)), bilinear, border replication.
template <typename Map>
Image warp(const Image& src, Map map) {
  Image out(src.height(), src.width());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const auto [sy, sx] = map(static_cast<double>(y), static_cast<double>(x));
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = sample_bilinear(src, sy, sx, c);
    }
  }
  return out;
}

}  // namespace detail

/// Applies one technique with explicit parameters. Size-generic; the
/// benchmark pipeline always feeds 64x64 rasters. Output is clipped to [0,1].
inline Image apply_op(const Image& image, Technique t, const std::vector<double>& p) {
  detail::check_params(t, p);
  Image out;
  switch (t) {
    case Technique::blur: out = detail::blur(image, p[0]); break;
    case Technique::brightness: {
      out = image;
      const auto d = static_cast<float>(p[0]);
      for (auto& v : out.data()) v += d;
      break;
    }
    case Technique::contrast: {
      // c*x + (1-c)*0.5 is exact at c = 1.
      out = image;
      const auto c = static_cast<float>(p[0]);
      const float offset = (1.0f - c) * 0.5f;
      for (auto& v : out.data()) v = c * v + offset;
      break;
    }
    case Technique::displacement: {
      const double dx = p[0], dy = p[1];
      out = detail::warp(image, [&](double y, double x) { return std::pair{y - dy, x - dx}; });
      break;
    }
    case Technique::occlusion: {
      out = image;
      const int x0 = std::max(0, static_cast<int>(std::lround(p[0])));
      const int y0 = std::max(0, static_cast<int>(std::lround(p[1])));
      const int x1 = std::min(image.width(), static_cast<int>(std::lround(p[0] + p[2])));
      const int y1 = std::min(image.height(), static_cast<int>(std::lround(p[1] + p[3])));
      const auto fill = static_cast<float>(p[4]);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          for (int c = 0; c < 3; ++c) out.at(y, x, c) = fill;
        }
      }
      break;
    }
    case Technique::rotation: {
      const double a = p[0] * std::numbers::pi / 180.0;
      const double ca = std::cos(a), sa = std::sin(a);
      const double cy = 0.5 * (image.height() - 1), cx = 0.5 * (image.width() - 1);
      out = detail::warp(image, [&](double y, double x) {
        const double u = x - cx, v = y - cy;
        return std::pair{-sa * u + ca * v + cy, ca * u + sa * v + cx};
      });
      break;
    }
    case Technique::scaling: {
      const double s = p[0];
      const double cy = 0.5 * (image.height() - 1), cx = 0.5 * (image.width() - 1);
      out = detail::warp(image, [&](double y, double x) { return std::pair{(y - cy) / s + cy, (x - cx) / s + cx}; });
      break;
    }
  }
  out.clip();
  return out;
}

inline void validate_spec(const AugmentationSpec& spec) {
  if (spec.ranges.size() != param_count(spec.technique)) {
    throw ConfigError(to_string(spec.technique) + ": expected " + std::to_string(param_count(spec.technique)) +
                      " parameter ranges, got " + std::to_string(spec.ranges.size()));
  }
  for (const auto& r : spec.ranges) {
    if (!(r.lo <= r.hi)) {
      throw ConfigError(to_string(spec.technique) + ": inverted range [" + std::to_string(r.lo) + ", " +
                        std::to_string(r.hi) + "]");
    }
  }
}

/// Uniform draw over spec.ranges, fully determined by (seed, draw_index).
inline std::vector<double> sample_params(const AugmentationSpec& spec, std::uint64_t draw_index) {
  validate_spec(spec);
  Rng rng(derive_seed(spec.seed, draw_index));
  std::vector<double> out;
  out.reserve(spec.ranges.size());
  for (const auto& r : spec.ranges) out.push_back(rng.uniform(r.lo, r.hi));
  return out;
}

/// Original samples followed by one augmented copy of each (n -> 2n). Copy i
/// uses sample_params(spec, i), so the result does not depend on processing order.
inline Dataset augment_dataset(const Dataset& dataset, const AugmentationSpec& spec) {
  if (dataset.empty()) throw ValidationError("augment_dataset: dataset is empty");
  validate_spec(spec);
  Dataset out = dataset;
  out.samples.reserve(2 * dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& src = dataset.samples[i];
    ImageSample copy = src;
    copy.pixels = std::make_shared<const Image>(apply_op(src.image(), spec.technique, sample_params(spec, i)));
    out.samples.push_back(std::move(copy));
  }
  return out;
}

}  // namespace augbench
