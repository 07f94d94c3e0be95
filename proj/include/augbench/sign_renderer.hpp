#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/image.hpp"
#include "augbench/rng.hpp"

namespace augbench {

// ---------------------------------------------------------------------------
// Template model. All coordinates are normalised to [0,1]^2 over the raster,
// x to the right and y downwards.
// ---------------------------------------------------------------------------

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Color {
  float r = 0.0f;
  float g = 0.0f;
  float b = 0.0f;
  bool operator==(const Color&) const = default;
};

struct LinePrimitive {
  Point a, b;
  double width = 0.05;
  Color color;
  bool operator==(const LinePrimitive&) const = default;
};

// Open stroke, or a filled polygon (even-odd rule) when filled is set.
struct PolylinePrimitive {
  std::vector<Point> points;
  double width = 0.05;
  Color color;
  bool filled = false;
  bool operator==(const PolylinePrimitive&) const = default;
};

// Angles in degrees, measured clockwise on screen from +x; drawn from start to end.
struct ArcPrimitive {
  Point center;
  double radius = 0.1;
  double start_deg = 0.0;
  double end_deg = 360.0;
  double width = 0.05;
  Color color;
  bool operator==(const ArcPrimitive&) const = default;
};

struct DiscPrimitive {
  Point center;
  double radius = 0.05;
  Color color;
  bool operator==(const DiscPrimitive&) const = default;
};

// Seven-segment digits laid out left to right inside the box (origin = top-left).
struct DigitGlyphPrimitive {
  std::string text;
  Point origin;
  double box_w = 0.4;
  double box_h = 0.4;
  double width = 0.06;
  Color color;
  bool operator==(const DigitGlyphPrimitive&) const = default;
};

struct ArrowPrimitive {
  Point tail, head;
  double width = 0.08;
  double head_size = 0.18;
  Color color;
  bool operator==(const ArrowPrimitive&) const = default;
};

using Primitive = std::variant<LinePrimitive, PolylinePrimitive, ArcPrimitive, DiscPrimitive,
                               DigitGlyphPrimitive, ArrowPrimitive>;

enum class SignShape { circle, triangle };

struct SignTemplate {
  SignShape shape = SignShape::circle;
  int class_index = 0;
  std::string name;
  Color border_color;
  Color face_color;
  std::vector<Primitive> pictogram;
  bool operator==(const SignTemplate&) const = default;
};

inline constexpr Color kBackground{0.5f, 0.5f, 0.5f};

// Sign geometry.
inline constexpr Point kCircleCenter{0.5, 0.5};
inline constexpr double kCircleOuterRadius = 0.46;
inline constexpr double kCircleFaceRadius = 0.38;
inline constexpr std::array<Point, 3> kTriangleVertices{{{0.5, 0.07}, {0.04, 0.867}, {0.96, 0.867}}};
inline constexpr double kTriangleBorder = 0.085;
inline constexpr int kSupersample = 4;

// ---------------------------------------------------------------------------
// Rasteriser
// ---------------------------------------------------------------------------

namespace detail {

struct Segment {
  Point a, b;
};

inline double segment_distance(Point p, const Segment& s) {
  const double vx = s.b.x - s.a.x, vy = s.b.y - s.a.y;
  const double wx = p.x - s.a.x, wy = p.y - s.a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = wx - t * vx, dy = wy - t * vy;
  return std::sqrt(dx * dx + dy * dy);
}

inline bool in_polygon(Point p, const std::vector<Point>& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

// Seven-segment masks, bit order a b c d e f g.
inline constexpr std::array<std::uint8_t, 10> kSevenSegment{
    0b1111110, 0b0110000, 0b1101101, 0b1111001, 0b0110011,
    0b1011011, 0b1011111, 0b1110000, 0b1111111, 0b1111011};

inline std::vector<Segment> digit_segments(const DigitGlyphPrimitive& g) {
  std::vector<Segment> out;
  const auto n = static_cast<double>(g.text.size());
  if (n == 0) return out;
  const double cell = g.box_w / n;
  const double margin_x = 0.18 * cell;
  const double margin_y = 0.5 * g.width;
  for (std::size_t i = 0; i < g.text.size(); ++i) {
    const char ch = g.text[i];
    if (ch < '0' || ch > '9') throw ValidationError(std::string("digit glyph: unsupported character '") + ch + "'");
    const double x0 = g.origin.x + cell * static_cast<double>(i) + margin_x;
    const double x1 = g.origin.x + cell * static_cast<double>(i + 1) - margin_x;
    const double y0 = g.origin.y + margin_y;
    const double y1 = g.origin.y + g.box_h - margin_y;
    const double ym = 0.5 * (y0 + y1);
    const std::array<Segment, 7> seg{{{{x0, y0}, {x1, y0}},
                                      {{x1, y0}, {x1, ym}},
                                      {{x1, ym}, {x1, y1}},
                                      {{x0, y1}, {x1, y1}},
                                      {{x0, ym}, {x0, y1}},
                                      {{x0, y0}, {x0, ym}},
                                      {{x0, ym}, {x1, ym}}}};
    const auto mask = kSevenSegment[static_cast<std::size_t>(ch - '0')];
    for (int k = 0; k < 7; ++k) {
      if (mask & (1 << (6 - k))) out.push_back(seg[k]);
    }
  }
  return out;
}

// A primitive lowered to something cheap to hit-test.
struct CompiledShape {
  enum Kind { strokes, polygon, disc, arc } kind = strokes;
  std::vector<Segment> segments;
  std::vector<Point> polygon_points;
  Point center;
  double radius = 0.0;
  double half_width = 0.0;
  double start_deg = 0.0;
  double sweep_deg = 360.0;
  Color color;

  bool covers(Point p) const {
    switch (kind) {
      case strokes:
        for (const auto& s : segments) {
          if (segment_distance(p, s) <= half_width) return true;
        }
        return false;
      case polygon:
        return in_polygon(p, polygon_points);
      case disc: {
        const double dx = p.x - center.x, dy = p.y - center.y;
        return dx * dx + dy * dy <= radius * radius;
      }
      case arc: {
        const double dx = p.x - center.x, dy = p.y - center.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (std::abs(r - radius) > half_width) return false;
        if (sweep_deg >= 360.0) return true;
        double ang = std::atan2(dy, dx) * 180.0 / std::numbers::pi - start_deg;
        ang = std::fmod(ang, 360.0);
        if (ang < 0) ang += 360.0;
        return ang <= sweep_deg;
      }
    }
    return false;
  }
};

inline bool in_unit(Point p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; }

inline void require_unit(Point p, const char* what) {
  if (!in_unit(p)) {
    throw ValidationError(std::string(what) + " coordinate (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + ") outside [0,1]^2");
  }
}

inline std::vector<CompiledShape> compile(const Primitive& prim) {
  std::vector<CompiledShape> out;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        CompiledShape s;
        s.color = p.color;
        if constexpr (std::is_same_v<P, LinePrimitive>) {
          require_unit(p.a, "line");
          require_unit(p.b, "line");
          s.kind = CompiledShape::strokes;
          s.segments = {{p.a, p.b}};
          s.half_width = 0.5 * p.width;
          out.push_back(s);
        } else if constexpr (std::is_same_v<P, PolylinePrimitive>) {
          if (p.points.size() < 2) throw ValidationError("polyline needs at least two points");
          for (const auto& q : p.points) require_unit(q, "polyline");
          if (p.filled) {
            s.kind = CompiledShape::polygon;
            s.polygon_points = p.points;
          } else {
            s.kind = CompiledShape::strokes;
            for (std::size_t i = 1; i < p.points.size(); ++i) s.segments.push_back({p.points[i - 1], p.points[i]});
            s.half_width = 0.5 * p.width;
          }
          out.push_back(s);
        } else if constexpr (std::is_same_v<P, ArcPrimitive>) {
          require_unit(p.center, "arc");
          s.kind = CompiledShape::arc;
          s.center = p.center;
          s.radius = p.radius;
          s.half_width = 0.5 * p.width;
          s.start_deg = p.start_deg;
          s.sweep_deg = p.end_deg - p.start_deg;
          if (s.sweep_deg < 0) s.sweep_deg += 360.0;
          out.push_back(s);
        } else if constexpr (std::is_same_v<P, DiscPrimitive>) {
          require_unit(p.center, "disc");
          s.kind = CompiledShape::disc;
          s.center = p.center;
          s.radius = p.radius;
          out.push_back(s);
        } else if constexpr (std::is_same_v<P, DigitGlyphPrimitive>) {
          require_unit(p.origin, "digit glyph");
          require_unit({p.origin.x + p.box_w, p.origin.y + p.box_h}, "digit glyph");
          s.kind = CompiledShape::strokes;
          s.segments = digit_segments(p);
          s.half_width = 0.5 * p.width;
          out.push_back(s);
        } else if constexpr (std::is_same_v<P, ArrowPrimitive>) {
          require_unit(p.tail, "arrow");
          require_unit(p.head, "arrow");
          const double dx = p.head.x - p.tail.x, dy = p.head.y - p.tail.y;
          const double len = std::sqrt(dx * dx + dy * dy);
          if (len <= 0.0) throw ValidationError("arrow has zero length");
          const double ux = dx / len, uy = dy / len;
          const double hs = std::min(p.head_size, len);
          const Point base{p.head.x - ux * hs, p.head.y - uy * hs};
          s.kind = CompiledShape::strokes;
          s.segments = {{p.tail, base}};
          s.half_width = 0.5 * p.width;
          out.push_back(s);
          CompiledShape head;
          head.kind = CompiledShape::polygon;
          head.color = p.color;
          const double hw = 0.6 * hs;
          head.polygon_points = {p.head, {base.x - uy * hw, base.y + ux * hw}, {base.x + uy * hw, base.y - ux * hw}};
          out.push_back(head);
        }
      },
      prim);
  return out;
}

// Signed distance of p from the triangle edges, positive inside.
inline double triangle_inset(Point p) {
  double best = 1e9;
  for (std::size_t i = 0; i < 3; ++i) {
    const Point& a = kTriangleVertices[i];
    const Point& b = kTriangleVertices[(i + 1) % 3];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len = std::sqrt(ex * ex + ey * ey);
    // Vertices are listed counter-clockwise on screen (y down), so the
    // interior lies where the cross product is negative.
    const double d = -(ex * (p.y - a.y) - ey * (p.x - a.x)) / len;
    best = std::min(best, d);
  }
  return best;
}

enum class Region { background, border, face };

inline Region classify(SignShape shape, Point p) {
  if (shape == SignShape::circle) {
    const double dx = p.x - kCircleCenter.x, dy = p.y - kCircleCenter.y;
    const double r2 = dx * dx + dy * dy;
    if (r2 > kCircleOuterRadius * kCircleOuterRadius) return Region::background;
    return r2 > kCircleFaceRadius * kCircleFaceRadius ? Region::border : Region::face;
  }
  const double d = triangle_inset(p);
  if (d < 0.0) return Region::background;
  return d < kTriangleBorder ? Region::border : Region::face;
}

struct Rendered {
  Image color;
  std::vector<float> coverage;  // silhouette coverage per pixel, row-major
};

inline Rendered rasterize(const SignTemplate& t, int size) {
  if (size < 16) throw ValidationError("render size must be >= 16, got " + std::to_string(size));
  std::vector<CompiledShape> shapes;
  for (const auto& prim : t.pictogram) {
    auto c = compile(prim);
    shapes.insert(shapes.end(), c.begin(), c.end());
  }
  Rendered out{Image(size, size), std::vector<float>(static_cast<std::size_t>(size) * size, 0.0f)};
  constexpr int kSamples = kSupersample * kSupersample;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc[3] = {0, 0, 0};
      int inside = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          const Point p{(x + (sx + 0.5) / kSupersample) / size, (y + (sy + 0.5) / kSupersample) / size};
          Color c = kBackground;
          switch (classify(t.shape, p)) {
            case Region::background: break;
            case Region::border: c = t.border_color; ++inside; break;
            case Region::face:
              c = t.face_color;
              ++inside;
              for (const auto& s : shapes) {
                if (s.covers(p)) c = s.color;
              }
              break;
          }
          acc[0] += c.r;
          acc[1] += c.g;
          acc[2] += c.b;
        }
      }
      for (int ch = 0; ch < 3; ++ch) {
        out.color.at(y, x, ch) = std::clamp(static_cast<float>(acc[ch] / kSamples), 0.0f, 1.0f);
      }
      out.coverage[static_cast<std::size_t>(y) * size + x] = static_cast<float>(inside) / kSamples;
    }
  }
  return out;
}

}  // namespace detail

/// Renders the symbolic sign on a flat neutral background with 4x4
/// supersampled anti-aliasing. Pictogram primitives are clipped to the face.
/// Pure function of (template, size).
inline Image render_symbolic(const SignTemplate& t, int size) { return detail::rasterize(t, size).color; }

/// Fraction of each pixel covered by the sign silhouette (border + face).
inline std::vector<float> silhouette_coverage(const SignTemplate& t, int size) {
  return detail::rasterize(t, size).coverage;
}

// ---------------------------------------------------------------------------
// Paired samples
// ---------------------------------------------------------------------------

/// Condition (symbolic render) and target (real image) for conditional GAN training.
struct PairedSample {
  std::shared_ptr<const Image> symbolic;
  std::shared_ptr<const Image> real;
  int class_index = 0;
};

inline PairedSample compose_pair(const ImageSample& real_sample, const SignTemplate& t) {
  if (real_sample.class_index != t.class_index) {
    throw ValidationError("class mismatch: sample is class " + std::to_string(real_sample.class_index) +
                          ", template is class " + std::to_string(t.class_index));
  }
  const Image& real = real_sample.image();
  if (real.height() != real.width()) throw ValidationError("compose_pair needs a square image");
  return {std::make_shared<const Image>(render_symbolic(t, real.height())), real_sample.pixels,
          real_sample.class_index};
}

// ---------------------------------------------------------------------------
// Synthetic "realistic" signs
// ---------------------------------------------------------------------------

/// Jitter budget for synthesize_realistic. These are desk-scale proxies for
/// photographic variation, not measured camera statistics.
struct SynthesisOptions {
  int size = kImageSize;
  double brightness = 0.2;   // +- additive
  double hue_degrees = 10.0; // +- rotation about the grey axis
  double warp_pixels = 3.0;  // max displacement of any pixel
  double noise_sigma = 0.02;
  bool clutter = true;
};

namespace detail {

inline std::array<float, 9> hue_rotation(double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(a), s = std::sin(a);
  const double k = (1.0 - c) / 3.0;
  const double q = std::sqrt(1.0 / 3.0) * s;
  const float d = static_cast<float>(c + k), u = static_cast<float>(k - q), v = static_cast<float>(k + q);
  return {d, u, v, v, d, u, u, v, d};
}

inline Image make_clutter(int size, Rng& rng) {
  Image bg(size, size);
  double top[3], bottom[3];
  for (int c = 0; c < 3; ++c) {
    top[c] = rng.uniform(0.15, 0.85);
    bottom[c] = std::clamp(top[c] + rng.uniform(-0.25, 0.25), 0.0, 1.0);
  }
  for (int y = 0; y < size; ++y) {
    const double t = static_cast<double>(y) / (size - 1);
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) bg.at(y, x, c) = static_cast<float>((1 - t) * top[c] + t * bottom[c]);
    }
  }
  const int blobs = 2 + static_cast<int>(rng.below(3));
  for (int b = 0; b < blobs; ++b) {
    const int x0 = static_cast<int>(rng.below(size)), y0 = static_cast<int>(rng.below(size));
    const int w = 4 + static_cast<int>(rng.below(size / 2)), h = 4 + static_cast<int>(rng.below(size / 2));
    float col[3];
    for (auto& c : col) c = static_cast<float>(rng.uniform(0.0, 1.0));
    const float alpha = static_cast<float>(rng.uniform(0.2, 0.6));
    for (int y = y0; y < std::min(size, y0 + h); ++y) {
      for (int x = x0; x < std::min(size, x0 + w); ++x) {
        for (int c = 0; c < 3; ++c) bg.at(y, x, c) = (1 - alpha) * bg.at(y, x, c) + alpha * col[c];
      }
    }
  }
  return bg;
}

}  // namespace detail

/// Renders the template and applies seeded photometric jitter, a small affine
/// warp, background clutter and Gaussian sensor noise. Deterministic in
/// (template, seed, options).
inline ImageSample synthesize_realistic(const SignTemplate& t, std::uint64_t seed,
                                        const SynthesisOptions& opt = {}) {
  Rng rng(seed);
  const int size = opt.size;
  const auto clean = detail::rasterize(t, size);
  const Image clutter = opt.clutter ? detail::make_clutter(size, rng) : Image(size, size, 0.5f);

  Image composite(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const float a = clean.coverage[static_cast<std::size_t>(y) * size + x];
      for (int c = 0; c < 3; ++c) {
        composite.at(y, x, c) = a * clean.color.at(y, x, c) + (1 - a) * clutter.at(y, x, c);
      }
    }
  }

  // Rotation + translation whose worst-case corner displacement stays within
  // warp_pixels: 40% of the budget for rotation, the rest for translation.
  const double half = 0.5 * (size - 1);
  const double corner = std::sqrt(2.0) * half;
  const double max_angle = 0.4 * opt.warp_pixels / corner;
  const double max_shift = 0.6 * opt.warp_pixels / std::sqrt(2.0);
  const double angle = rng.uniform(-max_angle, max_angle);
  const double tx = rng.uniform(-max_shift, max_shift);
  const double ty = rng.uniform(-max_shift, max_shift);
  const double ca = std::cos(angle), sa = std::sin(angle);

  const auto hue = detail::hue_rotation(rng.uniform(-opt.hue_degrees, opt.hue_degrees));
  const float brightness = static_cast<float>(rng.uniform(-opt.brightness, opt.brightness));

  Image out(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double px = x - half - tx, py = y - half - ty;
      const double sx = ca * px + sa * py + half;
      const double sy = -sa * px + ca * py + half;
      float rgb[3];
      for (int c = 0; c < 3; ++c) rgb[c] = sample_bilinear(composite, sy, sx, c);
      for (int c = 0; c < 3; ++c) {
        const float v = hue[3 * c] * rgb[0] + hue[3 * c + 1] * rgb[1] + hue[3 * c + 2] * rgb[2];
        out.at(y, x, c) = v + brightness + static_cast<float>(rng.normal(0.0, opt.noise_sigma));
      }
    }
  }
  out.clip();

  int x0 = size, y0 = size, x1 = -1, y1 = -1;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (clean.coverage[static_cast<std::size_t>(y) * size + x] >= 0.5f) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
  }
  ImageSample s = make_sample(std::move(out), t.class_index);
  if (x1 >= x0) {
    const int dx = static_cast<int>(std::lround(tx)), dy = static_cast<int>(std::lround(ty));
    const int bx = std::clamp(x0 + dx, 0, size - 1), by = std::clamp(y0 + dy, 0, size - 1);
    s.bbox = BoundingBox{bx, by, std::min(x1 + dx, size - 1) - bx + 1, std::min(y1 + dy, size - 1) - by + 1};
  }
  s.quality = rng.uniform(0.3, 1.0);
  return s;
}

// ---------------------------------------------------------------------------
// Template libraries
// ---------------------------------------------------------------------------

struct TemplateLibrary {
  std::string family;
  std::vector<SignTemplate> templates;  // templates[i].class_index == i

  std::size_t size() const { return templates.size(); }
  bool contains(int class_index) const {
    return class_index >= 0 && static_cast<std::size_t>(class_index) < templates.size();
  }
  const SignTemplate& at(int class_index) const {
    if (!contains(class_index)) {
      throw ValidationError("template library '" + family + "' has no template for class " +
                            std::to_string(class_index));
    }
    return templates[static_cast<std::size_t>(class_index)];
  }
};

// JSON (de)serialisation -------------------------------------------------------

inline nlohmann::json to_json(Point p) { return nlohmann::json{p.x, p.y}; }
// Shortest decimal that reads back to the same float, so shipped files stay readable.
inline double tidy(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", static_cast<double>(v));
  const double d = std::strtod(buf, nullptr);
  return static_cast<float>(d) == v ? d : static_cast<double>(v);
}

inline nlohmann::json to_json(Color c) { return nlohmann::json{tidy(c.r), tidy(c.g), tidy(c.b)}; }

inline Point point_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
inline Color color_from_json(const nlohmann::json& j) {
  return {j.at(0).get<float>(), j.at(1).get<float>(), j.at(2).get<float>()};
}

inline nlohmann::json to_json(const Primitive& prim) {
  nlohmann::json j;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        j["color"] = to_json(p.color);
        if constexpr (std::is_same_v<P, LinePrimitive>) {
          j["kind"] = "line";
          j["a"] = to_json(p.a);
          j["b"] = to_json(p.b);
          j["width"] = p.width;
        } else if constexpr (std::is_same_v<P, PolylinePrimitive>) {
          j["kind"] = "polyline";
          auto pts = nlohmann::json::array();
          for (const auto& q : p.points) pts.push_back(to_json(q));
          j["points"] = pts;
          j["width"] = p.width;
          j["filled"] = p.filled;
        } else if constexpr (std::is_same_v<P, ArcPrimitive>) {
          j["kind"] = "arc";
          j["center"] = to_json(p.center);
          j["radius"] = p.radius;
          j["start_deg"] = p.start_deg;
          j["end_deg"] = p.end_deg;
          j["width"] = p.width;
        } else if constexpr (std::is_same_v<P, DiscPrimitive>) {
          j["kind"] = "disc";
          j["center"] = to_json(p.center);
          j["radius"] = p.radius;
        } else if constexpr (std::is_same_v<P, DigitGlyphPrimitive>) {
          j["kind"] = "digits";
          j["text"] = p.text;
          j["origin"] = to_json(p.origin);
          j["box"] = nlohmann::json{p.box_w, p.box_h};
          j["width"] = p.width;
        } else if constexpr (std::is_same_v<P, ArrowPrimitive>) {
          j["kind"] = "arrow";
          j["tail"] = to_json(p.tail);
          j["head"] = to_json(p.head);
          j["width"] = p.width;
          j["head_size"] = p.head_size;
        }
      },
      prim);
  return j;
}

inline Primitive primitive_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const Color color = color_from_json(j.at("color"));
  if (kind == "line") {
    return LinePrimitive{point_from_json(j.at("a")), point_from_json(j.at("b")), j.at("width").get<double>(), color};
  }
  if (kind == "polyline") {
    PolylinePrimitive p;
    for (const auto& q : j.at("points")) p.points.push_back(point_from_json(q));
    p.width = j.at("width").get<double>();
    p.filled = j.value("filled", false);
    p.color = color;
    return p;
  }
  if (kind == "arc") {
    return ArcPrimitive{point_from_json(j.at("center")), j.at("radius").get<double>(), j.at("start_deg").get<double>(),
                        j.at("end_deg").get<double>(), j.at("width").get<double>(), color};
  }
  if (kind == "disc") return DiscPrimitive{point_from_json(j.at("center")), j.at("radius").get<double>(), color};
  if (kind == "digits") {
    return DigitGlyphPrimitive{j.at("text").get<std::string>(), point_from_json(j.at("origin")),
                               j.at("box").at(0).get<double>(), j.at("box").at(1).get<double>(),
                               j.at("width").get<double>(), color};
  }
  if (kind == "arrow") {
    return ArrowPrimitive{point_from_json(j.at("tail")), point_from_json(j.at("head")), j.at("width").get<double>(),
                          j.at("head_size").get<double>(), color};
  }
  throw ValidationError("unknown primitive kind '" + kind + "'");
}

inline nlohmann::json to_json(const SignTemplate& t) {
  nlohmann::json j;
  j["shape"] = t.shape == SignShape::circle ? "circle" : "triangle";
  j["class_index"] = t.class_index;
  j["name"] = t.name;
  j["border_color"] = to_json(t.border_color);
  j["face_color"] = to_json(t.face_color);
  auto prims = nlohmann::json::array();
  for (const auto& p : t.pictogram) prims.push_back(to_json(p));
  j["pictogram"] = prims;
  return j;
}

inline SignTemplate template_from_json(const nlohmann::json& j) {
  try {
    SignTemplate t;
    const auto shape = j.at("shape").get<std::string>();
    if (shape == "circle") {
      t.shape = SignShape::circle;
    } else if (shape == "triangle") {
      t.shape = SignShape::triangle;
    } else {
      throw ValidationError("unknown sign shape '" + shape + "'");
    }
    t.class_index = j.at("class_index").get<int>();
    t.name = j.value("name", std::string{});
    t.border_color = color_from_json(j.at("border_color"));
    t.face_color = color_from_json(j.at("face_color"));
    for (const auto& p : j.at("pictogram")) t.pictogram.push_back(primitive_from_json(p));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed sign template: ") + e.what());
  }
}

inline std::string template_filename(int class_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "class_%02d.json", class_index);
  return buf;
}

/// Writes one file per class into dir (class_00.json, class_01.json, ...).
inline void save_template_library(const TemplateLibrary& lib, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : lib.templates) {
    nlohmann::json j = to_json(t);
    j["family"] = lib.family;
    std::ofstream out(dir / template_filename(t.class_index));
    if (!out) throw IoError("cannot write template into '" + dir.string() + "'");
    out << j.dump(2) << '\n';
  }
}

/// Loads class_XX.json files from dir; classes must be contiguous from 0.
inline TemplateLibrary load_template_library(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("template directory '" + dir.string() + "' not found");
  TemplateLibrary lib;
  for (int k = 0;; ++k) {
    const auto path = dir / template_filename(k);
    if (!std::filesystem::exists(path)) break;
    std::ifstream in(path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("template '" + path.string() + "': " + e.what());
    }
    SignTemplate t = template_from_json(j);
    if (t.class_index != k) throw ValidationError("template '" + path.string() + "' declares the wrong class_index");
    if (lib.family.empty()) lib.family = j.value("family", dir.filename().string());
    lib.templates.push_back(std::move(t));
  }
  if (lib.templates.empty()) throw ValidationError("no templates found in '" + dir.string() + "'");
  return lib;
}

}  // namespace augbench
