#pragma once

// Built-in symbolic templates. Pictograms are simplified vector drawings:
// consistent per class, not faithful reproductions of real sign artwork.

#include <string>
#include <vector>

#include "augbench/dataset_io.hpp"
#include "augbench/sign_renderer.hpp"

namespace augbench {

namespace palette {
inline constexpr Color red{0.80f, 0.08f, 0.10f};
inline constexpr Color blue{0.08f, 0.30f, 0.72f};
inline constexpr Color dark_blue{0.04f, 0.18f, 0.50f};
inline constexpr Color white{0.97f, 0.97f, 0.97f};
inline constexpr Color black{0.06f, 0.06f, 0.06f};
inline constexpr Color grey{0.45f, 0.45f, 0.45f};
inline constexpr Color light_grey{0.80f, 0.80f, 0.80f};
inline constexpr Color yellow{0.95f, 0.78f, 0.10f};
inline constexpr Color green{0.10f, 0.65f, 0.25f};
}  // namespace palette

namespace detail {

inline SignTemplate sign(SignShape shape, const std::string& name, Color border, Color face,
                         std::vector<Primitive> prims) {
  SignTemplate t;
  t.shape = shape;
  t.name = name;
  t.border_color = border;
  t.face_color = face;
  t.pictogram = std::move(prims);
  return t;
}

inline SignTemplate prohibitory(const std::string& name, std::vector<Primitive> prims) {
  return sign(SignShape::circle, name, palette::red, palette::white, std::move(prims));
}

inline SignTemplate mandatory(const std::string& name, std::vector<Primitive> prims) {
  return sign(SignShape::circle, name, palette::dark_blue, palette::blue, std::move(prims));
}

inline SignTemplate derestriction(const std::string& name, std::vector<Primitive> prims) {
  return sign(SignShape::circle, name, palette::light_grey, palette::white, std::move(prims));
}

inline SignTemplate warning(const std::string& name, std::vector<Primitive> prims) {
  return sign(SignShape::triangle, name, palette::red, palette::white, std::move(prims));
}

inline DigitGlyphPrimitive digits(const std::string& text, Color color) {
  const double w = text.size() >= 3 ? 0.54 : 0.42;
  return DigitGlyphPrimitive{text, {0.5 - w / 2, 0.31}, w, 0.38, 0.065, color};
}

inline PolylinePrimitive rect(double x0, double y0, double x1, double y1, Color color) {
  return PolylinePrimitive{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, 0.0, color, true};
}

// Diagonal "end of restriction" stripes.
inline std::vector<Primitive> stripes(int count, Color color) {
  std::vector<Primitive> out;
  for (int i = 0; i < count; ++i) {
    const double o = 0.045 * (i - (count - 1) / 2.0);
    out.push_back(LinePrimitive{{0.25 + o, 0.75 + o}, {0.75 + o, 0.25 + o}, 0.022, color});
  }
  return out;
}

inline std::vector<Primitive> append(std::vector<Primitive> a, const std::vector<Primitive>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline LinePrimitive slash(Color color) { return LinePrimitive{{0.26, 0.26}, {0.74, 0.74}, 0.07, color}; }

inline std::vector<Primitive> car_pair(Color left, Color right, bool truck_left) {
  return {rect(truck_left ? 0.22 : 0.26, truck_left ? 0.36 : 0.42, 0.46, 0.62, left), rect(0.54, 0.42, 0.74, 0.62, right)};
}

inline std::vector<Primitive> figure(double cx, double scale, Color c) {
  const double s = scale;
  return {DiscPrimitive{{cx, 0.46 - 0.06 * s}, 0.045 * s, c},
          LinePrimitive{{cx, 0.50}, {cx, 0.50 + 0.14 * s}, 0.05 * s, c},
          LinePrimitive{{cx, 0.50 + 0.14 * s}, {cx - 0.06 * s, 0.50 + 0.28 * s}, 0.04 * s, c},
          LinePrimitive{{cx, 0.50 + 0.14 * s}, {cx + 0.06 * s, 0.50 + 0.28 * s}, 0.04 * s, c},
          LinePrimitive{{cx - 0.07 * s, 0.54}, {cx + 0.07 * s, 0.56}, 0.035 * s, c}};
}

inline std::vector<SignTemplate> number(std::vector<SignTemplate> v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i].class_index = static_cast<int>(i);
  return v;
}

}  // namespace detail

inline std::vector<SignTemplate> circular_templates() {
  using namespace detail;
  using namespace palette;
  const auto w = white;
  const auto k = black;
  return number({
      mandatory("direction straight", {ArrowPrimitive{{0.5, 0.78}, {0.5, 0.22}, 0.1, 0.2, w}}),
      mandatory("direction left", {ArrowPrimitive{{0.78, 0.5}, {0.22, 0.5}, 0.1, 0.2, w}}),
      mandatory("direction straight or right",
                {ArrowPrimitive{{0.44, 0.8}, {0.44, 0.2}, 0.08, 0.17, w},
                 ArrowPrimitive{{0.44, 0.6}, {0.78, 0.38}, 0.07, 0.15, w}}),
      mandatory("direction straight or left",
                {ArrowPrimitive{{0.56, 0.8}, {0.56, 0.2}, 0.08, 0.17, w},
                 ArrowPrimitive{{0.56, 0.6}, {0.22, 0.38}, 0.07, 0.15, w}}),
      mandatory("direction right", {ArrowPrimitive{{0.22, 0.5}, {0.78, 0.5}, 0.1, 0.2, w}}),
      derestriction("end no passing", append(car_pair(grey, grey, false), stripes(5, k))),
      derestriction("end no passing trucks", append(car_pair(grey, grey, true), stripes(5, k))),
      derestriction("end speed limit 30", append({digits("30", grey)}, stripes(5, k))),
      derestriction("end speed limit 70", append({digits("70", grey)}, stripes(5, k))),
      derestriction("end speed limit 80", append({digits("80", grey)}, stripes(5, k))),
      derestriction("end all restrictions", stripes(7, k)),
      sign(SignShape::circle, "no entry", red, red, {LinePrimitive{{0.22, 0.5}, {0.78, 0.5}, 0.16, w}}),
      prohibitory("no passing", car_pair(red, k, false)),
      prohibitory("no passing trucks", car_pair(red, k, true)),
      prohibitory("no u-turn",
                  {ArcPrimitive{{0.5, 0.45}, 0.13, 180.0, 360.0, 0.06, k},
                   LinePrimitive{{0.63, 0.45}, {0.63, 0.72}, 0.06, k},
                   ArrowPrimitive{{0.37, 0.45}, {0.37, 0.74}, 0.06, 0.13, k}, slash(red)}),
      prohibitory("no left turn",
                  {PolylinePrimitive{{{0.6, 0.78}, {0.6, 0.45}}, 0.07, k, false},
                   ArrowPrimitive{{0.63, 0.45}, {0.24, 0.45}, 0.07, 0.15, k}, slash(red)}),
      prohibitory("no right turn",
                  {PolylinePrimitive{{{0.4, 0.78}, {0.4, 0.45}}, 0.07, k, false},
                   ArrowPrimitive{{0.37, 0.45}, {0.76, 0.45}, 0.07, 0.15, k}, slash(red)}),
      sign(SignShape::circle, "no stopping", red, blue,
           {LinePrimitive{{0.24, 0.24}, {0.76, 0.76}, 0.09, red}, LinePrimitive{{0.76, 0.24}, {0.24, 0.76}, 0.09, red}}),
      sign(SignShape::circle, "no parking", red, blue, {LinePrimitive{{0.24, 0.24}, {0.76, 0.76}, 0.09, red}}),
      prohibitory("no vehicles", {}),
      prohibitory("no trucks", {rect(0.26, 0.38, 0.62, 0.6, k), rect(0.62, 0.46, 0.74, 0.6, k),
                                DiscPrimitive{{0.34, 0.62}, 0.045, k}, DiscPrimitive{{0.66, 0.62}, 0.045, k}}),
      mandatory("pass right", {ArrowPrimitive{{0.3, 0.3}, {0.7, 0.7}, 0.1, 0.2, w}}),
      mandatory("pass left", {ArrowPrimitive{{0.7, 0.3}, {0.3, 0.7}, 0.1, 0.2, w}}),
      mandatory("turn left ahead",
                {PolylinePrimitive{{{0.62, 0.8}, {0.62, 0.45}}, 0.1, w, false},
                 ArrowPrimitive{{0.67, 0.45}, {0.22, 0.45}, 0.1, 0.19, w}}),
      mandatory("turn right ahead",
                {PolylinePrimitive{{{0.38, 0.8}, {0.38, 0.45}}, 0.1, w, false},
                 ArrowPrimitive{{0.33, 0.45}, {0.78, 0.45}, 0.1, 0.19, w}}),
      prohibitory("speed limit 20", {digits("20", k)}),
      prohibitory("speed limit 30", {digits("30", k)}),
      prohibitory("speed limit 40", {digits("40", k)}),
      prohibitory("speed limit 50", {digits("50", k)}),
      prohibitory("speed limit 60", {digits("60", k)}),
      prohibitory("speed limit 70", {digits("70", k)}),
      prohibitory("speed limit 80", {digits("80", k)}),
      prohibitory("speed limit 100", {digits("100", k)}),
      prohibitory("speed limit 120", {digits("120", k)}),
      mandatory("minimum speed 30", {digits("30", w)}),
      mandatory("end minimum speed 30", {digits("30", w), slash(red)}),
  });
}

inline std::vector<SignTemplate> triangular_templates() {
  using namespace detail;
  using namespace palette;
  const auto k = black;
  return number({
      warning("bicycle lane",
              {ArcPrimitive{{0.38, 0.66}, 0.07, 0.0, 360.0, 0.025, k},
               ArcPrimitive{{0.62, 0.66}, 0.07, 0.0, 360.0, 0.025, k},
               PolylinePrimitive{{{0.38, 0.66}, {0.47, 0.54}, {0.62, 0.66}}, 0.03, k, false},
               LinePrimitive{{0.47, 0.54}, {0.56, 0.54}, 0.03, k}, LinePrimitive{{0.56, 0.54}, {0.62, 0.66}, 0.03, k}}),
      warning("children", append(figure(0.43, 1.0, k), figure(0.58, 0.8, k))),
      warning("pedestrians", append(figure(0.5, 1.1, k), {LinePrimitive{{0.32, 0.8}, {0.68, 0.8}, 0.02, k}})),
      warning("general danger", {LinePrimitive{{0.5, 0.4}, {0.5, 0.64}, 0.07, k}, DiscPrimitive{{0.5, 0.73}, 0.04, k}}),
      warning("curve left", {PolylinePrimitive{{{0.56, 0.78}, {0.56, 0.6}, {0.48, 0.5}}, 0.06, k, false},
                             ArrowPrimitive{{0.5, 0.52}, {0.4, 0.42}, 0.06, 0.1, k}}),
      warning("curve right", {PolylinePrimitive{{{0.44, 0.78}, {0.44, 0.6}, {0.52, 0.5}}, 0.06, k, false},
                              ArrowPrimitive{{0.5, 0.52}, {0.6, 0.42}, 0.06, 0.1, k}}),
      warning("double curve",
              {PolylinePrimitive{{{0.46, 0.8}, {0.46, 0.7}, {0.56, 0.62}, {0.56, 0.52}, {0.46, 0.46}}, 0.05, k, false},
               ArrowPrimitive{{0.47, 0.47}, {0.45, 0.38}, 0.05, 0.08, k}}),
      warning("road narrows", {PolylinePrimitive{{{0.4, 0.8}, {0.4, 0.62}, {0.46, 0.52}, {0.46, 0.4}}, 0.04, k, false},
                               PolylinePrimitive{{{0.6, 0.8}, {0.6, 0.62}, {0.54, 0.52}, {0.54, 0.4}}, 0.04, k, false}}),
      warning("lane merge", {LinePrimitive{{0.55, 0.8}, {0.55, 0.4}, 0.06, k},
                             LinePrimitive{{0.38, 0.8}, {0.53, 0.56}, 0.05, k}}),
      warning("slippery road", {rect(0.38, 0.44, 0.62, 0.56, k),
                                PolylinePrimitive{{{0.36, 0.76}, {0.42, 0.66}, {0.48, 0.76}, {0.54, 0.66}, {0.6, 0.76}, {0.66, 0.66}},
                                                  0.03, k, false}}),
      warning("road works", append(figure(0.46, 0.9, k),
                                   {PolylinePrimitive{{{0.56, 0.78}, {0.64, 0.64}, {0.7, 0.78}}, 0.0, k, true}})),
      warning("traffic jam", {rect(0.4, 0.38, 0.6, 0.46, k), rect(0.4, 0.52, 0.6, 0.6, k), rect(0.4, 0.66, 0.6, 0.74, k)}),
      warning("traffic signals", {rect(0.43, 0.36, 0.57, 0.8, k), DiscPrimitive{{0.5, 0.44}, 0.045, red},
                                  DiscPrimitive{{0.5, 0.58}, 0.045, yellow}, DiscPrimitive{{0.5, 0.72}, 0.045, green}}),
      warning("uneven road",
              {PolylinePrimitive{{{0.3, 0.76}, {0.38, 0.76}, {0.44, 0.64}, {0.5, 0.76}, {0.56, 0.64}, {0.62, 0.76}, {0.7, 0.76}},
                                 0.045, k, false}}),
      warning("two-way traffic", {ArrowPrimitive{{0.42, 0.8}, {0.42, 0.4}, 0.05, 0.1, k},
                                  ArrowPrimitive{{0.58, 0.4}, {0.58, 0.8}, 0.05, 0.1, k}}),
      warning("crossroads", {LinePrimitive{{0.5, 0.36}, {0.5, 0.82}, 0.07, k}, LinePrimitive{{0.32, 0.62}, {0.68, 0.62}, 0.07, k}}),
  });
}

/// Probe signs that no built-in family contains (for generalisation checks).
inline std::vector<SignTemplate> novel_sign_templates() {
  using namespace detail;
  using namespace palette;
  return number({
      derestriction("end speed limit 40", append({digits("40", grey)}, stripes(5, black))),
      mandatory("roundabout", {ArcPrimitive{{0.5, 0.5}, 0.17, 200.0, 300.0, 0.07, white},
                               ArcPrimitive{{0.5, 0.5}, 0.17, 320.0, 60.0, 0.07, white},
                               ArcPrimitive{{0.5, 0.5}, 0.17, 80.0, 180.0, 0.07, white},
                               DiscPrimitive{{0.62, 0.29}, 0.05, white}, DiscPrimitive{{0.71, 0.65}, 0.05, white},
                               DiscPrimitive{{0.33, 0.64}, 0.05, white}}),
      prohibitory("customs station", {LinePrimitive{{0.26, 0.5}, {0.74, 0.5}, 0.08, red},
                                      rect(0.3, 0.32, 0.7, 0.42, black), rect(0.3, 0.58, 0.7, 0.68, black)}),
  });
}

/// Builtin library for a family. The synthetic family interleaves circular
/// and triangular templates (even classes circular, odd classes triangular)
/// and keeps the first `synthetic_classes` of them.
inline TemplateLibrary builtin_library(ShapeFamily family, int synthetic_classes = 10) {
  TemplateLibrary lib;
  lib.family = to_string(family);
  switch (family) {
    case ShapeFamily::circular: lib.templates = circular_templates(); break;
    case ShapeFamily::triangular: lib.templates = triangular_templates(); break;
    case ShapeFamily::synthetic: {
      const auto circ = circular_templates();
      const auto tri = triangular_templates();
      const int max_classes = 2 * static_cast<int>(tri.size());
      if (synthetic_classes < 2 || synthetic_classes > max_classes) {
        throw ConfigError("synthetic family supports 2.." + std::to_string(max_classes) + " classes");
      }
      for (int i = 0; i < synthetic_classes; ++i) {
        SignTemplate t = (i % 2 == 0) ? circ[static_cast<std::size_t>(i / 2)] : tri[static_cast<std::size_t>(i / 2)];
        t.class_index = i;
        lib.templates.push_back(std::move(t));
      }
      break;
    }
  }
  return lib;
}

inline TemplateLibrary novel_library() {
  return TemplateLibrary{"novel", novel_sign_templates()};
}

/// Builds a labelled synthetic dataset: per class, train_per_class training
/// and test_per_class test samples, classes interleaved. Every sample seed is
/// derived from (seed, running index).
inline Dataset make_synthetic_dataset(const TemplateLibrary& lib, ShapeFamily family, int train_per_class,
                                      int test_per_class, std::uint64_t seed, const SynthesisOptions& opt = {}) {
  if (train_per_class < 0 || test_per_class < 0) throw ConfigError("per-class counts must be >= 0");
  Dataset d;
  d.family = family;
  d.num_classes = static_cast<int>(lib.size());
  std::uint64_t index = 0;
  for (const auto [split, count] : {std::pair{Split::train, train_per_class}, std::pair{Split::test, test_per_class}}) {
    for (int i = 0; i < count; ++i) {
      for (const auto& t : lib.templates) {
        ImageSample s = synthesize_realistic(t, derive_seed(seed, index++), opt);
        s.split = split;
        d.samples.push_back(std::move(s));
      }
    }
  }
  return d;
}

}  // namespace augbench
