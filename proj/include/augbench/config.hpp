#pragma once

// Experiment configuration: a versioned JSON document. Everything is
// validated and every referenced file is resolved before training starts.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "augbench/classic_augment.hpp"
#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/eval.hpp"
#include "augbench/pix2pix.hpp"
#include "augbench/sign_library.hpp"
#include "augbench/squeezenet.hpp"

namespace augbench {

inline constexpr int kConfigSchemaVersion = 1;

struct SyntheticDataConfig {
  ShapeFamily family = ShapeFamily::synthetic;
  int classes = 10;  // synthetic family only
  int train_per_class = 50;
  int test_per_class = 50;
  std::uint64_t seed = 7;
};

struct GanConfig {
  int generator_layers = 4;
  int discriminator_layers = 3;
  int generator_channels = 32;
  int discriminator_channels = 32;
  long subset_size = -1;  // -1: the whole training split
  GanHyperparams hyper;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::string name;             // run directory name; empty means a UTC timestamp
  std::string output_dir = "runs";
  std::optional<std::string> manifest;  // resolved relative to the config file
  SyntheticDataConfig synthetic;        // used when no manifest is given
  std::optional<std::string> templates; // template directory; builtin library when absent
  std::vector<std::string> techniques = {"none", "blur", "brightness", "contrast", "displacement",
                                         "occlusion", "rotation", "scaling", "pix2pix"};
  std::map<Technique, std::vector<Interval>> ranges;
  std::uint64_t augment_seed = 1;
  GanConfig gan;
  std::vector<GridPoint> grid = full_sweep_grid();
  bool sweep_baseline = true;
  std::vector<FireWidth> fire_modules = default_fire_widths();
  TrainHyperparams classifier;
  EmptyClassPolicy empty_classes = EmptyClassPolicy::exclude;
  int repeats = 5;
  std::vector<std::uint64_t> seeds;  // empty: 1..repeats
  std::filesystem::path base_dir = ".";  // directory of the config file, for relative paths
};

inline std::vector<std::uint64_t> effective_seeds(const ExperimentConfig& c) {
  return c.seeds.empty() ? default_seeds(c.repeats) : c.seeds;
}

inline std::filesystem::path resolve(const ExperimentConfig& c, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : c.base_dir / path;
}

/// Checks everything that can be checked without touching the datasets.
inline void validate(const ExperimentConfig& c) {
  if (c.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (!c.seeds.empty() && static_cast<int>(c.seeds.size()) != c.repeats) {
    throw ConfigError("seeds lists " + std::to_string(c.seeds.size()) + " values but repeats is " +
                      std::to_string(c.repeats));
  }
  std::set<std::uint64_t> distinct(c.seeds.begin(), c.seeds.end());
  if (distinct.size() != c.seeds.size()) throw ConfigError("seeds must be distinct");
  if (c.techniques.empty()) throw ConfigError("the technique list is empty");
  std::set<std::string> seen;
  for (const auto& t : c.techniques) {
    parse_technique_id(t);
    if (!seen.insert(t).second) throw ConfigError("technique '" + t + "' listed twice");
  }
  for (const auto& [t, r] : c.ranges) validate_spec({t, r, c.augment_seed});
  ClassifierConfig cc;
  cc.fire_module_widths = c.fire_modules;
  validate(cc);
  validate(c.classifier);
  validate(GeneratorConfig{c.gan.generator_layers, c.gan.generator_channels, kImageSize});
  validate(DiscriminatorConfig{c.gan.discriminator_layers, c.gan.discriminator_channels});
  validate(c.gan.hyper);
  if (c.gan.subset_size < -1) throw ConfigError("gan.subset_size must be >= 0, or -1 for the whole training split");
  if (c.grid.empty()) throw ConfigError("the GAN grid is empty");
  for (const auto& p : c.grid) {
    validate(DiscriminatorConfig{p.discriminator_layers, c.gan.discriminator_channels});
    validate(GeneratorConfig{p.generator_layers, c.gan.generator_channels, kImageSize});
  }
  if (!c.manifest && c.synthetic.family == ShapeFamily::synthetic) {
    builtin_library(ShapeFamily::synthetic, c.synthetic.classes);  // range check
  }
  if (c.synthetic.train_per_class < 1 || c.synthetic.test_per_class < 1) {
    throw ConfigError("synthetic train_per_class and test_per_class must be >= 1");
  }
  if (c.manifest) {
    const auto p = resolve(c, *c.manifest);
    if (!std::filesystem::exists(p)) throw IoError("dataset manifest not found: " + p.string());
  }
  if (c.templates) {
    const auto p = resolve(c, *c.templates);
    if (!std::filesystem::is_directory(p)) throw IoError("template directory not found: " + p.string());
  }
}

// JSON -----------------------------------------------------------------------------

inline std::string to_string(EmptyClassPolicy p) { return p == EmptyClassPolicy::exclude ? "exclude" : "zero"; }

inline EmptyClassPolicy parse_empty_class_policy(const std::string& s) {
  if (s == "exclude") return EmptyClassPolicy::exclude;
  if (s == "zero") return EmptyClassPolicy::count_as_zero;
  throw ConfigError("empty_classes must be 'exclude' or 'zero', got '" + s + "'");
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["name"] = c.name;
  j["output_dir"] = c.output_dir;
  nlohmann::json data;
  if (c.manifest) {
    data["manifest"] = *c.manifest;
  } else {
    data["synthetic"] = {{"family", to_string(c.synthetic.family)},
                         {"classes", c.synthetic.classes},
                         {"train_per_class", c.synthetic.train_per_class},
                         {"test_per_class", c.synthetic.test_per_class},
                         {"seed", c.synthetic.seed}};
  }
  j["dataset"] = data;
  j["templates"] = c.templates ? nlohmann::json(*c.templates) : nlohmann::json("builtin");
  j["techniques"] = c.techniques;
  nlohmann::json ranges = nlohmann::json::object();
  for (const auto& [t, r] : c.ranges) {
    auto arr = nlohmann::json::array();
    for (const auto& i : r) arr.push_back({i.lo, i.hi});
    ranges[to_string(t)] = arr;
  }
  j["augmentation"] = {{"seed", c.augment_seed}, {"ranges", ranges}};
  j["gan"] = {{"generator_layers", c.gan.generator_layers},
              {"discriminator_layers", c.gan.discriminator_layers},
              {"generator_channels", c.gan.generator_channels},
              {"discriminator_channels", c.gan.discriminator_channels},
              {"subset_size", c.gan.subset_size},
              {"epochs", c.gan.hyper.epochs},
              {"batch_size", c.gan.hyper.batch_size},
              {"learning_rate", c.gan.hyper.learning_rate},
              {"l1_weight", c.gan.hyper.l1_weight},
              {"betas", {c.gan.hyper.beta1, c.gan.hyper.beta2}},
              {"seed", c.gan.seed}};
  auto grid = nlohmann::json::array();
  for (const auto& p : c.grid) grid.push_back({p.discriminator_layers, p.generator_layers});
  j["sweep"] = {{"grid", grid}, {"include_baseline", c.sweep_baseline}};
  auto fire = nlohmann::json::array();
  for (const auto& f : c.fire_modules) fire.push_back({f.squeeze, f.expand});
  j["classifier"] = {{"epochs", c.classifier.epochs},
                     {"learning_rate", c.classifier.learning_rate},
                     {"batch_size", c.classifier.batch_size},
                     {"fire_modules", fire}};
  j["empty_classes"] = to_string(c.empty_classes);
  j["repeats"] = c.repeats;
  j["seeds"] = c.seeds;
  return j;
}

namespace detail {

inline const std::set<std::string>& known_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"schema_version", "name", "output_dir", "dataset", "templates", "techniques", "augmentation", "gan", "sweep",
            "classifier", "empty_classes", "repeats", "seeds"}},
      {"dataset", {"manifest", "synthetic"}},
      {"synthetic", {"family", "classes", "train_per_class", "test_per_class", "seed"}},
      {"augmentation", {"seed", "ranges"}},
      {"gan", {"generator_layers", "discriminator_layers", "generator_channels", "discriminator_channels", "subset_size",
               "epochs", "batch_size", "learning_rate", "l1_weight", "betas", "seed"}},
      {"sweep", {"grid", "include_baseline"}},
      {"classifier", {"epochs", "learning_rate", "batch_size", "fire_modules"}}};
  return keys.at(section);
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& section) {
  if (!obj.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  const auto& keys = known_keys(section);
  for (const auto& [k, v] : obj.items()) {
    if (!keys.contains(k)) {
      throw ConfigError("unknown config key '" + (section.empty() ? k : section + "." + k) + "'");
    }
  }
}

template <typename V>
void read(const nlohmann::json& obj, const char* key, V& out) {
  if (obj.contains(key)) out = obj.at(key).get<V>();
}

}  // namespace detail

/// Parses a config document; absent keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
  using detail::read;
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    detail::reject_unknown(j, "");
    const int version = j.value("schema_version", 0);
    if (version != kConfigSchemaVersion) {
      throw ConfigError("unsupported config schema_version " + std::to_string(version) + " (expected " +
                        std::to_string(kConfigSchemaVersion) + ")");
    }
    read(j, "name", c.name);
    read(j, "output_dir", c.output_dir);
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      detail::reject_unknown(d, "dataset");
      if (d.contains("manifest") && d.contains("synthetic")) {
        throw ConfigError("dataset: give either 'manifest' or 'synthetic', not both");
      }
      if (d.contains("manifest")) c.manifest = d.at("manifest").get<std::string>();
      if (d.contains("synthetic")) {
        const auto& s = d.at("synthetic");
        detail::reject_unknown(s, "synthetic");
        if (s.contains("family")) c.synthetic.family = parse_family(s.at("family").get<std::string>());
        read(s, "classes", c.synthetic.classes);
        read(s, "train_per_class", c.synthetic.train_per_class);
        read(s, "test_per_class", c.synthetic.test_per_class);
        read(s, "seed", c.synthetic.seed);
      }
    }
    if (j.contains("templates") && j.at("templates").get<std::string>() != "builtin") {
      c.templates = j.at("templates").get<std::string>();
    }
    read(j, "techniques", c.techniques);
    if (j.contains("augmentation")) {
      const auto& a = j.at("augmentation");
      detail::reject_unknown(a, "augmentation");
      read(a, "seed", c.augment_seed);
      if (a.contains("ranges")) {
        for (const auto& [name, arr] : a.at("ranges").items()) {
          const auto t = parse_technique(name);
          if (!t) throw ConfigError("augmentation.ranges: unknown technique '" + name + "'");
          std::vector<Interval> r;
          for (const auto& pair : arr) r.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
          c.ranges[*t] = r;
        }
      }
    }
    if (j.contains("gan")) {
      const auto& g = j.at("gan");
      detail::reject_unknown(g, "gan");
      read(g, "generator_layers", c.gan.generator_layers);
      read(g, "discriminator_layers", c.gan.discriminator_layers);
      read(g, "generator_channels", c.gan.generator_channels);
      read(g, "discriminator_channels", c.gan.discriminator_channels);
      read(g, "subset_size", c.gan.subset_size);
      read(g, "epochs", c.gan.hyper.epochs);
      read(g, "batch_size", c.gan.hyper.batch_size);
      read(g, "learning_rate", c.gan.hyper.learning_rate);
      read(g, "l1_weight", c.gan.hyper.l1_weight);
      if (g.contains("betas")) {
        c.gan.hyper.beta1 = g.at("betas").at(0).get<double>();
        c.gan.hyper.beta2 = g.at("betas").at(1).get<double>();
      }
      read(g, "seed", c.gan.seed);
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      detail::reject_unknown(s, "sweep");
      if (s.contains("grid")) {
        c.grid.clear();
        for (const auto& p : s.at("grid")) c.grid.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
      }
      read(s, "include_baseline", c.sweep_baseline);
    }
    if (j.contains("classifier")) {
      const auto& k = j.at("classifier");
      detail::reject_unknown(k, "classifier");
      read(k, "epochs", c.classifier.epochs);
      read(k, "learning_rate", c.classifier.learning_rate);
      read(k, "batch_size", c.classifier.batch_size);
      if (k.contains("fire_modules")) {
        c.fire_modules.clear();
        for (const auto& f : k.at("fire_modules")) c.fire_modules.push_back({f.at(0).get<int>(), f.at(1).get<int>()});
      }
    }
    if (j.contains("empty_classes")) c.empty_classes = parse_empty_class_policy(j.at("empty_classes").get<std::string>());
    read(j, "repeats", c.repeats);
    read(j, "seeds", c.seeds);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return config_from_json(j, dir);
}

// Materialisation ------------------------------------------------------------------

inline Dataset load_experiment_dataset(const ExperimentConfig& c) {
  if (c.manifest) {
    Dataset d = load_dataset(resolve(c, *c.manifest));
    validate_dataset(d);
    return d;
  }
  const auto& s = c.synthetic;
  const TemplateLibrary lib = builtin_library(s.family, s.classes);
  return make_synthetic_dataset(lib, s.family, s.train_per_class, s.test_per_class, s.seed);
}

inline TemplateLibrary load_experiment_templates(const ExperimentConfig& c, const Dataset& d) {
  TemplateLibrary lib = c.templates ? load_template_library(resolve(c, *c.templates))
                                    : builtin_library(d.family, d.num_classes);
  if (static_cast<int>(lib.size()) != d.num_classes) {
    throw ValidationError("template library has " + std::to_string(lib.size()) + " classes, dataset has " +
                          std::to_string(d.num_classes));
  }
  return lib;
}

inline ExperimentSetup make_setup(const ExperimentConfig& c, Dataset data, TemplateLibrary templates) {
  ExperimentSetup s;
  s.classifier.num_classes = data.num_classes;
  s.classifier.fire_module_widths = c.fire_modules;
  s.train = c.classifier;
  s.ranges = c.ranges;
  s.augment_seed = c.augment_seed;
  s.empty_classes = c.empty_classes;
  s.base = std::move(data);
  s.templates = std::move(templates);
  return s;
}

inline long effective_subset_size(const GanConfig& g, const Dataset& train) {
  if (g.subset_size < 0) return static_cast<long>(train.size());
  return g.subset_size;
}

}  // namespace augbench
