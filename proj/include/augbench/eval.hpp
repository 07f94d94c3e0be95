#pragma once

// Evaluation harness: confusion matrices and metrics, repeated training runs
// per augmentation technique, the GAN architecture sweep, and report output
// (text tables, heatmaps, machine-readable results).

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "augbench/classic_augment.hpp"
#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/pix2pix.hpp"
#include "augbench/png_io.hpp"
#include "augbench/squeezenet.hpp"

namespace augbench {

// Metrics ------------------------------------------------------------------------

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int k) : k_(k), counts_(static_cast<std::size_t>(k) * k, 0) {
    if (k < 1) throw ValidationError("confusion matrix needs at least one class");
  }

  int classes() const { return k_; }
  long& at(int truth, int predicted) { return counts_[static_cast<std::size_t>(truth) * k_ + predicted]; }
  long at(int truth, int predicted) const { return counts_[static_cast<std::size_t>(truth) * k_ + predicted]; }

  long row_sum(int truth) const {
    long s = 0;
    for (int j = 0; j < k_; ++j) s += at(truth, j);
    return s;
  }
  long total() const { return std::accumulate(counts_.begin(), counts_.end(), 0L); }
  long trace() const {
    long s = 0;
    for (int i = 0; i < k_; ++i) s += at(i, i);
    return s;
  }

  std::vector<std::vector<long>> rows() const {
    std::vector<std::vector<long>> out(k_, std::vector<long>(k_));
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) out[i][j] = at(i, j);
    }
    return out;
  }

  static ConfusionMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    ConfusionMatrix cm(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw ValidationError("confusion matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[i][j] < 0) throw ValidationError("confusion matrix counts must be non-negative");
        cm.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
      }
    }
    return cm;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int k_ = 0;
  std::vector<long> counts_;
};

inline ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted, int k) {
  if (truth.size() != predicted.size()) {
    throw ValidationError("confusion_matrix: " + std::to_string(truth.size()) + " true labels vs " +
                          std::to_string(predicted.size()) + " predictions");
  }
  ConfusionMatrix cm(k);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t] < 0 || truth[t] >= k || predicted[t] < 0 || predicted[t] >= k) {
      throw ValidationError("confusion_matrix: label out of range [0, " + std::to_string(k) + ") at position " +
                            std::to_string(t));
    }
    ++cm.at(truth[t], predicted[t]);
  }
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total == 0) throw ValidationError("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

/// How classes without test samples enter the macro average.
enum class EmptyClassPolicy { exclude, count_as_zero };

/// Macro-averaged recall.
inline double balanced_accuracy(const ConfusionMatrix& cm, EmptyClassPolicy policy = EmptyClassPolicy::exclude) {
  double sum = 0.0;
  int populated = 0;
  for (int i = 0; i < cm.classes(); ++i) {
    const long row = cm.row_sum(i);
    if (row == 0) continue;
    sum += static_cast<double>(cm.at(i, i)) / static_cast<double>(row);
    ++populated;
  }
  if (populated == 0) throw ValidationError("balanced_accuracy: every class row is empty");
  const int denom = policy == EmptyClassPolicy::exclude ? populated : cm.classes();
  return sum / denom;
}

struct RunStats {
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator; 0 for a single run
  double min = 0.0;
  double max = 0.0;
  int n_runs = 0;
};

inline RunStats run_stats(std::vector<double> values) {
  if (values.empty()) throw ValidationError("run_stats: no runs");
  std::sort(values.begin(), values.end());
  RunStats s;
  s.n_runs = static_cast<int>(values.size());
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  // Guard against rounding pushing the mean outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

// Techniques -----------------------------------------------------------------------

struct TechniqueId {
  enum class Kind { none, classic, pix2pix };
  Kind kind = Kind::none;
  Technique classic = Technique::contrast;

  std::string key() const {
    switch (kind) {
      case Kind::none: return "none";
      case Kind::pix2pix: return "pix2pix";
      case Kind::classic: return to_string(classic);
    }
    return "?";
  }

  /// Row label as printed in result tables.
  std::string label() const {
    if (kind == Kind::none) return "None";
    if (kind == Kind::pix2pix) return "pix2pix";
    std::string s = to_string(classic);
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
  }

  bool operator==(const TechniqueId&) const = default;
};

inline TechniqueId parse_technique_id(const std::string& s) {
  if (s == "none") return {TechniqueId::Kind::none, Technique::contrast};
  if (s == "pix2pix") return {TechniqueId::Kind::pix2pix, Technique::contrast};
  if (auto t = parse_technique(s)) return {TechniqueId::Kind::classic, *t};
  throw ConfigError("unknown augmentation technique '" + s +
                    "' (expected none, pix2pix, blur, brightness, contrast, displacement, occlusion, rotation or "
                    "scaling)");
}

/// Table row order: None, the classic techniques, pix2pix.
inline int table_rank(const TechniqueId& t) {
  if (t.kind == TechniqueId::Kind::none) return 0;
  if (t.kind == TechniqueId::Kind::pix2pix) return 100;
  return 1 + static_cast<int>(t.classic);
}

// Experiments ----------------------------------------------------------------------

using LogFn = std::function<void(const std::string&)>;

struct ExperimentSetup {
  Dataset base;  // train and test splits
  ClassifierConfig classifier;
  TrainHyperparams train;
  std::map<Technique, std::vector<Interval>> ranges;  // overrides of default_ranges
  std::uint64_t augment_seed = 1;
  std::shared_ptr<const GanModel> gan;  // required for pix2pix
  TemplateLibrary templates;            // condition templates for pix2pix
  EmptyClassPolicy empty_classes = EmptyClassPolicy::exclude;
};

struct RunRecord {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  ConfusionMatrix confusion;
};

/// Runs in ascending seed order, which makes aggregation order-independent.
inline void sort_runs(std::vector<RunRecord>& runs) {
  std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
}

inline RunStats accuracy_stats(const std::vector<RunRecord>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.accuracy);
  return run_stats(v);
}

inline RunStats balanced_stats(const std::vector<RunRecord>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.balanced_accuracy);
  return run_stats(v);
}

/// Run with the median accuracy (lower median for an even count; ties by seed).
inline const RunRecord& median_run(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw ValidationError("median_run: no runs");
  std::vector<const RunRecord*> order;
  for (const auto& r : runs) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->accuracy != b->accuracy ? a->accuracy < b->accuracy : a->seed < b->seed;
  });
  return *order[(order.size() - 1) / 2];
}

struct TechniqueResult {
  TechniqueId technique;
  std::size_t num_samples = 0;  // training samples after augmentation
  std::vector<RunRecord> runs;
};

inline Dataset train_split(const Dataset& d) { return d.split(Split::train); }

/// Training set for one technique: the base train split, or the base train
/// split followed by one augmented copy per sample.
inline Dataset build_training_set(const TechniqueId& technique, const ExperimentSetup& setup) {
  const Dataset train = train_split(setup.base);
  if (train.empty()) throw ValidationError("the base dataset has no training samples");
  switch (technique.kind) {
    case TechniqueId::Kind::none: return train;
    case TechniqueId::Kind::classic: {
      AugmentationSpec spec = default_spec(technique.classic, setup.augment_seed);
      if (auto it = setup.ranges.find(technique.classic); it != setup.ranges.end()) spec.ranges = it->second;
      return augment_dataset(train, spec);
    }
    case TechniqueId::Kind::pix2pix:
      if (!setup.gan) throw ConfigError("the pix2pix technique needs a trained GAN");
      return gan_augment_dataset(*setup.gan, train, setup.templates);
  }
  throw ConfigError("unhandled technique");
}

inline RunRecord evaluate_classifier(const ClassifierModel& model, const Dataset& test, std::uint64_t seed,
                                     EmptyClassPolicy policy) {
  if (test.empty()) throw ValidationError("the base dataset has no test samples");
  const auto cm = confusion_matrix(test.labels(), predict(model, test), model.config.num_classes);
  return {seed, accuracy(cm), balanced_accuracy(cm, policy), cm};
}

inline std::vector<RunRecord> train_and_evaluate(const Dataset& training, const ExperimentSetup& setup,
                                                 const std::vector<std::uint64_t>& seeds, const std::string& tag,
                                                 const LogFn& log) {
  if (seeds.empty()) throw ConfigError("at least one seed (repeat) is required");
  const Dataset test = setup.base.split(Split::test);
  std::vector<RunRecord> runs;
  for (auto seed : seeds) {
    const ClassifierModel model = train_classifier(training, setup.classifier, setup.train, seed);
    runs.push_back(evaluate_classifier(model, test, seed, setup.empty_classes));
    if (log) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s seed %llu: accuracy %.4f, balanced %.4f", tag.c_str(),
                    static_cast<unsigned long long>(seed), runs.back().accuracy, runs.back().balanced_accuracy);
      log(buf);
    }
  }
  sort_runs(runs);
  return runs;
}

/// Builds the augmented set once, then trains and evaluates once per seed on
/// the untouched test split.
inline TechniqueResult run_experiment(const TechniqueId& technique, const ExperimentSetup& setup,
                                      const std::vector<std::uint64_t>& seeds, const LogFn& log = {}) {
  if (seeds.empty()) throw ConfigError("at least one seed (repeat) is required");
  const Dataset training = build_training_set(technique, setup);
  TechniqueResult r;
  r.technique = technique;
  r.num_samples = training.size();
  r.runs = train_and_evaluate(training, setup, seeds, technique.label(), log);
  return r;
}

inline std::vector<std::uint64_t> default_seeds(int repeats) {
  std::vector<std::uint64_t> s;
  for (int i = 1; i <= repeats; ++i) s.push_back(static_cast<std::uint64_t>(i));
  return s;
}

// GAN sweep ------------------------------------------------------------------------

struct GridPoint {
  int discriminator_layers;
  int generator_layers;
  bool operator==(const GridPoint&) const = default;
};

inline std::vector<GridPoint> full_sweep_grid() {
  std::vector<GridPoint> g;
  for (int d : {3, 4}) {
    for (int n : {2, 4, 6, 8, 10}) g.push_back({d, n});
  }
  return g;
}

struct SweepSetup {
  ExperimentSetup experiment;
  long gan_subset_size = 0;  // highest-quality training samples used as GAN pairs
  GanHyperparams gan;
  int generator_base_channels = 32;
  int discriminator_base_channels = 32;
  std::uint64_t gan_seed = 1;
  bool include_baseline = true;
};

struct SweepCell {
  GridPoint point;
  std::size_t training_samples = 0;
  std::vector<RunRecord> runs;
};

struct SweepResult {
  std::optional<TechniqueResult> baseline;
  std::vector<SweepCell> cells;
};

/// Classifier training pool for a sweep cell: all base training samples plus
/// one generated sample per GAN-subset sample.
inline Dataset gan_training_pool(const Dataset& train, const Dataset& generated) {
  for (const auto& s : generated.samples) {
    if (s.split != Split::train) throw ValidationError("generated samples must belong to the training split");
  }
  Dataset pool = merge_datasets(train, generated);
  if (pool.size() != train.size() + generated.size()) throw ValidationError("training pool size mismatch");
  return pool;
}

inline SweepResult sweep_gan(const SweepSetup& setup, const std::vector<GridPoint>& grid,
                             const std::vector<std::uint64_t>& seeds, const LogFn& log = {}) {
  if (grid.empty()) throw ConfigError("the GAN grid is empty");
  if (seeds.empty()) throw ConfigError("at least one seed (repeat) is required");
  const auto& exp = setup.experiment;
  for (const auto& p : grid) {
    validate(DiscriminatorConfig{p.discriminator_layers, setup.discriminator_base_channels});
    validate(GeneratorConfig{p.generator_layers, setup.generator_base_channels, exp.classifier.input_size});
  }
  validate(setup.gan);
  const Dataset train = train_split(exp.base);
  const Dataset subset = select_gan_subset(train, setup.gan_subset_size);
  if (subset.empty()) throw ConfigError("the GAN subset is empty");
  const auto pairs = make_pairs(subset, exp.templates);

  SweepResult result;
  if (setup.include_baseline) result.baseline = run_experiment(TechniqueId{}, exp, seeds, log);
  for (const auto& p : grid) {
    const std::string tag = "n_d=" + std::to_string(p.discriminator_layers) + " n_g=" + std::to_string(p.generator_layers);
    if (log) log(tag + ": training GAN on " + std::to_string(pairs.size()) + " pairs");
    const GanModel gan = train_gan(
        pairs, GeneratorConfig{p.generator_layers, setup.generator_base_channels, exp.classifier.input_size},
        DiscriminatorConfig{p.discriminator_layers, setup.discriminator_base_channels}, setup.gan,
        derive_seed(setup.gan_seed, static_cast<std::uint64_t>(p.discriminator_layers * 100 + p.generator_layers)));
    const Dataset pool = gan_training_pool(train, generate_for_samples(gan, subset, exp.templates));
    SweepCell cell{p, pool.size(), train_and_evaluate(pool, exp, seeds, tag, log)};
    result.cells.push_back(std::move(cell));
  }
  return result;
}

// Reports --------------------------------------------------------------------------

/// Terminal columns occupied by a UTF-8 string (one per code point).
inline std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

inline std::string mean_pm_std(const RunStats& s) { return percent(s.mean) + " ± " + percent(s.std); }

/// Pipe table with columns padded to their widest cell.
inline std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = display_width(header[c]);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], display_width(r[c]));
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out += " " + cells[c] + std::string(width[c] - display_width(cells[c]), ' ') + " |";
    }
    return out + "\n";
  };
  std::string out = line(header);
  out += "|";
  for (auto w : width) out += std::string(w + 2, '-') + "|";
  out += "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

inline std::vector<std::string> experiment_columns() {
  return {"Augmentation", "# of Samples", "Accuracy μ ± σ (%)", "Min (%)", "Max (%)"};
}

inline std::string render_table(std::vector<TechniqueResult> results) {
  std::stable_sort(results.begin(), results.end(),
                   [](const auto& a, const auto& b) { return table_rank(a.technique) < table_rank(b.technique); });
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    const RunStats s = accuracy_stats(r.runs);
    rows.push_back({r.technique.label(), std::to_string(r.num_samples), mean_pm_std(s), percent(s.min), percent(s.max)});
  }
  return format_table(experiment_columns(), rows);
}

inline std::vector<std::string> sweep_columns() {
  return {"Discriminator",
          "Generator",
          "Training Samples",
          "Accuracy μ ± σ (%)",
          "Min (%)",
          "Max (%)",
          "Balanced Accuracy μ ± σ (%)",
          "Min (%)",
          "Max (%)"};
}

inline std::string render_sweep_table(const SweepResult& sweep) {
  std::vector<std::vector<std::string>> rows;
  auto row = [](std::string d, std::string g, std::size_t n, const std::vector<RunRecord>& runs) {
    const RunStats a = accuracy_stats(runs), b = balanced_stats(runs);
    return std::vector<std::string>{std::move(d),       std::move(g),     std::to_string(n),
                                    mean_pm_std(a),     percent(a.min),   percent(a.max),
                                    mean_pm_std(b),     percent(b.min),   percent(b.max)};
  };
  if (sweep.baseline) rows.push_back(row("No augmentation", "-", sweep.baseline->num_samples, sweep.baseline->runs));
  for (const auto& c : sweep.cells) {
    rows.push_back(row(std::to_string(c.point.discriminator_layers), std::to_string(c.point.generator_layers),
                       c.training_samples, c.runs));
  }
  return format_table(sweep_columns(), rows);
}

inline constexpr int kHeatmapCell = 12;

/// Row-normalised confusion matrix heatmap, white (0) to dark blue (1).
inline void write_heatmap(const ConfusionMatrix& cm, const std::filesystem::path& path, int cell = kHeatmapCell) {
  const int k = cm.classes();
  const int side = k * cell;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(side) * side * 3);
  constexpr float lo[3] = {1.0f, 1.0f, 1.0f};
  constexpr float hi[3] = {0.03f, 0.19f, 0.42f};
  for (int i = 0; i < k; ++i) {
    const long row = cm.row_sum(i);
    for (int j = 0; j < k; ++j) {
      const float v = row > 0 ? static_cast<float>(cm.at(i, j)) / static_cast<float>(row) : 0.0f;
      std::uint8_t px[3];
      for (int c = 0; c < 3; ++c) px[c] = to_byte(lo[c] + (hi[c] - lo[c]) * v);
      for (int y = i * cell; y < (i + 1) * cell; ++y) {
        for (int x = j * cell; x < (j + 1) * cell; ++x) {
          std::copy(px, px + 3, rgb.begin() + (static_cast<std::size_t>(y) * side + x) * 3);
        }
      }
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_png_rgb8(path, side, side, rgb);
}

// Results file ---------------------------------------------------------------------

inline constexpr const char* kResultsFormat = "augbench-results";
inline constexpr int kResultsVersion = 1;

struct ResultsFile {
  std::vector<TechniqueResult> experiments;
  std::optional<SweepResult> sweep;
};

inline nlohmann::json runs_to_json(const std::vector<RunRecord>& runs) {
  auto out = nlohmann::json::array();
  for (const auto& r : runs) {
    out.push_back({{"seed", r.seed},
                   {"accuracy", r.accuracy},
                   {"balanced_accuracy", r.balanced_accuracy},
                   {"confusion", r.confusion.rows()}});
  }
  return out;
}

inline std::vector<RunRecord> runs_from_json(const nlohmann::json& j) {
  std::vector<RunRecord> out;
  for (const auto& e : j) {
    out.push_back({e.at("seed").get<std::uint64_t>(), e.at("accuracy").get<double>(),
                   e.at("balanced_accuracy").get<double>(),
                   ConfusionMatrix::from_rows(e.at("confusion").get<std::vector<std::vector<long>>>())});
  }
  if (out.empty()) throw ValidationError("results entry has no runs");
  return out;
}

inline nlohmann::json stats_to_json(const RunStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"n_runs", s.n_runs}};
}

inline nlohmann::json to_json(const TechniqueResult& r) {
  return {{"technique", r.technique.key()},
          {"label", r.technique.label()},
          {"num_samples", r.num_samples},
          {"accuracy", stats_to_json(accuracy_stats(r.runs))},
          {"balanced_accuracy", stats_to_json(balanced_stats(r.runs))},
          {"median_run_seed", median_run(r.runs).seed},
          {"runs", runs_to_json(r.runs)}};
}

inline TechniqueResult technique_result_from_json(const nlohmann::json& j) {
  TechniqueResult r;
  r.technique = parse_technique_id(j.at("technique").get<std::string>());
  r.num_samples = j.at("num_samples").get<std::size_t>();
  r.runs = runs_from_json(j.at("runs"));
  return r;
}

inline nlohmann::json to_json(const SweepResult& s) {
  auto cells = nlohmann::json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"discriminator_layers", c.point.discriminator_layers},
                     {"generator_layers", c.point.generator_layers},
                     {"training_samples", c.training_samples},
                     {"accuracy", stats_to_json(accuracy_stats(c.runs))},
                     {"balanced_accuracy", stats_to_json(balanced_stats(c.runs))},
                     {"runs", runs_to_json(c.runs)}});
  }
  return {{"baseline", s.baseline ? to_json(*s.baseline) : nlohmann::json(nullptr)}, {"cells", cells}};
}

inline SweepResult sweep_from_json(const nlohmann::json& j) {
  SweepResult s;
  if (!j.at("baseline").is_null()) s.baseline = technique_result_from_json(j.at("baseline"));
  for (const auto& c : j.at("cells")) {
    s.cells.push_back({{c.at("discriminator_layers").get<int>(), c.at("generator_layers").get<int>()},
                       c.at("training_samples").get<std::size_t>(),
                       runs_from_json(c.at("runs"))});
  }
  return s;
}

inline nlohmann::json to_json(const ResultsFile& f) {
  nlohmann::json j;
  j["format"] = kResultsFormat;
  j["version"] = kResultsVersion;
  auto rows = nlohmann::json::array();
  for (const auto& r : f.experiments) rows.push_back(to_json(r));
  j["experiments"] = rows;
  j["sweep"] = f.sweep ? to_json(*f.sweep) : nlohmann::json(nullptr);
  return j;
}

inline ResultsFile results_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != kResultsFormat) throw ValidationError("not an augbench results file");
  if (j.value("version", 0) != kResultsVersion) {
    throw ValidationError("unsupported results version " + std::to_string(j.value("version", 0)));
  }
  try {
    ResultsFile f;
    for (const auto& r : j.at("experiments")) f.experiments.push_back(technique_result_from_json(r));
    if (!j.at("sweep").is_null()) f.sweep = sweep_from_json(j.at("sweep"));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed results file: " + std::string(e.what()));
  }
}

inline void save_results(const ResultsFile& f, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << to_json(f).dump(2) << "\n";
}

inline ResultsFile load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("results file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return results_from_json(j);
}

/// Writes table.txt (experiments), sweep.txt (if any) and one heatmap per
/// technique from its median-accuracy run. Returns the files written.
inline std::vector<std::filesystem::path> write_report(const ResultsFile& f, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write_text = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << text;
    written.push_back(p);
  };
  if (!f.experiments.empty()) {
    write_text(dir / "table.txt", render_table(f.experiments));
    for (const auto& r : f.experiments) {
      const auto p = dir / ("confusion_" + r.technique.key() + ".png");
      write_heatmap(median_run(r.runs).confusion, p);
      written.push_back(p);
    }
  }
  if (f.sweep) {
    write_text(dir / "sweep.txt", render_sweep_table(*f.sweep));
    for (const auto& c : f.sweep->cells) {
      const auto p = dir / ("confusion_gan_d" + std::to_string(c.point.discriminator_layers) + "_g" +
                            std::to_string(c.point.generator_layers) + ".png");
      write_heatmap(median_run(c.runs).confusion, p);
      written.push_back(p);
    }
  }
  return written;
}

}  // namespace augbench
