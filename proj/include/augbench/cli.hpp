#pragma once

// Command-line front end. dispatch() is the whole program; main() only
// forwards argv and the standard streams.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <png.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "augbench/classic_augment.hpp"
#include "augbench/config.hpp"
#include "augbench/dataset_io.hpp"
#include "augbench/error.hpp"
#include "augbench/eval.hpp"
#include "augbench/pix2pix.hpp"
#include "augbench/png_io.hpp"
#include "augbench/sign_library.hpp"
#include "augbench/sign_renderer.hpp"
#include "augbench/squeezenet.hpp"

namespace augbench {

inline constexpr const char* kVersion = "1.0.0";

inline nlohmann::json version_info() {
  return {{"augbench", kVersion},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"libpng", PNG_LIBPNG_VER_STRING},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION}};
}

namespace cli_detail {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << j.dump(2) << "\n";
}

/// Command line, seeds and library versions for one invocation.
inline void write_reproducibility(const Context& ctx, const std::filesystem::path& dir, const nlohmann::json& settings,
                                  const std::vector<std::uint64_t>& seeds) {
  write_json(dir / "reproducibility.json",
             {{"command", ctx.argv}, {"settings", settings}, {"seeds", seeds}, {"versions", version_info()}});
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

inline TemplateLibrary pick_library(const std::string& family, int classes, const std::string& templates_dir) {
  if (!templates_dir.empty()) return load_template_library(templates_dir);
  if (family == "novel") return novel_library();
  return builtin_library(parse_family(family), classes);
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("expected a comma-separated integer list, got '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

/// "3,4x2,4" -> {(3,2),(3,4),(4,2),(4,4)}: discriminator depths x generator depths.
inline std::vector<GridPoint> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw ConfigError("grid must look like D1,D2xG1,G2 (e.g. 3,4x2,4), got '" + s + "'");
  std::vector<GridPoint> grid;
  for (int d : parse_int_list(s.substr(0, x))) {
    for (int g : parse_int_list(s.substr(x + 1))) grid.push_back({d, g});
  }
  return grid;
}

inline Interval parse_interval(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("range must look like lo:hi, got '" + s + "'");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("range must look like lo:hi, got '" + s + "'");
  }
}

inline LogFn logger(std::ostream& err) {
  return [&err](const std::string& line) { err << line << std::endl; };
}

// Shared experiment overrides for evaluate and sweep.
struct ExperimentFlags {
  std::string config;
  std::optional<std::string> name, output_dir, manifest;
  std::optional<int> repeats, cls_epochs, gan_epochs, train_per_class, test_per_class, classes, gan_subset;
  std::optional<double> cls_lr;
  std::vector<std::string> techniques;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> grid;
  bool no_baseline = false;

  void add(CLI::App* app) {
    app->add_option("--config", config, "Experiment config (JSON, schema_version 1); defaults when omitted");
    app->add_option("--name", name, "Run directory name (default: UTC timestamp)");
    app->add_option("--output-dir", output_dir, "Parent directory for runs");
    app->add_option("--manifest", manifest, "Dataset manifest (overrides the config dataset)");
    app->add_option("--repeats", repeats, "Classifier training runs per row")->check(CLI::PositiveNumber);
    app->add_option("--seeds", seeds, "Explicit run seeds (count must equal repeats)");
    app->add_option("--cls-epochs", cls_epochs, "Classifier epochs")->check(CLI::PositiveNumber);
    app->add_option("--cls-lr", cls_lr, "Classifier learning rate");
    app->add_option("--gan-epochs", gan_epochs, "GAN epochs")->check(CLI::PositiveNumber);
    app->add_option("--gan-subset", gan_subset, "GAN training pairs taken from the training split (-1: all)");
    app->add_option("--classes", classes, "Synthetic dataset: number of classes");
    app->add_option("--train-per-class", train_per_class, "Synthetic dataset: training samples per class");
    app->add_option("--test-per-class", test_per_class, "Synthetic dataset: test samples per class");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
    if (name) c.name = *name;
    if (output_dir) c.output_dir = *output_dir;
    if (manifest) {
      c.manifest = std::filesystem::absolute(*manifest).lexically_normal().string();
    } else if (c.manifest) {
      c.manifest = std::filesystem::absolute(augbench::resolve(c, *c.manifest)).lexically_normal().string();
    }
    if (c.templates) c.templates = std::filesystem::absolute(augbench::resolve(c, *c.templates)).lexically_normal().string();
    if (repeats) {
      c.repeats = *repeats;
      if (seeds.empty() && static_cast<int>(c.seeds.size()) != c.repeats) c.seeds.clear();
    }
    if (!seeds.empty()) c.seeds = seeds;
    if (cls_epochs) c.classifier.epochs = *cls_epochs;
    if (cls_lr) c.classifier.learning_rate = *cls_lr;
    if (gan_epochs) c.gan.hyper.epochs = *gan_epochs;
    if (gan_subset) c.gan.subset_size = *gan_subset;
    if (classes) c.synthetic.classes = *classes;
    if (train_per_class) c.synthetic.train_per_class = *train_per_class;
    if (test_per_class) c.synthetic.test_per_class = *test_per_class;
    if (!techniques.empty()) c.techniques = techniques;
    if (grid) c.grid = parse_grid(*grid);
    if (no_baseline) c.sweep_baseline = false;
    c.base_dir = ".";
    validate(c);
    return c;
  }
};

struct RunDirs {
  std::filesystem::path root, checkpoints, reports;
};

inline RunDirs make_run_dirs(const ExperimentConfig& c) {
  RunDirs d;
  d.root = std::filesystem::path(c.output_dir) / (c.name.empty() ? utc_timestamp() : c.name);
  d.checkpoints = d.root / "checkpoints";
  d.reports = d.root / "reports";
  std::filesystem::create_directories(d.checkpoints);
  std::filesystem::create_directories(d.reports);
  return d;
}

inline std::shared_ptr<const GanModel> train_experiment_gan(const ExperimentConfig& c, const ExperimentSetup& setup,
                                                            const std::filesystem::path& ckpt, const LogFn& log) {
  const Dataset train = train_split(setup.base);
  const Dataset subset = select_gan_subset(train, effective_subset_size(c.gan, train));
  const auto pairs = make_pairs(subset, setup.templates);
  log("training GAN (n_d=" + std::to_string(c.gan.discriminator_layers) + ", n_g=" +
      std::to_string(c.gan.generator_layers) + ") on " + std::to_string(pairs.size()) + " pairs");
  auto gan = std::make_shared<GanModel>(train_gan(
      pairs, GeneratorConfig{c.gan.generator_layers, c.gan.generator_channels, kImageSize},
      DiscriminatorConfig{c.gan.discriminator_layers, c.gan.discriminator_channels}, c.gan.hyper, c.gan.seed,
      [&](int epoch, const GanEpochStats& s) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "gan epoch %d: adversarial %.4f, l1 %.4f, discriminator %.4f", epoch + 1,
                      s.adversarial, s.l1, s.discriminator);
        log(buf);
      }));
  save_gan(*gan, ckpt);
  return gan;
}

// Subcommands ----------------------------------------------------------------------

inline int cmd_render(const Context& ctx, const std::string& family, std::optional<int> cls, int classes,
                      const std::string& out, int size, const std::string& templates, const std::string& export_dir) {
  const TemplateLibrary lib = pick_library(family, classes, templates);
  if (!export_dir.empty()) {
    save_template_library(lib, export_dir);
    ctx.out << "exported " << lib.size() << " templates to " << export_dir << "\n";
  }
  if (out.empty()) {
    if (export_dir.empty()) throw ConfigError("render: --out is required unless --export-templates is given");
    return 0;
  }
  if (cls) {
    const std::filesystem::path p(out);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    write_png(p, render_symbolic(lib.at(*cls), size));
    ctx.out << "wrote " << p.string() << "\n";
    return 0;
  }
  std::filesystem::create_directories(out);
  for (const auto& t : lib.templates) {
    char name[32];
    std::snprintf(name, sizeof(name), "class_%02d.png", t.class_index);
    write_png(std::filesystem::path(out) / name, render_symbolic(t, size));
  }
  ctx.out << "wrote " << lib.size() << " templates to " << out << "\n";
  return 0;
}

inline int cmd_synth(const Context& ctx, const std::string& family, int classes, int train, int test,
                     std::uint64_t seed, const std::string& out) {
  const ShapeFamily f = parse_family(family);
  const TemplateLibrary lib = builtin_library(f, classes);
  const Dataset d = make_synthetic_dataset(lib, f, train, test, seed);
  validate_dataset(d);
  const auto manifest = save_dataset(d, out);
  write_reproducibility(ctx, out,
                        {{"family", family}, {"classes", d.num_classes}, {"train_per_class", train},
                         {"test_per_class", test}},
                        {seed});
  ctx.out << "wrote " << d.size() << " samples (" << d.split(Split::train).size() << " train, "
          << d.split(Split::test).size() << " test) to " << manifest.string() << "\n";
  return 0;
}

inline int cmd_augment(const Context& ctx, const std::string& manifest, const std::string& technique,
                       const std::vector<std::string>& ranges, std::uint64_t seed, const std::string& out) {
  const auto t = parse_technique(technique);
  if (!t) throw ConfigError("unknown classic augmentation technique '" + technique + "'");
  AugmentationSpec spec = default_spec(*t, seed);
  if (!ranges.empty()) {
    spec.ranges.clear();
    for (const auto& r : ranges) spec.ranges.push_back(parse_interval(r));
  }
  validate_spec(spec);
  const Dataset d = load_dataset(manifest);
  validate_dataset(d);
  const Dataset train = d.split(Split::train);
  if (train.empty()) throw ValidationError("'" + manifest + "' has no training samples");
  const Dataset augmented = merge_datasets(augment_dataset(train, spec), d.split(Split::test));
  const auto path = save_dataset(augmented, out);
  nlohmann::json r = nlohmann::json::array();
  for (const auto& i : spec.ranges) r.push_back({i.lo, i.hi});
  write_reproducibility(ctx, out, {{"manifest", manifest}, {"technique", technique}, {"ranges", r}}, {seed});
  ctx.out << technique << ": " << train.size() << " -> " << 2 * train.size() << " training samples; wrote "
          << path.string() << "\n";
  return 0;
}

struct GanTrainFlags {
  std::string manifest, templates, out;
  long subset = -1;
  GeneratorConfig g;
  DiscriminatorConfig d;
  GanHyperparams h;
  std::uint64_t seed = 1;
};

inline int cmd_gan_train(const Context& ctx, const GanTrainFlags& f) {
  validate(f.g);
  validate(f.d);
  validate(f.h);
  const Dataset d = load_dataset(f.manifest);
  validate_dataset(d);
  const TemplateLibrary lib = f.templates.empty() ? builtin_library(d.family, d.num_classes)
                                                  : load_template_library(f.templates);
  const Dataset train = d.split(Split::train);
  const Dataset subset = select_gan_subset(train, f.subset < 0 ? static_cast<long>(train.size()) : f.subset);
  const auto pairs = make_pairs(subset, lib);
  const auto log = logger(ctx.err);
  const GanModel m = train_gan(pairs, f.g, f.d, f.h, f.seed, [&](int epoch, const GanEpochStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %d: adversarial %.4f, l1 %.4f, discriminator %.4f", epoch + 1,
                  s.adversarial, s.l1, s.discriminator);
    log(buf);
  });
  std::filesystem::create_directories(f.out);
  const auto ckpt = std::filesystem::path(f.out) / "gan.ckpt";
  save_gan(m, ckpt);
  write_reproducibility(ctx, f.out,
                        {{"manifest", f.manifest}, {"pairs", pairs.size()}, {"generator", to_json(f.g)},
                         {"discriminator", to_json(f.d)}, {"hyper", to_json(f.h)}},
                        {f.seed});
  ctx.out << "wrote " << ckpt.string() << "\n";
  return 0;
}

inline int cmd_gan_generate(const Context& ctx, const std::string& checkpoint, const std::string& family, int classes,
                            const std::string& templates, std::vector<int> cls, bool novel, const std::string& out) {
  const GanModel m = load_gan(checkpoint);
  const TemplateLibrary lib = novel ? novel_library() : pick_library(family, classes, templates);
  if (cls.empty()) {
    for (const auto& t : lib.templates) cls.push_back(t.class_index);
  }
  std::filesystem::create_directories(out);
  nlohmann::json index = nlohmann::json::array();
  for (int c : cls) {
    const SignTemplate& t = lib.at(c);
    const Image symbolic = render_symbolic(t, m.generator_config.input_size);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "%s_%02d", lib.family.c_str(), c);
    write_png(std::filesystem::path(out) / (std::string(stem) + "_symbolic.png"), symbolic);
    write_png(std::filesystem::path(out) / (std::string(stem) + "_generated.png"), generate(m, symbolic));
    index.push_back({{"class_index", c}, {"name", t.name}, {"stem", stem}});
  }
  write_json(std::filesystem::path(out) / "index.json", index);
  write_reproducibility(ctx, out, {{"checkpoint", checkpoint}, {"library", lib.family}}, {});
  ctx.out << "generated " << cls.size() << " images into " << out << "\n";
  return 0;
}

inline int cmd_cls_train(const Context& ctx, const std::string& manifest, const TrainHyperparams& h,
                         std::uint64_t seed, const std::string& out) {
  validate(h);
  const Dataset d = load_dataset(manifest);
  validate_dataset(d);
  ClassifierConfig cfg;
  cfg.num_classes = d.num_classes;
  const auto log = logger(ctx.err);
  const ClassifierModel m = train_classifier(d, cfg, h, seed, [&](int epoch, double loss, double acc) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "epoch %d: loss %.4f, train accuracy %.4f", epoch + 1, loss, acc);
    log(buf);
  });
  std::filesystem::create_directories(out);
  const auto ckpt = std::filesystem::path(out) / "classifier.ckpt";
  save_classifier(m, ckpt);
  nlohmann::json settings{{"manifest", manifest},
                          {"epochs", h.epochs},
                          {"learning_rate", h.learning_rate},
                          {"batch_size", h.batch_size}};
  const Dataset test = d.split(Split::test);
  if (!test.empty()) {
    const RunRecord r = evaluate_classifier(m, test, seed, EmptyClassPolicy::exclude);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "test accuracy %.4f, balanced accuracy %.4f\n", r.accuracy, r.balanced_accuracy);
    ctx.out << buf;
    settings["test_accuracy"] = r.accuracy;
    settings["test_balanced_accuracy"] = r.balanced_accuracy;
  }
  write_reproducibility(ctx, out, settings, {seed});
  ctx.out << "wrote " << ckpt.string() << "\n";
  return 0;
}

inline void record_run(const Context& ctx, const RunDirs& dirs, const ExperimentConfig& c) {
  write_json(dirs.root / "config.json", to_json(c));
  write_reproducibility(ctx, dirs.root, to_json(c), effective_seeds(c));
}

inline int cmd_evaluate(const Context& ctx, const ExperimentFlags& flags) {
  const ExperimentConfig c = flags.resolve();
  std::vector<TechniqueId> techniques;
  for (const auto& t : c.techniques) techniques.push_back(parse_technique_id(t));
  Dataset data = load_experiment_dataset(c);
  TemplateLibrary lib = load_experiment_templates(c, data);
  const RunDirs dirs = make_run_dirs(c);
  record_run(ctx, dirs, c);
  const auto log = logger(ctx.err);
  ExperimentSetup setup = make_setup(c, std::move(data), std::move(lib));
  for (const auto& t : techniques) {
    if (t.kind == TechniqueId::Kind::pix2pix) setup.gan = train_experiment_gan(c, setup, dirs.checkpoints / "gan.ckpt", log);
  }
  ResultsFile results;
  for (const auto& t : techniques) results.experiments.push_back(run_experiment(t, setup, effective_seeds(c), log));
  save_results(results, dirs.root / "results.json");
  write_report(results, dirs.reports);
  ctx.out << render_table(results.experiments);
  ctx.out << "results: " << (dirs.root / "results.json").string() << "\n";
  return 0;
}

inline int cmd_sweep(const Context& ctx, const ExperimentFlags& flags) {
  const ExperimentConfig c = flags.resolve();
  Dataset data = load_experiment_dataset(c);
  TemplateLibrary lib = load_experiment_templates(c, data);
  const RunDirs dirs = make_run_dirs(c);
  record_run(ctx, dirs, c);
  SweepSetup s;
  s.experiment = make_setup(c, std::move(data), std::move(lib));
  s.gan_subset_size = effective_subset_size(c.gan, train_split(s.experiment.base));
  s.gan = c.gan.hyper;
  s.generator_base_channels = c.gan.generator_channels;
  s.discriminator_base_channels = c.gan.discriminator_channels;
  s.gan_seed = c.gan.seed;
  s.include_baseline = c.sweep_baseline;
  ResultsFile results;
  results.sweep = sweep_gan(s, c.grid, effective_seeds(c), logger(ctx.err));
  save_results(results, dirs.root / "results.json");
  write_report(results, dirs.reports);
  ctx.out << render_sweep_table(*results.sweep);
  ctx.out << "results: " << (dirs.root / "results.json").string() << "\n";
  return 0;
}

inline int cmd_report(const Context& ctx, const std::string& results_path, std::string out) {
  const ResultsFile f = load_results(results_path);
  if (out.empty()) {
    const std::filesystem::path p(results_path);
    out = ((p.has_parent_path() ? p.parent_path() : std::filesystem::path(".")) / "reports").string();
  }
  const auto files = write_report(f, out);
  if (!f.experiments.empty()) ctx.out << render_table(f.experiments);
  if (f.sweep) ctx.out << render_sweep_table(*f.sweep);
  ctx.out << "wrote " << files.size() << " report files to " << out << "\n";
  return 0;
}

}  // namespace cli_detail

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Benchmark GAN-based against classic data augmentation for sign classification", "augbench"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Context ctx{out, err, std::vector<std::string>(argv, argv + argc)};
  const std::vector<std::string> families{"circular", "triangular", "synthetic"};
  std::function<int()> action;

  // render
  auto* render = app.add_subcommand("render", "Render symbolic sign templates to PNG");
  std::string r_family = "circular", r_out, r_templates, r_export;
  std::optional<int> r_class;
  int r_classes = 10, r_size = kImageSize;
  render->add_option("--family", r_family, "circular, triangular, synthetic or novel")
      ->check(CLI::IsMember({"circular", "triangular", "synthetic", "novel"}));
  render->add_option("--class", r_class, "Class index; all classes when omitted");
  render->add_option("--classes", r_classes, "Class count for the synthetic family");
  render->add_option("--out", r_out, "PNG path with --class, otherwise an output directory");
  render->add_option("--size", r_size, "Edge length in pixels")->check(CLI::Range(16, 4096));
  render->add_option("--templates", r_templates, "Load templates from this directory instead of the builtin set");
  render->add_option("--export-templates", r_export, "Write the template library as JSON files to this directory");
  render->callback([&] {
    action = [&] { return cmd_render(ctx, r_family, r_class, r_classes, r_out, r_size, r_templates, r_export); };
  });

  // synth-data
  auto* synth = app.add_subcommand("synth-data", "Build a synthetic labelled dataset");
  std::string s_family = "synthetic", s_out;
  int s_classes = 10, s_train = 50, s_test = 50;
  std::uint64_t s_seed = 7;
  synth->add_option("--family", s_family, "Template family")->check(CLI::IsMember(families));
  synth->add_option("--classes", s_classes, "Class count for the synthetic family");
  synth->add_option("--train-per-class", s_train, "Training samples per class")->check(CLI::NonNegativeNumber);
  synth->add_option("--test-per-class", s_test, "Test samples per class")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", s_seed, "Generation seed");
  synth->add_option("--out", s_out, "Output directory")->required();
  synth->callback([&] { action = [&] { return cmd_synth(ctx, s_family, s_classes, s_train, s_test, s_seed, s_out); }; });

  // augment
  auto* augment = app.add_subcommand("augment", "Double the training split with one classic augmentation");
  std::string a_manifest, a_technique, a_out;
  std::vector<std::string> a_ranges;
  std::uint64_t a_seed = 1;
  augment->add_option("--manifest", a_manifest, "Input dataset manifest")->required();
  augment->add_option("--technique", a_technique, "blur, brightness, contrast, displacement, occlusion, rotation, scaling")
      ->required();
  augment->add_option("--range", a_ranges, "Parameter range lo:hi, once per parameter in order");
  augment->add_option("--seed", a_seed, "Augmentation seed");
  augment->add_option("--out", a_out, "Output directory")->required();
  augment->callback([&] { action = [&] { return cmd_augment(ctx, a_manifest, a_technique, a_ranges, a_seed, a_out); }; });

  // gan-train
  auto* gan_train = app.add_subcommand("gan-train", "Train the conditional GAN on (symbolic, real) pairs");
  GanTrainFlags gt;
  gan_train->add_option("--manifest", gt.manifest, "Training dataset manifest")->required();
  gan_train->add_option("--templates", gt.templates, "Template directory (builtin library when omitted)");
  gan_train->add_option("--subset", gt.subset, "Highest-quality training samples to use (-1: all)");
  gan_train->add_option("--generator-layers", gt.g.n_conv_layers, "Generator conv layers (even)");
  gan_train->add_option("--discriminator-layers", gt.d.n_conv_layers, "Discriminator conv layers (3 or 4)");
  gan_train->add_option("--generator-channels", gt.g.base_channels, "Generator base width");
  gan_train->add_option("--discriminator-channels", gt.d.base_channels, "Discriminator base width");
  gan_train->add_option("--epochs", gt.h.epochs, "Epochs");
  gan_train->add_option("--batch-size", gt.h.batch_size, "Batch size");
  gan_train->add_option("--lr", gt.h.learning_rate, "Adam learning rate");
  gan_train->add_option("--l1-weight", gt.h.l1_weight, "Weight of the L1 term");
  gan_train->add_option("--seed", gt.seed, "Seed");
  gan_train->add_option("--out", gt.out, "Output directory")->required();
  gan_train->callback([&] { action = [&] { return cmd_gan_train(ctx, gt); }; });

  // gan-generate
  auto* gan_gen = app.add_subcommand("gan-generate", "Translate symbolic templates with a trained GAN");
  std::string g_ckpt, g_family = "circular", g_templates, g_out;
  int g_classes = 10;
  std::vector<int> g_class;
  bool g_novel = false;
  gan_gen->add_option("--checkpoint", g_ckpt, "GAN checkpoint")->required();
  gan_gen->add_option("--family", g_family, "Template family")->check(CLI::IsMember(families));
  gan_gen->add_option("--classes", g_classes, "Class count for the synthetic family");
  gan_gen->add_option("--templates", g_templates, "Template directory");
  gan_gen->add_option("--class", g_class, "Classes to generate (default: all)");
  gan_gen->add_flag("--novel", g_novel, "Use templates of sign types absent from training");
  gan_gen->add_option("--out", g_out, "Output directory")->required();
  gan_gen->callback([&] {
    action = [&] { return cmd_gan_generate(ctx, g_ckpt, g_family, g_classes, g_templates, g_class, g_novel, g_out); };
  });

  // cls-train
  auto* cls = app.add_subcommand("cls-train", "Train the classifier on a dataset's training split");
  std::string c_manifest, c_out;
  TrainHyperparams c_hyper;
  std::uint64_t c_seed = 1;
  cls->add_option("--manifest", c_manifest, "Dataset manifest")->required();
  cls->add_option("--epochs", c_hyper.epochs, "Epochs");
  cls->add_option("--lr", c_hyper.learning_rate, "Adam learning rate");
  cls->add_option("--batch-size", c_hyper.batch_size, "Batch size");
  cls->add_option("--seed", c_seed, "Seed");
  cls->add_option("--out", c_out, "Output directory")->required();
  cls->callback([&] { action = [&] { return cmd_cls_train(ctx, c_manifest, c_hyper, c_seed, c_out); }; });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compare augmentation techniques over repeated classifier runs");
  ExperimentFlags ef;
  ef.add(evaluate);
  evaluate->add_option("--techniques", ef.techniques, "Techniques (none, pix2pix, or a classic technique)");
  evaluate->callback([&] { action = [&] { return cmd_evaluate(ctx, ef); }; });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "GAN architecture sweep over discriminator x generator depths");
  ExperimentFlags sf;
  sf.add(sweep);
  sweep->add_option("--grid", sf.grid, "Depth grid, e.g. 3,4x2,4,6,8,10");
  sweep->add_flag("--no-baseline", sf.no_baseline, "Skip the no-augmentation row");
  sweep->callback([&] { action = [&] { return cmd_sweep(ctx, sf); }; });

  // report
  auto* report = app.add_subcommand("report", "Re-render tables and heatmaps from a results file");
  std::string p_results, p_out;
  report->add_option("--results", p_results, "results.json")->required();
  report->add_option("--out", p_out, "Report directory (default: reports/ next to the results)");
  report->callback([&] { action = [&] { return cmd_report(ctx, p_results, p_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "augbench: " << e.what() << "\n";
    err << "run 'augbench --help' for usage\n";
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    err << "augbench: error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "augbench: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace augbench
