// Acceptance checks AC1..AC8. Prints one [PASS]/[FAIL] line per criterion and
// exits non-zero if any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "augbench/cli.hpp"

using namespace augbench;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool ok = true;
  std::string why;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) why = what;
    ok = ok && cond;
  }
};

int failures = 0;

void report(const char* id, const char* title, const Verdict& v, const std::string& detail) {
  std::printf("[%s] %s %s: %s%s%s\n", v.ok ? "PASS" : "FAIL", id, title, detail.c_str(), v.ok ? "" : " -- ",
              v.ok ? "" : v.why.c_str());
  std::fflush(stdout);
  if (!v.ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir() {
  auto d = std::filesystem::temp_directory_path() / ("augbench_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(d);
  return d;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "augbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (code != 0) std::fprintf(stderr, "%s", e.str().c_str());
  return code;
}

Image random_image(std::uint64_t seed) {
  Image img(64, 64);
  Rng rng(seed);
  for (auto& v : img.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return img;
}

// AC1 ------------------------------------------------------------------------------

void ac1() {
  const auto t0 = Clock::now();
  Verdict v;
  Rng rng(2024);
  for (int inst = 0; inst < 100 && v.ok; ++inst) {
    const int k = 2 + static_cast<int>(rng.below(19));
    const int n = 1 + static_cast<int>(rng.below(5000));
    std::vector<int> t(n), p(n);
    // Skew the truth labels so some classes are often absent.
    for (int i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k))) / (inst % 3 == 0 ? 2 : 1);
      p[i] = rng.uniform(0.0, 1.0) < 0.7 ? t[i] : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    }
    const auto cm = confusion_matrix(t, p, k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        long count = 0;
        for (int i = 0; i < n; ++i) count += (t[i] == a && p[i] == b);
        v.check(cm.at(a, b) == count, "confusion count mismatch");
      }
    }
    long correct = 0;
    for (int i = 0; i < n; ++i) correct += t[i] == p[i];
    v.check(accuracy(cm) == static_cast<double>(correct) / n, "accuracy mismatch");

    double recall_sum = 0.0;
    int populated = 0;
    for (int a = 0; a < k; ++a) {
      long support = 0, hit = 0;
      for (int i = 0; i < n; ++i) {
        support += t[i] == a;
        hit += t[i] == a && p[i] == a;
      }
      if (support > 0) {
        recall_sum += static_cast<double>(hit) / static_cast<double>(support);
        ++populated;
      }
    }
    v.check(balanced_accuracy(cm) == recall_sum / populated, "balanced accuracy mismatch");
  }
  const double s = seconds_since(t0);
  v.check(s < 10.0, "runtime over 10 s");
  report("AC1", "metric oracle equivalence", v, fmt("100 random instances, K<=20, n<=5000, exact; %.2f s (limit 10 s)", s));
}

// AC2 ------------------------------------------------------------------------------

Image oracle_blur(const Image& src, double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  Image out(src.height(), src.width());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0, norm = 0.0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            acc += g * src.clamped(y + dy, x + dx, c);
            norm += g;
          }
        out.at(y, x, c) = static_cast<float>(acc / norm);
      }
  return out;
}

void ac2() {
  const auto t0 = Clock::now();
  Verdict v;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Image img = random_image(seed);
    v.check(apply_op(img, Technique::brightness, {0.0}).data() == img.data(), "brightness identity");
    v.check(apply_op(img, Technique::contrast, {1.0}).data() == img.data(), "contrast identity");
    v.check(apply_op(img, Technique::displacement, {0.0, 0.0}).data() == img.data(), "displacement identity");
    v.check(apply_op(img, Technique::occlusion, {7.0, 9.0, 0.0, 0.0, 0.5}).data() == img.data(), "occlusion identity");
    v.check(apply_op(img, Technique::rotation, {0.0}).data() == img.data(), "rotation identity");
    v.check(apply_op(img, Technique::scaling, {1.0}).data() == img.data(), "scaling identity");
    const Image b0 = apply_op(img, Technique::blur, {0.0});
    for (std::size_t i = 0; i < img.data().size(); ++i) v.check(std::abs(b0.data()[i] - img.data()[i]) <= 1e-6, "blur identity");
    for (double sigma : {0.5, 1.0, 2.0}) {
      const Image fast = apply_op(img, Technique::blur, {sigma});
      const Image slow = oracle_blur(img, sigma);
      for (std::size_t i = 0; i < img.data().size(); ++i) {
        v.check(std::abs(fast.data()[i] - slow.data()[i]) <= 1e-5, "blur vs direct convolution");
      }
    }
  }
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset d;
    d.num_classes = 2 + static_cast<int>(rng.below(10));
    const int n = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) {
      d.samples.push_back(make_sample(random_image(1000 + trial * 100 + i),
                                      static_cast<int>(rng.below(static_cast<std::uint64_t>(d.num_classes)))));
    }
    const Technique t = kAllTechniques[trial % kAllTechniques.size()];
    const auto spec = default_spec(t, 10 + trial);
    const Dataset a = augment_dataset(d, spec), b = augment_dataset(d, spec);
    v.check(a.size() == 2 * d.size(), "size not doubled");
    auto counts = d.class_counts();
    auto doubled = a.class_counts();
    for (std::size_t k = 0; k < counts.size(); ++k) v.check(doubled[k] == 2 * counts[k], "label multiset");
    for (std::size_t i = 0; i < a.size(); ++i) {
      v.check(a.samples[i].image().data() == b.samples[i].image().data(), "not bit-reproducible");
      v.check(a.samples[i].image().in_unit_range(), "value outside [0,1]");
    }
  }
  const double s = seconds_since(t0);
  v.check(s < 60.0, "runtime over 60 s");
  report("AC2", "augmentation property suite", v,
         fmt("identities exact (blur <= 1e-6), blur oracle <= 1e-5, 20 random datasets doubled and reproducible; "
             "%.2f s (limit 60 s)",
             s));
}

// AC3 ------------------------------------------------------------------------------

void ac3() {
  const auto t0 = Clock::now();
  Verdict v;
  const Image a = random_image(5), b = random_image(6);
  const auto x = images_to_tensor<float>({&a});
  const auto pair = nn::concat_channels(x, images_to_tensor<float>({&b}));
  double worst = 0.0;
  for (const auto& p : full_sweep_grid()) {
    Generator<float> g({p.generator_layers, 32, 64}, 1);
    const auto y = g.forward(x, nullptr);
    v.check(y.n == 1 && y.c == 3 && y.h == 64 && y.w == 64, "generator shape n_g=" + std::to_string(p.generator_layers));
    Discriminator<float> d({p.discriminator_layers, 32}, 2);
    const auto scores = d.patch_scores(nn::concat_channels(x, y));
    const int expect = p.discriminator_layers == 3 ? 8 : 4;
    v.check(scores.h == expect && scores.w == expect, "patch grid n_d=" + std::to_string(p.discriminator_layers));
    double mean = 0.0;
    for (float s : scores.data) mean += s;
    mean /= static_cast<double>(scores.size());
    worst = std::max(worst, std::abs(mean - d.decide(nn::concat_channels(x, y))[0]));
    const double dr = d.decide(pair)[0];
    v.check(dr >= 0.0 && dr <= 1.0, "decision outside [0,1]");
  }
  v.check(worst <= 1e-6, "decision differs from patch mean");
  const double s = seconds_since(t0);
  v.check(s < 120.0, "runtime over 2 min");
  report("AC3", "GAN architecture contracts", v,
         fmt("10 grid points, shape 64x64x3, grids 8x8/4x4, max |decision - mean| = %.1e (limit 1e-6); %.2f s (limit 120 s)",
             worst, s));
}

// AC4 ------------------------------------------------------------------------------

void ac4() {
  Verdict v;
  Generator<double> g({2, 4, 8}, 11);
  nn::Tensor<double> x(2, 3, 8, 8), y(2, 3, 8, 8);
  Rng rng(12);
  for (auto& e : x.data) e = rng.uniform(-1.0, 1.0);
  for (auto& e : y.data) e = rng.uniform(-1.0, 1.0);
  Generator<double>::Cache cache;
  g.backward(nn::l1_loss(g.forward(x, &cache), y).grad, cache);
  auto params = g.parameters();
  const std::size_t total = nn::parameter_count(params);
  double worst = 0.0;
  Rng pick(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t flat = pick.below(total), k = 0;
    while (flat >= params[k]->value.size()) flat -= params[k++]->value.size();
    auto& w = params[k]->value.data[flat];
    const double keep = w;
    w = keep + 1e-6;
    const double up = nn::l1_loss(g.forward(x, nullptr), y).value;
    w = keep - 1e-6;
    const double down = nn::l1_loss(g.forward(x, nullptr), y).value;
    w = keep;
    const double numeric = (up - down) / 2e-6, analytic = params[k]->grad.data[flat];
    const double scale = std::max(std::abs(numeric), std::abs(analytic));
    const double rel = scale > 0 ? std::abs(numeric - analytic) / scale : 0.0;
    worst = std::max(worst, rel);
  }
  v.check(worst <= 1e-3, "relative error above 1e-3");
  report("AC4", "generator gradient check", v,
         fmt("n_g=2, 8x8, 20 coordinates, max relative error %.2e (limit 1e-3)", worst));
}

// AC5 ------------------------------------------------------------------------------

void ac5() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto lib = builtin_library(ShapeFamily::synthetic, 10);
  const Dataset data = make_synthetic_dataset(lib, ShapeFamily::synthetic, 20, 0, 5);
  const auto pairs = make_pairs(data, lib);
  v.check(pairs.size() == 200, "expected 200 pairs");
  GanHyperparams h;
  h.epochs = 20;
  const auto model = train_gan(pairs, {4, 32, 64}, {3, 32}, h, 1);
  const double first = model.history.front().l1, last = model.history.back().l1;
  for (const auto& e : model.history) {
    v.check(std::isfinite(e.l1) && std::isfinite(e.adversarial) && std::isfinite(e.discriminator), "non-finite loss");
  }
  v.check(model.history.size() == 20, "history length");
  v.check(last <= 0.7 * first, "L1 did not fall to 0.7x");
  const Image g1 = generate(model, *pairs[0].symbolic), g2 = generate(model, *pairs[0].symbolic);
  v.check(g1.data() == g2.data(), "generate not deterministic");
  const auto scores = model.discriminator.patch_scores(
      nn::concat_channels(images_to_tensor<float>({pairs[0].symbolic.get()}), images_to_tensor<float>({&g1})));
  for (float s : scores.data) v.check(s > 0.0f && s < 1.0f, "patch score outside (0,1)");
  const double s = seconds_since(t0);
  v.check(s <= 900.0, "runtime over 15 min");
  report("AC5", "toy GAN descent", v,
         fmt("L1 %.4f -> %.4f, ratio %.3f (limit 0.7)", first, last, last / first) +
             fmt("; losses finite, generate bit-identical; %.0f s (limit 900 s)", s));
}

// AC6 ------------------------------------------------------------------------------

double overfit_accuracy(double lr, std::uint64_t seed, double* secs) {
  const auto t0 = Clock::now();
  const Dataset data = make_synthetic_dataset(builtin_library(ShapeFamily::synthetic, 5), ShapeFamily::synthetic, 10, 0, 3);
  ClassifierConfig cfg;
  cfg.num_classes = 5;
  TrainHyperparams h;
  h.epochs = 100;
  h.learning_rate = lr;
  const auto model = train_classifier(data, cfg, h, seed);
  const auto pred = predict(model, data);
  const double acc = accuracy(confusion_matrix(data.labels(), pred, 5));
  *secs = seconds_since(t0);
  return acc;
}

void ac6() {
  Verdict v;
  double secs = 0.0;
  const double acc = overfit_accuracy(1e-3, 1, &secs);
  v.check(acc >= 0.95, "train accuracy below 95%");
  v.check(secs <= 300.0, "runtime over 5 min");
  report("AC6", "classifier overfit oracle", v,
         fmt("50 images, 5 classes, 100 epochs, Adam lr 1e-3: train accuracy %.3f (limit 0.95); %.1f s (limit 300 s)", acc,
             secs));
  // The default lr 0.01 is reported for reference only; it is seed-sensitive here.
  std::string accs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double ignored = 0.0;
    accs += fmt(seed == 1 ? "%.3f" : " %.3f", overfit_accuracy(0.01, seed, &ignored));
  }
  std::printf("[INFO] AC6 same set at the default lr 0.01, seeds 1..5: train accuracy %s\n", accs.c_str());
  std::fflush(stdout);
}

// AC7 ------------------------------------------------------------------------------

std::vector<std::string> table_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  std::getline(ss, cell, '|');
  while (std::getline(ss, cell, '|')) {
    const auto b = cell.find_first_not_of(' '), e = cell.find_last_not_of(' ');
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

void ac7(const std::filesystem::path& dir) {
  Verdict v;
  nlohmann::json cfg = to_json(ExperimentConfig{});
  cfg["output_dir"] = dir.string();
  cfg["dataset"] = {{"synthetic", {{"family", "synthetic"}, {"classes", 10}, {"train_per_class", 50},
                                   {"test_per_class", 50}, {"seed", 7}}}};
  cfg["techniques"] = {"none", "contrast", "displacement", "pix2pix"};
  cfg["repeats"] = 3;
  cfg["classifier"]["epochs"] = 30;
  cfg["gan"]["epochs"] = 20;
  std::ofstream(dir / "ac7.json") << cfg.dump(2);

  double first_run = 0.0;
  std::string tables[2];
  std::string results[2];
  for (int r = 0; r < 2; ++r) {
    const auto t0 = Clock::now();
    const std::string name = "ac7_" + std::to_string(r);
    const int code = run_cli({"evaluate", "--config", (dir / "ac7.json").string(), "--name", name});
    v.check(code == 0, "evaluate failed");
    if (r == 0) first_run = seconds_since(t0);
    tables[r] = slurp(dir / name / "reports" / "table.txt");
    results[r] = slurp(dir / name / "results.json");
  }
  v.check(!tables[0].empty() && tables[0] == tables[1], "table not byte-stable");
  v.check(results[0] == results[1], "results not byte-stable");

  std::stringstream lines(tables[0]);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) rows.push_back(table_cells(line));
  v.check(rows.size() == 6, "expected header, rule and 4 rows");
  if (rows.size() == 6) {
    v.check(rows[0] == experiment_columns(), "column structure");
    const std::vector<std::string> order{"None", "Contrast", "Displacement", "pix2pix"};
    for (std::size_t i = 0; i < 4; ++i) {
      v.check(rows[i + 2][0] == order[i], "row order");
      v.check(rows[i + 2][1] == (i == 0 ? "500" : "1000"), "sample count not 2x base");
    }
  }
  v.check(first_run <= 45 * 60.0, "runtime over 45 min");
  std::printf("%s", tables[0].c_str());
  report("AC7", "end-to-end protocol", v,
         fmt("10 classes, 500/500, 4 techniques x 3 repeats; byte-identical table and results on rerun; "
             "counts 500/1000/1000/1000; %.0f s per run (limit 2700 s)",
             first_run));
}

// AC8 ------------------------------------------------------------------------------

void ac8(const std::filesystem::path& dir) {
  const auto t0 = Clock::now();
  Verdict v;
  std::string out;
  const int code = run_cli({"sweep", "--output-dir", dir.string(), "--name", "ac8", "--classes", "4", "--train-per-class",
                            "6", "--test-per-class", "4", "--repeats", "2", "--cls-epochs", "30", "--gan-epochs", "2",
                            "--grid", "3,4x2,4"},
                           &out);
  v.check(code == 0, "sweep failed");
  const auto results = load_results(dir / "ac8" / "results.json");
  v.check(results.sweep && results.sweep->cells.size() == 4, "expected 4 cells");
  v.check(results.sweep && results.sweep->baseline.has_value(), "missing baseline row");
  const std::string table = slurp(dir / "ac8" / "reports" / "sweep.txt");
  std::stringstream lines(table);
  std::string header;
  std::getline(lines, header);
  v.check(table_cells(header) == sweep_columns(), "sweep columns");
  v.check(header.find("Balanced Accuracy") != std::string::npos, "balanced accuracy columns");

  Dataset train;
  train.num_classes = 36;
  train.family = ShapeFamily::circular;
  auto px = std::make_shared<const Image>(64, 64, 0.5f);
  train.samples.assign(61089, ImageSample{px, 0, Split::train, BoundingBox{0, 0, 10, 10}, std::nullopt});
  for (std::size_t i = 0; i < train.size(); ++i) train.samples[i].class_index = static_cast<int>(i % 36);
  const Dataset subset = select_gan_subset(train, 5809);
  Dataset generated = subset.with_samples(subset.samples);
  const Dataset pool = gan_training_pool(train, generated);
  v.check(pool.size() == 66898, "66898 identity");
  std::printf("%s", table.c_str());
  report("AC8", "sweep protocol", v,
         "grid {3,4}x{2,4}: 4 cells + baseline with balanced-accuracy columns; 61089 + 5809 = " +
             std::to_string(pool.size()) + fmt("; %.1f s", seconds_since(t0)));
}

}  // namespace

int main() {
  const auto dir = scratch_dir();
  try {
    ac1();
    ac2();
    ac3();
    ac4();
    ac5();
    ac6();
    ac7(dir);
    ac8(dir);
  } catch (const std::exception& e) {
    std::printf("[FAIL] unexpected error: %s\n", e.what());
    ++failures;
  }
  std::filesystem::remove_all(dir);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
