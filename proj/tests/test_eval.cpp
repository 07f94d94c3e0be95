#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "augbench/eval.hpp"
#include "augbench/png_io.hpp"
#include "augbench/sign_library.hpp"
#include "test_util.hpp"

using namespace augbench;

namespace {

RunRecord run(std::uint64_t seed, double acc, double bal, int k = 2) {
  ConfusionMatrix cm(k);
  cm.at(0, 0) = static_cast<long>(seed);
  return {seed, acc, bal, cm};
}

TechniqueResult result(const std::string& key, std::size_t samples, std::vector<double> accs) {
  TechniqueResult r{parse_technique_id(key), samples, {}};
  for (std::size_t i = 0; i < accs.size(); ++i) r.runs.push_back(run(i + 1, accs[i], accs[i] - 0.1));
  return r;
}

// Fixed report used for the golden files; rows deliberately out of table order.
ResultsFile fixed_report() {
  ResultsFile f;
  f.experiments.push_back(result("pix2pix", 1000, {0.94, 0.95, 0.93}));
  f.experiments.push_back(result("none", 500, {0.921, 0.882, 0.95}));
  f.experiments.push_back(result("contrast", 1000, {0.955, 0.946, 0.968}));
  SweepResult s;
  s.baseline = result("none", 500, {0.9, 0.91});
  s.cells.push_back({{3, 2}, 560, {run(1, 0.8, 0.7), run(2, 0.85, 0.75)}});
  s.cells.push_back({{4, 4}, 560, {run(1, 0.939, 0.836), run(2, 0.94, 0.84)}});
  f.sweep = s;
  return f;
}

std::filesystem::path golden(const std::string& name) { return std::filesystem::path(AUGBENCH_GOLDEN_DIR) / name; }

}  // namespace

TEST(Confusion, SmallExamples) {
  EXPECT_EQ(confusion_matrix({0, 1}, {0, 1}, 2).rows(), (std::vector<std::vector<long>>{{1, 0}, {0, 1}}));
  EXPECT_EQ(confusion_matrix({0, 0}, {1, 1}, 2).rows(), (std::vector<std::vector<long>>{{0, 2}, {0, 0}}));
}

TEST(Confusion, MatchesPairwiseCountingAndRowSums) {
  Rng rng(11);
  std::vector<int> t(1000), p(1000);
  for (int i = 0; i < 1000; ++i) {
    t[i] = static_cast<int>(rng.below(10));
    p[i] = static_cast<int>(rng.below(10));
  }
  const auto cm = confusion_matrix(t, p, 10);
  long agree = 0;
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      long n = 0;
      for (int i = 0; i < 1000; ++i) n += (t[i] == a && p[i] == b);
      ASSERT_EQ(cm.at(a, b), n);
    }
    EXPECT_EQ(cm.row_sum(a), std::count(t.begin(), t.end(), a));
  }
  for (int i = 0; i < 1000; ++i) agree += t[i] == p[i];
  EXPECT_EQ(cm.total(), 1000);
  EXPECT_EQ(accuracy(cm), static_cast<double>(agree) / 1000.0);
}

TEST(Confusion, RejectsBadInput) {
  EXPECT_THROW(confusion_matrix({0, 1}, {0}, 2), ValidationError);
  EXPECT_THROW(confusion_matrix({0, 2}, {0, 1}, 2), ValidationError);
  EXPECT_THROW(confusion_matrix({0, -1}, {0, 1}, 2), ValidationError);
}

TEST(Accuracy, Arithmetic) {
  const auto cm = ConfusionMatrix::from_rows({{5, 5}, {0, 10}});
  EXPECT_EQ(accuracy(cm), 0.75);
  EXPECT_EQ(balanced_accuracy(cm), 0.75);
  EXPECT_EQ(accuracy(ConfusionMatrix::from_rows({{3, 0, 0}, {0, 4, 0}, {0, 0, 9}})), 1.0);
  EXPECT_EQ(balanced_accuracy(ConfusionMatrix::from_rows({{3, 0}, {0, 4}})), 1.0);
  EXPECT_THROW(accuracy(ConfusionMatrix(3)), ValidationError);
  EXPECT_THROW(balanced_accuracy(ConfusionMatrix(3)), ValidationError);
}

TEST(Accuracy, TraceOverTotalOnRandomMatrices) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<long>> rows(6, std::vector<long>(6));
    for (auto& r : rows)
      for (auto& v : r) v = static_cast<long>(rng.below(20));
    rows[0][0] += 1;
    const auto cm = ConfusionMatrix::from_rows(rows);
    long trace = 0, total = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        total += rows[i][j];
        if (i == j) trace += rows[i][j];
      }
    EXPECT_EQ(accuracy(cm), static_cast<double>(trace) / static_cast<double>(total));
  }
}

TEST(BalancedAccuracy, EmptyRowExcludedOrCountedAsZero) {
  const auto cm = ConfusionMatrix::from_rows({{3, 1, 0}, {0, 0, 0}, {2, 0, 6}});
  const double r0 = 3.0 / 4.0, r2 = 6.0 / 8.0;
  EXPECT_DOUBLE_EQ(balanced_accuracy(cm), (r0 + r2) / 2.0);
  EXPECT_DOUBLE_EQ(balanced_accuracy(cm, EmptyClassPolicy::count_as_zero), (r0 + r2) / 3.0);
}

TEST(BalancedAccuracy, InvariantUnderRowScaling) {
  auto rows = std::vector<std::vector<long>>{{4, 1, 3}, {2, 7, 1}, {0, 5, 5}};
  const double base = balanced_accuracy(ConfusionMatrix::from_rows(rows));
  for (auto& v : rows[1]) v *= 7;
  EXPECT_NEAR(balanced_accuracy(ConfusionMatrix::from_rows(rows)), base, 1e-15);
}

TEST(BalancedAccuracy, EqualsAccuracyForUniformClassCounts) {
  const auto cm = ConfusionMatrix::from_rows({{6, 2, 2}, {1, 8, 1}, {0, 3, 7}});
  EXPECT_NEAR(balanced_accuracy(cm), accuracy(cm), 1e-15);
}

TEST(RunStatsTest, SampleStandardDeviation) {
  const auto s = run_stats({0.9, 0.8, 1.0});
  EXPECT_NEAR(s.mean, 0.9, 1e-15);
  EXPECT_NEAR(s.std, 0.1, 1e-15);
  EXPECT_EQ(s.min, 0.8);
  EXPECT_EQ(s.max, 1.0);
  EXPECT_EQ(s.n_runs, 3);
}

TEST(RunStatsTest, SingleRunHasZeroSpread) {
  const auto s = run_stats({0.42});
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.min, 0.42);
  EXPECT_EQ(s.max, 0.42);
  EXPECT_EQ(s.mean, 0.42);
  EXPECT_EQ(run_stats({0.5, 0.5, 0.5}).std, 0.0);
  EXPECT_THROW(run_stats({}), ValidationError);
}

TEST(RunStatsTest, PermutationInvariant) {
  std::vector<double> v{0.91, 0.87, 0.95, 0.89, 0.93};
  const auto a = run_stats(v);
  std::reverse(v.begin(), v.end());
  std::swap(v[0], v[3]);
  const auto b = run_stats(v);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.min, b.min);
  EXPECT_EQ(a.max, b.max);
  EXPECT_EQ(a.std, b.std);
}

TEST(MedianRun, LowerMedianTiesBySeed) {
  std::vector<RunRecord> runs{run(1, 0.9, 0), run(2, 0.7, 0), run(3, 0.8, 0), run(4, 0.8, 0)};
  EXPECT_EQ(median_run(runs).seed, 3u);
  runs.pop_back();
  EXPECT_EQ(median_run(runs).seed, 3u);
}

TEST(Techniques, KeysLabelsAndOrder) {
  EXPECT_EQ(parse_technique_id("none").label(), "None");
  EXPECT_EQ(parse_technique_id("occlusion").label(), "Occlusion");
  EXPECT_EQ(parse_technique_id("pix2pix").key(), "pix2pix");
  EXPECT_THROW(parse_technique_id("mixup"), ConfigError);
  std::vector<std::string> keys{"pix2pix", "scaling", "none", "blur", "rotation"};
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return table_rank(parse_technique_id(a)) < table_rank(parse_technique_id(b));
  });
  EXPECT_EQ(keys, (std::vector<std::string>{"none", "blur", "rotation", "scaling", "pix2pix"}));
}

TEST(Report, Formatting) {
  EXPECT_EQ(percent(0.921), "92.1");
  EXPECT_EQ(mean_pm_std(run_stats({0.9, 0.8, 1.0})), "90.0 ± 10.0");
  EXPECT_EQ(display_width("μ ± σ"), 5u);
  EXPECT_EQ(experiment_columns(),
            (std::vector<std::string>{"Augmentation", "# of Samples", "Accuracy μ ± σ (%)", "Min (%)", "Max (%)"}));
}

TEST(Report, TableMatchesGolden) {
  const auto f = fixed_report();
  EXPECT_EQ(render_table(f.experiments), testing_util::read_file(golden("table.txt")));
  EXPECT_EQ(render_sweep_table(*f.sweep), testing_util::read_file(golden("sweep.txt")));
}

TEST(Report, SingleTechniqueGivesOneRowAndOneHeatmap) {
  testing_util::TempDir dir("report_single");
  ResultsFile f;
  f.experiments.push_back(result("contrast", 10, {0.5}));
  const auto files = write_report(f, dir.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "confusion_contrast.png"));
  const auto table = testing_util::read_file(dir / "table.txt");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);  // header, rule, one row
}

TEST(Report, HeatmapIsRowNormalised) {
  testing_util::TempDir dir("heatmap");
  const auto cm = ConfusionMatrix::from_rows({{10, 0}, {5, 5}});
  write_heatmap(cm, dir / "h.png", 4);
  const Image img = read_png(dir / "h.png");
  ASSERT_EQ(img.height(), 8);
  EXPECT_LT(img.at(0, 0, 0), 0.1f);        // full row: darkest colour
  EXPECT_NEAR(img.at(0, 4, 0), 1.0f, 1e-6f);  // empty cell: white
  EXPECT_GT(img.at(4, 0, 0), img.at(0, 0, 0));
  EXPECT_NEAR(img.at(4, 0, 0), img.at(4, 4, 0), 1e-6f);
}

TEST(Results, JsonRoundTrip) {
  testing_util::TempDir dir("results");
  const auto f = fixed_report();
  save_results(f, dir / "results.json");
  const auto back = load_results(dir / "results.json");
  EXPECT_EQ(to_json(back), to_json(f));
  EXPECT_EQ(render_table(back.experiments), render_table(f.experiments));
  ASSERT_TRUE(back.sweep.has_value());
  EXPECT_EQ(back.sweep->cells[1].runs[0].confusion, f.sweep->cells[1].runs[0].confusion);
  EXPECT_THROW(load_results(dir / "absent.json"), IoError);
}

class ToyExperiment : public ::testing::Test {
 protected:
  static ExperimentSetup setup() {
    ExperimentSetup s;
    const auto lib = builtin_library(ShapeFamily::synthetic, 3);
    s.base = make_synthetic_dataset(lib, ShapeFamily::synthetic, 4, 3, 5);
    s.templates = lib;
    s.classifier.num_classes = 3;
    s.classifier.fire_module_widths = {{4, 8}, {4, 8}};
    s.classifier.stem_channels = 8;
    s.train.epochs = 2;
    s.train.batch_size = 8;
    s.train.learning_rate = 1e-3;
    return s;
  }
};

TEST_F(ToyExperiment, SingleRepeat) {
  const auto r = run_experiment(parse_technique_id("contrast"), setup(), {1});
  EXPECT_EQ(r.num_samples, 24u);
  ASSERT_EQ(r.runs.size(), 1u);
  const auto s = accuracy_stats(r.runs);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.min, s.max);
  EXPECT_EQ(r.runs[0].confusion.total(), 9);
}

TEST_F(ToyExperiment, DuplicatedSeedsGiveIdenticalRuns) {
  const auto r = run_experiment(parse_technique_id("none"), setup(), {4, 4});
  EXPECT_EQ(r.num_samples, 12u);
  EXPECT_EQ(r.runs[0].accuracy, r.runs[1].accuracy);
  EXPECT_EQ(r.runs[0].confusion, r.runs[1].confusion);
}

TEST_F(ToyExperiment, Pix2pixNeedsGan) {
  EXPECT_THROW(run_experiment(parse_technique_id("pix2pix"), setup(), {1}), ConfigError);
  EXPECT_THROW(run_experiment(parse_technique_id("none"), setup(), {}), ConfigError);
}

TEST_F(ToyExperiment, OneCellSweep) {
  SweepSetup sw;
  sw.experiment = setup();
  sw.gan_subset_size = 6;
  sw.gan.epochs = 1;
  sw.gan.batch_size = 6;
  sw.generator_base_channels = 4;
  sw.discriminator_base_channels = 4;
  sw.include_baseline = false;
  const auto r = sweep_gan(sw, {{3, 2}}, {1});
  EXPECT_FALSE(r.baseline.has_value());
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0].training_samples, 12u + 6u);
  EXPECT_EQ(r.cells[0].runs.size(), 1u);
}

TEST(GanPool, TriangularStudyPoolSize) {
  Dataset train;
  train.num_classes = 36;
  auto px = std::make_shared<const Image>(2, 2, 0.5f);
  train.samples.assign(61089, ImageSample{px, 0, Split::train, std::nullopt, std::nullopt});
  Dataset generated = train.with_samples({});
  generated.samples.assign(5809, ImageSample{px, 1, Split::train, std::nullopt, std::nullopt});
  EXPECT_EQ(gan_training_pool(train, generated).size(), 66898u);
  generated.samples[0].split = Split::test;
  EXPECT_THROW(gan_training_pool(train, generated), ValidationError);
}

TEST(Grid, FullSweepDomain) {
  const auto g = full_sweep_grid();
  ASSERT_EQ(g.size(), 10u);
  for (const auto& p : g) {
    EXPECT_TRUE(p.discriminator_layers == 3 || p.discriminator_layers == 4);
    EXPECT_TRUE(is_sweep_generator_depth(p.generator_layers));
  }
}
