#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "augbench/cli.hpp"
#include "test_util.hpp"

using namespace augbench;
using testing_util::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "augbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary itself so exit statuses are checked end to end.
int run_binary(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(AUGBENCH_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> tiny_experiment(const TempDir& dir, const std::string& name) {
  return {"--output-dir", dir.path().string(), "--name",   name, "--classes", "2", "--train-per-class", "3",
          "--test-per-class", "2", "--cls-epochs", "1", "--gan-epochs", "1", "--repeats", "2"};
}

}  // namespace

TEST(Binary, RenderOneClass) {
  TempDir dir("cli_render");
  EXPECT_EQ(run_binary("render --family circular --class 22 --out " + (dir / "t.png").string(), dir / "log"), 0);
  const Image img = read_png(dir / "t.png");
  EXPECT_EQ(img.height(), 64);
}

TEST(Binary, MissingManifestExitsOneAndNamesPath) {
  TempDir dir("cli_missing");
  const auto missing = dir / "nowhere" / "manifest.json";
  EXPECT_EQ(run_binary("cls-train --manifest " + missing.string() + " --out " + (dir / "o").string(), dir / "log"), 1);
  EXPECT_NE(testing_util::read_file(dir / "log").find(missing.string()), std::string::npos);
}

TEST(Binary, UsageErrorsExitTwo) {
  TempDir dir("cli_usage");
  EXPECT_EQ(run_binary("frobnicate", dir / "log"), 2);
  EXPECT_EQ(run_binary("render --no-such-flag", dir / "log"), 2);
  EXPECT_EQ(run_binary("", dir / "log"), 2);
  EXPECT_EQ(run_binary("--help", dir / "log"), 0);
}

TEST(Cli, RenderAllClassesToDirectory) {
  TempDir dir("cli_render_all");
  const auto r = run({"render", "--family", "triangular", "--out", (dir / "tri").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "tri" / "class_15.png"));
  EXPECT_FALSE(std::filesystem::exists(dir / "tri" / "class_16.png"));
}

TEST(Cli, SynthAugmentAndTrainPipeline) {
  TempDir dir("cli_pipeline");
  auto r = run({"synth-data", "--classes", "3", "--train-per-class", "2", "--test-per-class", "1", "--out",
                (dir / "data").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "data" / "reproducibility.json"));
  const Dataset base = load_dataset(dir / "data" / "manifest.json");
  EXPECT_EQ(base.size(), 9u);

  r = run({"augment", "--manifest", (dir / "data" / "manifest.json").string(), "--technique", "rotation", "--range",
           "-5:5", "--out", (dir / "aug").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset aug = load_dataset(dir / "aug" / "manifest.json");
  EXPECT_EQ(aug.split(Split::train).size(), 12u);
  EXPECT_EQ(aug.split(Split::test).size(), 3u);

  r = run({"cls-train", "--manifest", (dir / "aug" / "manifest.json").string(), "--epochs", "1", "--out",
           (dir / "cls").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "cls" / "classifier.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "cls" / "reproducibility.json"));
}

TEST(Cli, AugmentRejectsInvertedRange) {
  TempDir dir("cli_bad_range");
  ASSERT_EQ(run({"synth-data", "--classes", "2", "--train-per-class", "1", "--test-per-class", "1", "--out",
                 (dir / "data").string()})
                .code,
            0);
  const auto r = run({"augment", "--manifest", (dir / "data" / "manifest.json").string(), "--technique", "contrast",
                      "--range", "1.4:0.6", "--out", (dir / "aug").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("inverted range"), std::string::npos);
}

TEST(Cli, GanTrainAndGenerate) {
  TempDir dir("cli_gan");
  ASSERT_EQ(run({"synth-data", "--classes", "2", "--train-per-class", "2", "--test-per-class", "0", "--out",
                 (dir / "data").string()})
                .code,
            0);
  auto r = run({"gan-train", "--manifest", (dir / "data" / "manifest.json").string(), "--generator-layers", "2",
                "--generator-channels", "4", "--discriminator-channels", "4", "--epochs", "1", "--out",
                (dir / "gan").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"gan-generate", "--checkpoint", (dir / "gan" / "gan.ckpt").string(), "--novel", "--out",
           (dir / "probe").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "probe" / "index.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "probe" / "novel_00_generated.png"));
}

TEST(Cli, TinySweepHasFourCells) {
  TempDir dir("cli_sweep");
  auto args = tiny_experiment(dir, "sweep");
  args.insert(args.begin(), "sweep");
  args.insert(args.end(), {"--grid", "3,4x2,4"});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto results = load_results(dir / "sweep" / "results.json");
  ASSERT_TRUE(results.sweep.has_value());
  EXPECT_EQ(results.sweep->cells.size(), 4u);
  EXPECT_TRUE(results.sweep->baseline.has_value());
  for (const auto& c : results.sweep->cells) EXPECT_EQ(c.runs.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep" / "reports" / "sweep.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep" / "reports" / "confusion_gan_d4_g4.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep" / "reproducibility.json"));
}

TEST(Cli, EvaluateIsDeterministicAndReportRerenders) {
  TempDir dir("cli_eval");
  for (const std::string name : {"a", "b"}) {
    auto args = tiny_experiment(dir, name);
    args.insert(args.begin(), "evaluate");
    args.insert(args.end(), {"--techniques", "none", "contrast", "pix2pix"});
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto table_a = testing_util::read_file(dir / "a" / "reports" / "table.txt");
  EXPECT_EQ(table_a, testing_util::read_file(dir / "b" / "reports" / "table.txt"));
  EXPECT_EQ(testing_util::read_file(dir / "a" / "results.json"), testing_util::read_file(dir / "b" / "results.json"));
  EXPECT_NE(table_a.find("pix2pix"), std::string::npos);

  const auto repro = nlohmann::json::parse(testing_util::read_file(dir / "a" / "reproducibility.json"));
  EXPECT_TRUE(repro.contains("settings"));
  EXPECT_TRUE(repro.contains("versions"));
  EXPECT_TRUE(repro.contains("seeds"));

  const auto r = run({"report", "--results", (dir / "a" / "results.json").string(), "--out", (dir / "re").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing_util::read_file(dir / "re" / "table.txt"), table_a);
}

TEST(Config, DefaultMatchesGolden) {
  EXPECT_EQ(to_json(ExperimentConfig{}).dump(2) + "\n",
            testing_util::read_file(std::filesystem::path(AUGBENCH_GOLDEN_DIR) / "default_config.json"));
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  ExperimentConfig c;
  c.name = "x";
  c.repeats = 2;
  c.techniques = {"none", "blur"};
  c.ranges[Technique::blur] = {{0.1, 0.2}};
  const auto j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  auto bad = j;
  bad["classifer"] = nlohmann::json::object();
  EXPECT_THROW(config_from_json(bad), ConfigError);
}

TEST(Config, ValidationErrors) {
  ExperimentConfig c;
  c.repeats = 2;
  c.seeds = {1, 1};
  EXPECT_THROW(validate(c), ConfigError);
  c.seeds = {1, 2, 3};
  EXPECT_THROW(validate(c), ConfigError);
  c = ExperimentConfig{};
  c.manifest = "/definitely/not/here.json";
  EXPECT_THROW(validate(c), IoError);
}

TEST(Cli, Parsers) {
  const auto g = cli_detail::parse_grid("3,4x2,4");
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g[0].discriminator_layers, 3);
  EXPECT_EQ(g[0].generator_layers, 2);
  EXPECT_THROW(cli_detail::parse_grid("3x"), ConfigError);
  const auto iv = cli_detail::parse_interval("-1.5:2");
  EXPECT_EQ(iv.lo, -1.5);
  EXPECT_EQ(iv.hi, 2.0);
  EXPECT_THROW(cli_detail::parse_interval("3"), ConfigError);
}
