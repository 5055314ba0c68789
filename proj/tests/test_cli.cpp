#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "docmine/embedding.hpp"
#include "docmine/text_io.hpp"
#include "planted.hpp"
#include "temp_dir.hpp"

using namespace docmine;
using docmine::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(DOCMINE_CLI_PATH) + " " + args + " > '" + log.string() +
                          "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) { return read_lines(p); }

/// Small planted fixture shared by the tests in this file.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    docmine::testing::PlantedSpec spec;
    spec.true_pairs = 12;
    spec.noise_pool_per_side = 8;
    spec.chunks_per_doc = 4;
    spec.signal_dim = 32;
    docmine::testing::write_fixture(docmine::testing::make_planted(spec), dir_->path());
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static fs::path fx(const std::string& name) { return dir_->path() / name; }

  static std::string align_args(const fs::path& out) {
    return "align --src-manifest " + fx("src.jsonl").string() + " --tgt-manifest " +
           fx("tgt.jsonl").string() + " --src-embeddings " + fx("src.demb").string() +
           " --tgt-embeddings " + fx("tgt.demb").string() + " --src-noise-manifest " +
           fx("src_noise.jsonl").string() + " --tgt-noise-manifest " +
           fx("tgt_noise.jsonl").string() + " --out-dir " + out.string();
  }

  static std::string sweep_args(const fs::path& out) {
    auto a = align_args(out);
    return "sweep" + a.substr(5) + " --gold " + fx("gold.tsv").string();
  }

  TempDir work_;
  fs::path log_ = work_ / "log.txt";

 private:
  static inline TempDir* dir_ = nullptr;
};

}  // namespace

TEST_F(CliTest, SegmentWritesCeilCountsPerDocument) {
  const auto out = work_ / "units.tsv";
  ASSERT_EQ(run("segment --manifest " + fx("src.jsonl").string() + " -g 3 -o " + out.string(), log_), 0)
      << slurp(log_);
  const auto rows = lines(out);
  EXPECT_EQ(rows.size(), 12u * 2u);  // ceil(4 / 3) per document
  EXPECT_EQ(rows[0].substr(0, rows[0].find('\t')), "s0000#0");
  EXPECT_EQ(rows[1].substr(0, rows[1].find('\t')), "s0000#1");
}

TEST_F(CliTest, SegmentRejectsZeroGranularity) {
  const auto out = work_ / "units.tsv";
  EXPECT_EQ(run("segment --manifest " + fx("src.jsonl").string() + " -g 0 -o " + out.string(), log_), 1);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, MissingManifestFailsBeforeAnyOutput) {
  const auto out = work_ / "run";
  auto args = align_args(out);
  args.replace(args.find("src.jsonl"), 9, "nope.jsonl");
  EXPECT_EQ(run(args, log_), 1);
  EXPECT_NE(slurp(log_).find("nope.jsonl"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, AlignDacRecoversPlantedPairs) {
  const auto out = work_ / "run";
  ASSERT_EQ(run(align_args(out) + " --gold " + fx("gold.tsv").string(), log_), 0) << slurp(log_);
  const auto report = lines(out / "report.tsv");
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report[1], "0.100000\t12\t12\t12\t1.000000\t1.000000\t1.000000");
  EXPECT_EQ(lines(out / "pairs.tsv").size(), 12u);
  EXPECT_EQ(lines(out / "pairs.tsv")[0], "s0000\tt0000\t4\t4\t4\t1.000000");
  const auto cfg = nlohmann::json::parse(slurp(out / "config.json"));
  EXPECT_EQ(cfg["mode"], "dac");
  EXPECT_EQ(cfg["k"], 16);
}

TEST_F(CliTest, AlignPooledLidfRecordsMethod) {
  const auto out = work_ / "run";
  ASSERT_EQ(run(align_args(out) + " --mode pooled --method LIDF --report-format json --gold " +
                    fx("gold.tsv").string(),
                log_),
            0)
      << slurp(log_);
  const auto cfg = nlohmann::json::parse(slurp(out / "config.json"));
  EXPECT_EQ(cfg["mode"], "pooled");
  EXPECT_EQ(cfg["method"], "LIDF");
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  ASSERT_EQ(report.size(), 1u);
  for (const char* key : {"threshold", "tp", "predicted", "gold", "precision", "recall", "f1"}) {
    EXPECT_TRUE(report[0].contains(key)) << key;
  }
  EXPECT_EQ(report[0]["recall"], 1.0);
  const auto pairs = lines(out / "pairs.tsv");
  ASSERT_FALSE(pairs.empty());
  EXPECT_EQ(split_tabs(pairs[0]).size(), 4u);
}

TEST_F(CliTest, AlignWithoutGoldWritesNoReport) {
  const auto out = work_ / "run";
  ASSERT_EQ(run(align_args(out), log_), 0) << slurp(log_);
  EXPECT_TRUE(fs::exists(out / "pairs.tsv"));
  EXPECT_TRUE(fs::exists(out / "config.json"));
  EXPECT_FALSE(fs::exists(out / "report.tsv"));
}

TEST_F(CliTest, AlignIsIndependentOfWorkerCount) {
  const auto a = work_ / "a", b = work_ / "b";
  const auto gold = " --gold " + fx("gold.tsv").string();
  ASSERT_EQ(run(align_args(a) + gold + " -j 1", log_), 0);
  ASSERT_EQ(run(align_args(b) + gold + " -j 8", log_), 0);
  EXPECT_EQ(slurp(a / "pairs.tsv"), slurp(b / "pairs.tsv"));
  EXPECT_EQ(slurp(a / "report.tsv"), slurp(b / "report.tsv"));
}

TEST_F(CliTest, ScalarIsaGivesSameOutput) {
  const auto a = work_ / "a", b = work_ / "b";
  ASSERT_EQ(run(align_args(a), log_), 0);
  ASSERT_EQ(run("--isa scalar " + align_args(b), log_), 0) << slurp(log_);
  EXPECT_EQ(slurp(a / "pairs.tsv"), slurp(b / "pairs.tsv"));
}

TEST_F(CliTest, SweepDefaultsToElevenThresholds) {
  const auto out = work_ / "sweep";
  ASSERT_EQ(run(sweep_args(out), log_), 0) << slurp(log_);
  const auto rows = lines(out / "sweep.tsv");
  ASSERT_EQ(rows.size(), 12u);
  double prev_recall = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split_tabs(rows[i]);
    EXPECT_EQ(f[0], fixed6((i - 1) / 10.0));
    const double recall = std::stod(std::string(f[5]));
    EXPECT_LE(recall, prev_recall);
    prev_recall = recall;
  }
}

TEST_F(CliTest, SingleThresholdSweepEqualsAlignReport) {
  const auto s = work_ / "sweep", a = work_ / "align";
  ASSERT_EQ(run(sweep_args(s) + " --thresholds 0.3", log_), 0) << slurp(log_);
  ASSERT_EQ(run(align_args(a) + " --threshold 0.3 --gold " + fx("gold.tsv").string(), log_), 0);
  EXPECT_EQ(slurp(s / "sweep.tsv"), slurp(a / "report.tsv"));
}

TEST_F(CliTest, SweepRejectsUnsortedThresholds) {
  const auto out = work_ / "sweep";
  EXPECT_EQ(run(sweep_args(out) + " --thresholds 0.5,0.1", log_), 1);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, ConfigFileValuesYieldToFlags) {
  const auto out = work_ / "run";
  write_text_file(work_ / "cfg.toml", "[align]\nthreshold = 0.7\nk = 3\n");
  ASSERT_EQ(run("--config " + (work_ / "cfg.toml").string() + " " + align_args(out) +
                    " --threshold 0.2",
                log_),
            0)
      << slurp(log_);
  const auto cfg = nlohmann::json::parse(slurp(out / "config.json"));
  EXPECT_EQ(cfg["threshold"], 0.2);
  EXPECT_EQ(cfg["k"], 3);
}

TEST_F(CliTest, EvaluateScoresPairsFile) {
  const auto out = work_ / "run";
  ASSERT_EQ(run(align_args(out), log_), 0);
  ASSERT_EQ(run("evaluate --pairs " + (out / "pairs.tsv").string() + " --gold " +
                    fx("gold.tsv").string() + " -o " + (work_ / "eval.tsv").string(),
                log_),
            0)
      << slurp(log_);
  EXPECT_EQ(lines(work_ / "eval.tsv")[1], "-\t12\t12\t12\t1.000000\t1.000000\t1.000000");
}

TEST_F(CliTest, ImportEmbeddingsFollowsUnitsOrder) {
  write_text_file(work_ / "units.tsv", "d#0\thello\nd#1\tworld\n");
  write_text_file(work_ / "vec.txt", "d#1\t0 2\nd#0\t3 4\n");
  const auto out = work_ / "m.demb";
  ASSERT_EQ(run("import-embeddings --vectors " + (work_ / "vec.txt").string() + " --units " +
                    (work_ / "units.tsv").string() + " -o " + out.string(),
                log_),
            0)
      << slurp(log_);
  const auto m = read_matrix(out);
  EXPECT_EQ(m.ids(), (std::vector<std::string>{"d#0", "d#1"}));
  EXPECT_NEAR(m.row(0)[1], 0.8f, 1e-7);  // rows are normalized on import

  write_text_file(work_ / "vec2.txt", "d#1\t0 2\n");
  EXPECT_NE(run("import-embeddings --vectors " + (work_ / "vec2.txt").string() + " --units " +
                    (work_ / "units.tsv").string() + " -o " + (work_ / "x.demb").string(),
                log_),
            0);
}

TEST_F(CliTest, PoolWritesDocumentMatrix) {
  const auto out = work_ / "pooled.demb";
  ASSERT_EQ(run("pool --manifest " + fx("src.jsonl").string() + " --embeddings " +
                    fx("src.demb").string() + " --method LP -o " + out.string(),
                log_),
            0)
      << slurp(log_);
  const auto m = read_matrix(out);
  EXPECT_EQ(m.rows(), 12u);
  EXPECT_EQ(m.id(0), "s0000");
  EXPECT_TRUE(is_normalized(m, 1e-6));
}

TEST_F(CliTest, StructuredErrorAndExitCodes) {
  EXPECT_EQ(run("", log_), 1);
  EXPECT_EQ(run("align --bogus", log_), 1);
  const auto out = work_ / "run";
  write_text_file(work_ / "empty.demb", "DEMB");
  auto args = align_args(out);
  args.replace(args.find(fx("src.demb").string()), fx("src.demb").string().size(),
               (work_ / "empty.demb").string());
  EXPECT_EQ(run(args, log_), 2);
  EXPECT_NE(slurp(log_).find("module=embed_store"), std::string::npos) << slurp(log_);
}
