#include <fstream>
#include <sstream>

#include "pose_eval/cli.hpp"
#include "pose_eval/csv.hpp"
#include "test_support.hpp"

namespace pose_eval {
namespace {

using testing::data_dir;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pose-eval");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string without_metadata(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  while (std::getline(in, line)) {
    if (!line.starts_with("#")) body += line + "\n";
  }
  return body;
}

std::string fixture(const std::string& name) { return (data_dir() / "fixtures" / name).string(); }

std::string oracle(const std::string& name) {
  return read_text_file(data_dir() / "fixtures" / "oracle" / name);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("pose_eval_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(Cli, ScoringAFileAgainstItselfIsZero) {
  const auto f = fixture("two_hands_25fps.posec");
  const auto r = run({"score", f, f, "-m", "DTWp", "-m", "nAPE"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.starts_with("# pose-eval 0.1.0\n# command: score\n")) << r.out;
  EXPECT_NE(r.out.find("DTW+Trim+MaskFill10.0+Hands-Only\t0.0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("APE+Norm+PadZero+DropWorld+Hide0.5+PairZeroFill+Reduced\t0.0\n"),
            std::string::npos)
      << r.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"score", "missing.posec", "missing.posec", "-m", "DTW"}).code, 1);
  const auto f = fixture("two_hands_25fps.posec");
  EXPECT_EQ(run({"score", f, f, "-m", "APE+PadBanana"}).code, 2);
  EXPECT_EQ(run({"score", f, f}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"--version"}).code, 0);
  const auto missing = run({"correlate", "--ratings", fixture("ratings.csv"), "--scores", "nope.csv"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("nope.csv"), std::string::npos) << missing.err;
}

TEST_F(Cli, CorrelateMatchesOracleFiles) {
  const auto r = run({"correlate", "--ratings", fixture("ratings.csv"), "--scores", fixture("scores.csv"),
                      "-o", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(without_metadata(read_text_file(dir_ / "correlation.csv")), oracle("expected_correlation.csv"));
  EXPECT_EQ(without_metadata(read_text_file(dir_ / "absolute.csv")), oracle("expected_absolute.csv"));
}

TEST_F(Cli, AgreementMatchesOracleFile) {
  const auto r = run({"agreement", "--ratings", fixture("ratings.csv"), "--repeats", fixture("repeats.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(without_metadata(r.out), oracle("expected_agreement.txt"));
}

TEST_F(Cli, ConfigPathsAndSeed) {
  const auto cfg = (data_dir() / "example_run.ini").string();
  const auto r = run({"--config", cfg, "agreement"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# seed: 7\n"), std::string::npos) << r.out;
  const auto flag = run({"--config", cfg, "agreement", "--seed", "3"});
  EXPECT_NE(flag.out.find("# seed: 3\n"), std::string::npos) << flag.out;
  std::ofstream(dir_ / "bad.ini") << "[nonsense]\nx = 1\n";
  EXPECT_EQ(run({"--config", (dir_ / "bad.ini").string(), "agreement"}).code, 2);
}

TEST_F(Cli, GridExpandListsTheStudyGrid) {
  const auto r = run({"grid", "expand", "--study-grid"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# cross_product: 64\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("# variants: 48\n"), std::string::npos) << r.out;
  EXPECT_EQ(without_metadata(r.out).size() > 0, true);
  std::size_t lines = 0;
  for (char c : without_metadata(r.out)) lines += c == '\n';
  EXPECT_EQ(lines, 48u);
}

TEST_F(Cli, TextScoresMatchOracle) {
  const auto r = run({"text", "--pairs", fixture("text_pairs_20.csv"), "--segment-scores", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("BLEU\t40.498093\tnrefs:1|case:mixed|eff:yes|tok:13a|smooth:exp|version:2.3.1"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("chrF\t59.929291\t"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "bleu.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "chrf.csv"));
}

TEST_F(Cli, RetrievalOutputIsIndependentOfThreadCount) {
  ASSERT_EQ(run({"synth", "--kind", "separable", "-o", (dir_ / "corpus").string()}).code, 0);
  const auto manifest = (dir_ / "corpus" / "manifest.tsv").string();
  const auto one = run({"retrieval", "--manifest", manifest, "-m", "DTWp", "-m", "APE+PadZero+Hands-Only",
                        "--threads", "1", "-o", (dir_ / "one").string()});
  const auto four = run({"retrieval", "--manifest", manifest, "-m", "DTWp", "-m", "APE+PadZero+Hands-Only",
                         "--threads", "4", "-o", (dir_ / "four").string()});
  ASSERT_EQ(one.code, 0) << one.err;
  ASSERT_EQ(four.code, 0) << four.err;
  EXPECT_EQ(one.out, four.out);
  for (const auto& entry : std::filesystem::directory_iterator(dir_ / "one")) {
    EXPECT_EQ(read_text_file(entry.path()), read_text_file(dir_ / "four" / entry.path().filename()))
        << entry.path();
  }
}

TEST_F(Cli, BatchScoringWritesAScoreTable) {
  const auto f = fixture("two_hands_25fps.posec");
  std::ofstream(dir_ / "batch.tsv") << "segment\tsystem\tlanguage\thyp\tref\n"
                                    << "s1\tsys\ten\t" << f << "\t" << f << "\n";
  const auto r = run({"score", "--batch", (dir_ / "batch.tsv").string(), "-m", "DTWp"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("s1,sys,en,DTW+Trim+MaskFill10.0+Hands-Only,0"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace pose_eval
