#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "overlayx/codec.hpp"
#include "overlayx/subprocess.hpp"

using namespace overlayx;
namespace fs = std::filesystem;

namespace {

proc::Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), OVERLAYX_CLI_PATH);
  return proc::run(args);
}

}  // namespace

TEST(Cli, NoSubcommandIsUsageError) {
  EXPECT_EQ(cli({}).exit_code, 1);
  EXPECT_EQ(cli({"extract", "--bogus"}).exit_code, 1);
  EXPECT_EQ(cli({"--help"}).exit_code, 0);
  const auto v = cli({"--version"});
  EXPECT_EQ(v.exit_code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, ConfigProblemsExitOne) {
  proc::TempDir dir;
  EXPECT_EQ(cli({"extract"}).exit_code, 1);
  EXPECT_EQ(cli({"extract", "-i", (dir.path() / "missing").string()}).exit_code, 1);
  EXPECT_EQ(cli({"extract", "-i", dir.path().string(), "--merge-threshold", "0"}).exit_code, 1);
  EXPECT_EQ(cli({"extract", "-i", dir.path().string(), "--dictionary", "/nonexistent/words"}).exit_code, 1);
  std::ofstream(dir.path() / "cfg.json") << R"({"treshold": 1})";
  EXPECT_EQ(cli({"extract", "-c", (dir.path() / "cfg.json").string()}).exit_code, 1);
  EXPECT_EQ(cli({"preprocess", "-m", "sharpen", (dir.path() / "cfg.json").string(), "x.png"}).exit_code, 1);
}

TEST(Cli, StageFailureExitsTwo) {
  proc::TempDir dir;
  const auto video = dir.path() / "broken.mp4";
  std::ofstream(video) << "this is not a video";
  const auto r = cli({"extract", "-i", video.string(), "--source", "video"});
  EXPECT_EQ(r.exit_code, 2) << r.err;
  EXPECT_NE(r.err.find("extract"), std::string::npos);
}

TEST(Cli, EmptyVideoGivesEmptyTranscript) {
  proc::TempDir dir;
  const auto video = dir.path() / "empty.mp4";
  std::ofstream{video};
  const auto r = cli({"extract", "-i", video.string(), "--source", "video"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["entries"].empty());
}

TEST(Cli, FixtureThenExtractAndEval) {
  proc::TempDir dir;
  const auto frames = dir.path() / "frames";
  auto r = cli({"fixture", "--out", frames.string(), "--caption", "breaking news today|storm", "--caption",
                "breaking news today|storm hits"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(frames / "frame_001.png"));

  const auto out = dir.path() / "t.json";
  r = cli({"extract", "-i", frames.string(), "-o", out.string(), "-j", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j["entries"].size(), 1u);
  EXPECT_EQ(j["entries"][0]["text"], "breaking news today storm hits");
  EXPECT_TRUE(fs::exists(out.string() + ".report.json"));

  r = cli({"extract", "-i", frames.string()});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["entries"], j["entries"]);

  const auto report = dir.path() / "eval.json";
  r = cli({"eval", "-i", frames.string(), "-g", (frames / "ground_truth.jsonl").string(), "--json", report.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("total"), std::string::npos);
  std::ifstream rin(report);
  EXPECT_EQ(nlohmann::json::parse(rin)["aggregate"]["f1"], 1.0);
}

TEST(Cli, PreprocessAndSynthgen) {
  proc::TempDir dir;
  const auto in = dir.path() / "in.png";
  codec::write_image(in, Image(20, 10, 3, 90));
  auto r = cli({"preprocess", in.string(), (dir.path() / "out.png").string(), "-m", "otsu"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(codec::read_image(dir.path() / "out.png").channels(), 1);

  std::ofstream(dir.path() / "words.txt") << "breaking news today";
  r = cli({"synthgen", "--words", (dir.path() / "words.txt").string(), "--out", (dir.path() / "ds").string(),
           "--samples-per-word", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "ds" / "manifest.jsonl"));
  EXPECT_TRUE(fs::exists(dir.path() / "ds" / "images" / "000000.jpg"));
}
