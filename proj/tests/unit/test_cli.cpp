#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wedge/cli/app.hpp"
#include "wedge/core/raster_io.hpp"

namespace fs = std::filesystem;
using namespace wedge;
using namespace wedge::cli;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wedge_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++n;
    const fs::path other = b / fs::relative(e.path(), a);
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
  }
  std::size_t m = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) m += e.is_regular_file();
  return n == m && n > 0;
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", "--count", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--count", "x"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", "teapot"}).code, 2);
  EXPECT_EQ(run({"--mode", "GB", "simulate"}).code, 2);
  EXPECT_EQ(run({"--mode", "RG", "--use-nn", "simulate"}).code, 2);
  EXPECT_EQ(run({"reconstruct", "--frame", "f.fras"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ExecutableReportsExitCodes) {
  const std::string exe = WEDGE_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((exe + " simulate --count 0 2>/dev/null").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((exe + " --out /dev/null/x simulate --count 1 2>/dev/null").c_str())), 1);
}

TEST(Cli, SimulateWritesCorpusAndManifest) {
  const fs::path dir = scratch("sim40");
  const CliRun r = run({"--seed", "5", "--out", dir.string(), "simulate", "--count", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("40"), std::string::npos);
  for (int i = 0; i < 40; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "press_%03d", i);
    EXPECT_TRUE(fs::exists(dir / (std::string(name) + "_depth.fras")));
    EXPECT_TRUE(fs::exists(dir / (std::string(name) + "_frame.fras")));
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("count"), 40);
  EXPECT_EQ(manifest.at("seed"), 5);
  ASSERT_EQ(manifest.at("items").size(), 40u);
  EXPECT_TRUE(manifest.at("items")[0].contains("ball_radius"));
  EXPECT_TRUE(manifest.at("items")[0].contains("press_depth"));
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16u);
  fs::remove_all(dir);
}

TEST(Cli, SimulateIsDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  for (const auto& [dir, seed] : {std::pair{a, "3"}, {b, "3"}, {c, "4"}}) {
    ASSERT_EQ(run({"--seed", seed, "--out", dir.string(), "simulate", "--count", "4", "--marker-pitch", "2"}).code, 0);
  }
  EXPECT_TRUE(same_tree(a, b));
  EXPECT_FALSE(same_tree(a, c));
  ASSERT_EQ(run({"--seed", "3", "--out", a.string(), "simulate", "--scenario", "random-surface", "--count", "2"}).code, 0);
  ASSERT_EQ(run({"--seed", "3", "--out", b.string(), "simulate", "--scenario", "random-surface", "--count", "2"}).code, 0);
  EXPECT_TRUE(same_tree(a, b));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(Cli, CalibrateSplitsByPress) {
  const fs::path dir = scratch("calib");
  ASSERT_EQ(run({"--out", (dir / "sim").string(), "simulate", "--count", "10"}).code, 0);
  const CliRun r = run({"--out", dir.string(), "calibrate", "--input", (dir / "sim").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto split = nlohmann::json::parse(slurp(dir / "split.json"));
  EXPECT_EQ(split.at("train").size(), 8u);
  EXPECT_EQ(split.at("test").size(), 2u);
  std::ifstream in(dir / "calibration_train.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "r,g,b,x,y,gx,gy,contact");
  fs::remove_all(dir);
}

TEST(Cli, MissingInputNamesTheFile) {
  const CliRun r = run({"--out", scratch("missing").string(), "reconstruct", "--frame", "/nonexistent/frame.fras",
                     "--background", "/nonexistent/bg.fras", "--mapper", "/nonexistent/m.nnwt"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/nonexistent/"), std::string::npos);
}

TEST(Cli, CorruptWeightsFailAtRuntime) {
  const fs::path dir = scratch("corrupt");
  ASSERT_EQ(run({"--out", (dir / "sim").string(), "simulate", "--count", "1"}).code, 0);
  std::ofstream(dir / "bad.nnwt") << "NNWT garbage";
  const CliRun r = run({"--out", dir.string(), "reconstruct", "--frame", (dir / "sim/press_000_frame.fras").string(),
                     "--background", (dir / "sim/background.fras").string(), "--mapper", (dir / "bad.nnwt").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.nnwt"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileRoundTripsAndBadConfigIsUsageError) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  PipelineConfig cfg;
  cfg.mode = {recon::Lights::RB, true};
  cfg.seed = 77;
  std::ofstream(dir / "cfg.json") << nlohmann::json(cfg).dump(2);
  const PipelineConfig back = load_config(dir / "cfg.json");
  EXPECT_EQ(back.mode, cfg.mode);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(config_hash(nlohmann::json(back)), config_hash(nlohmann::json(cfg)));

  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(run({"--config", (dir / "broken.json").string(), "simulate"}).code, 2);
  std::ofstream(dir / "badmode.json") << R"({"mode": "RG", "use_completion": true})";
  EXPECT_EQ(run({"--config", (dir / "badmode.json").string(), "simulate"}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, CubeSequenceTracks) {
  const fs::path dir = scratch("cube");
  ASSERT_EQ(run({"--out", (dir / "seq").string(), "simulate", "--scenario", "cube-sequence", "--count", "4"}).code, 0);
  const CliRun r = run({"--out", dir.string(), "track", "--input", (dir / "seq").string(), "--model",
                     (dir / "seq/model.csv").string(), "--init", (dir / "seq/init_pose.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "track.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "frame,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,residual_mm,iters");
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  EXPECT_EQ(rows, 4);
  fs::remove_all(dir);
}
