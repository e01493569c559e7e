// End-to-end checks that need trained mappers and the completion fixture.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wedge/cli/app.hpp"
#include "wedge/core/raster_io.hpp"
#include "wedge/imgproc/contact.hpp"
#include "wedge/nnet/weights_io.hpp"
#include "wedge/recon/ablation.hpp"
#include "wedge/recon/calibration.hpp"
#include "wedge/recon/reconstruct.hpp"
#include "wedge/sim/ball_press.hpp"
#include "wedge/sim/render.hpp"

namespace fs = std::filesystem;
using namespace wedge;
using namespace wedge::recon;

namespace {

struct Trained {
  sim::SensorConfig cfg = sim::SensorConfig::wedge_rgb();
  std::vector<PressRecord> presses;
  CalibrationSet set;
  TrainedComponents comp;
  AblationReport report;
};

const Trained& trained() {
  static const Trained t = [] {
    Trained t;
    t.presses = render_presses(random_presses(40, t.cfg, 1), t.cfg);
    t.set = build_calibration_set(t.presses, t.cfg, 1);
    for (Lights l : {Lights::RGB, Lights::RG, Lights::RB, Lights::R}) {
      auto tc = nnet::TrainConfig::mlp_defaults();
      tc.seed = 1;
      t.comp.mappers[l] = train_mapper(t.set.train, {l, false}, tc).weights;
    }
    t.comp.completion = nnet::load_encdec(WEDGE_COMPLETION_WEIGHTS);
    std::vector<PressRecord> test;
    for (auto i : t.set.test_presses) test.push_back(t.presses[i]);
    t.report = ablate_configs(test, t.cfg, t.comp, {Lights::RGB, Lights::RG, Lights::RB, Lights::R});
    return t;
  }();
  return t;
}

struct Peak {
  double depth;
  int row, col;
};

Peak peak_of(const DepthMap& d) {
  Peak p{-1e9, 0, 0};
  for (int r = 0; r < d.height(); ++r)
    for (int c = 0; c < d.width(); ++c)
      if (d.at(r, c) > p.depth) p = {d.at(r, c), r, c};
  return p;
}

}  // namespace

TEST(Mapper, BlankDiffMapsNearZero) {
  const auto& t = trained();
  const TactileFrame zero(t.cfg.height, t.cfg.width);
  // Modes that see both axes; RB and R cannot tell a blank pixel from some slopes.
  for (Lights l : {Lights::RGB, Lights::RG}) {
    const GradientField g = color_to_gradients(zero, t.comp.mappers.at(l), {l, false});
    float worst = 0.0f;
    for (float v : g.data()) worst = std::max(worst, std::abs(v));
    EXPECT_LE(worst, 0.02f) << to_string(l);
  }
}

TEST(Mapper, RgbMeetsErrorBounds) {
  const auto& e = trained().report.row(Lights::RGB, false).errors;
  EXPECT_LE(e.gx_rmse, 0.043);
  EXPECT_LE(e.theta_x_deg, 2.248);
}

TEST(Mapper, RedOnlyWithoutCompletionIsAtLeastTwiceWorse) {
  const auto& rep = trained().report;
  EXPECT_GE(rep.row(Lights::R, false).errors.gx_rmse, 2.0 * rep.row(Lights::RGB, false).errors.gx_rmse);
}

TEST(Completion, RedBlueWithNetworkMeetsErrorTarget) {
  const auto& rep = trained().report;
  EXPECT_LE(rep.row(Lights::RB, true).errors.gx_rmse, 0.051);
  EXPECT_GE(rep.row(Lights::RB, false).errors.gx_rmse, 0.106);
}

TEST(Ablation, OrderingAndGyUnaffected) {
  const auto& rep = trained().report;
  EXPECT_EQ(rep.rows.size(), 6u);
  const double rgb = rep.row(Lights::RGB, false).errors.gx_rmse;
  const double rg = rep.row(Lights::RG, false).errors.gx_rmse;
  const double rb_nn = rep.row(Lights::RB, true).errors.gx_rmse;
  const double r_nn = rep.row(Lights::R, true).errors.gx_rmse;
  EXPECT_LE(rgb, rg);
  EXPECT_LE(rg, rb_nn);
  EXPECT_LE(rb_nn, r_nn);
  EXPECT_LE(std::abs(rep.row(Lights::RB, true).errors.gy_rmse - rep.row(Lights::RB, false).errors.gy_rmse), 0.002);
}

TEST(Reconstruct, BlankFrameIsFlat) {
  const auto& t = trained();
  const TactileFrame bg = sim::render_background(t.cfg);
  const Reconstruction r = reconstruct(bg, bg, t.comp.mappers.at(Lights::RGB), nullptr, {Lights::RGB, false});
  EXPECT_LE(peak_of(r.depth).depth, 0.05);
  EXPECT_EQ(count_set(r.contact), 0u);
}

TEST(Reconstruct, BallPressPeakDepthAndLocation) {
  const auto& t = trained();
  const sim::BallPress press;
  const auto img = sim::gen_ball_press(press, t.cfg);
  const TactileFrame frame = sim::render_frame(img.depth, t.cfg);
  const TactileFrame bg = sim::render_background(t.cfg);

  const Reconstruction rgb = reconstruct(frame, bg, t.comp.mappers.at(Lights::RGB), nullptr, {Lights::RGB, false});
  const Peak p = peak_of(rgb.depth);
  const double rgb_err = std::abs(p.depth - press.press_depth);
  EXPECT_LE(rgb_err, 0.15 * press.press_depth);
  EXPECT_LE(std::hypot(p.row - 75.0, p.col - 100.0), 2.0);

  const Reconstruction red = reconstruct(frame, bg, t.comp.mappers.at(Lights::R), &*t.comp.completion, {Lights::R, true});
  EXPECT_LE(std::abs(peak_of(red.depth).depth - press.press_depth), 2.0 * rgb_err);
}

TEST(Cli, ScriptedAblationPipeline) {
  const fs::path dir = fs::temp_directory_path() / "wedge_pipeline_cli";
  fs::remove_all(dir);
  auto run = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    EXPECT_EQ(code, 0) << err.str();
    return out.str();
  };
  const std::string d = dir.string();
  run({"--seed", "1", "--out", d + "/sim", "simulate", "--count", "40"});
  run({"--seed", "1", "--out", d, "calibrate", "--input", d + "/sim"});
  for (const char* m : {"RGB", "RG", "RB", "R"})
    run({"--seed", "1", "--out", d, "train-mapper", "--mode", m, "--samples", d + "/calibration_train.csv"});
  run({"--out", d, "ablate", "--input", d + "/sim", "--split", d + "/split.json", "--mappers", d, "--completion",
       WEDGE_COMPLETION_WEIGHTS, "--modes", "RGB,RG,RB,R"});

  std::ifstream in(dir / "ablation.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "mode,use_nn,gx_rmse,gy_rmse,theta_x_deg,theta_y_deg,gx_mae,gy_mae");
  std::map<std::string, double> gx;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string mode, nn, v;
    std::getline(ss, mode, ',');
    std::getline(ss, nn, ',');
    std::getline(ss, v, ',');
    gx[mode + nn] = std::stod(v);
  }
  ASSERT_EQ(gx.size(), 6u);
  EXPECT_LE(gx["RGB0"], gx["RG0"]);
  EXPECT_LE(gx["RG0"], gx["RB1"]);
  EXPECT_LE(gx["RB1"], gx["R1"]);
  EXPECT_GE(gx["RB0"], 2.0 * gx["RB1"]);

  // Blank input through the CLI.
  const std::string out = run({"--out", d + "/blank", "reconstruct", "--frame",
                               d + "/sim/background.fras", "--background", d + "/sim/background.fras", "--mapper",
                               d + "/mapper_RGB.nnwt"});
  EXPECT_NE(out.find("no contact"), std::string::npos);
  const DepthMap depth = read_fras<1>(dir / "blank/depth.fras");
  EXPECT_LE(peak_of(depth).depth, 0.05);
  fs::remove_all(dir);
}
