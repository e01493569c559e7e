// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <Eigen/LU>

#include "wedge/cli/app.hpp"
#include "wedge/core/gradients.hpp"
#include "wedge/core/raster_io.hpp"
#include "wedge/imgproc/inpaint.hpp"
#include "wedge/nnet/weights_io.hpp"
#include "wedge/pose/cube.hpp"
#include "wedge/pose/icp.hpp"
#include "wedge/recon/ablation.hpp"
#include "wedge/recon/calibration.hpp"
#include "wedge/recon/completion.hpp"
#include "wedge/recon/poisson.hpp"
#include "wedge/recon/reconstruct.hpp"
#include "wedge/sim/ball_press.hpp"
#include "wedge/sim/render.hpp"
#include "wedge/sim/markers.hpp"
#include "wedge/sim/surfaces.hpp"

namespace fs = std::filesystem;
using namespace wedge;
using namespace wedge::recon;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const sim::SensorConfig kSensor = sim::SensorConfig::wedge_rgb();
const std::vector<Lights> kAllModes{Lights::RGB, Lights::RG, Lights::RB, Lights::R};

// ---------------------------------------------------------------------------
// 1. dense oracle

Eigen::VectorXd interior_divergence(const GradientField& g) {
  const int h = g.height(), w = g.width(), m = w - 2;
  Eigen::VectorXd d((h - 2) * m);
  for (int r = 1; r < h - 1; ++r)
    for (int c = 1; c < w - 1; ++c)
      d((r - 1) * m + c - 1) = 0.5 * (double(g.at(r, c + 1, 0)) - g.at(r, c - 1, 0)) +
                               0.5 * (double(g.at(r + 1, c, 1)) - g.at(r - 1, c, 1));
  return d;
}

Eigen::MatrixXd dense_poisson(const GradientField& g) {
  const int h = g.height(), w = g.width(), n = h - 2, m = w - 2;
  Eigen::MatrixXd a(n * m, n * m);
  for (int k = 0; k < n * m; ++k) {
    DepthMap e(h, w);
    e.at(k / m + 1, k % m + 1) = 1.0f;
    a.col(k) = interior_divergence(depth_to_gradients(e, 1.0));
  }
  const Eigen::VectorXd z = a.fullPivLu().solve(interior_divergence(g));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(h, w);
  for (int k = 0; k < n * m; ++k) out(k / m + 1, k % m + 1) = z(k);
  return out;
}

Outcome poisson_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  double worst = 0.0, spectral_s = 0.0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 25; ++k) {
    const int n = k % 2 ? 16 : 8;
    GradientField g(n, n);
    for (auto& v : g.data()) v = static_cast<float>(nd(rng));
    const auto ts = Clock::now();
    const Eigen::MatrixXd fast = poisson_solve_f64(g);
    spectral_s += seconds_since(ts);
    worst = std::max(worst, (fast - dense_poisson(g)).cwiseAbs().maxCoeff());
  }
  const double total = seconds_since(t0);
  return {worst <= 1e-9 && total < 1.0,
          fmt("max |spectral - dense| = %.3g (<= 1e-9), %.3f s total (< 1 s, spectral %.4f s)", worst, total, spectral_s)};
}

// ---------------------------------------------------------------------------
// 2. round trip

Outcome round_trip() {
  const auto t0 = Clock::now();
  double worst_ratio = 0.0;
  for (int k = 0; k < 50; ++k) {
    sim::SurfaceGenParams p;
    p.seed = 1000 + static_cast<std::uint64_t>(k);
    const DepthMap d = sim::gen_random_surface(96, 128, p, kSensor.ppmm);
    const DepthMap z = poisson_solve(depth_to_gradients(d, kSensor.ppmm), kSensor.ppmm);
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < d.data().size(); ++i) {
      peak = std::max(peak, double(d.data()[i]));
      err = std::max(err, std::abs(double(z.data()[i]) - d.data()[i]));
    }
    worst_ratio = std::max(worst_ratio, err / peak);
  }
  const double t = seconds_since(t0);
  return {worst_ratio <= 0.02 && t < 10.0,
          fmt("worst max-abs error %.3g%% of peak height (<= 2%%), %.2f s (< 10 s)", 100 * worst_ratio, t)};
}

// ---------------------------------------------------------------------------
// 3-6. mapper / completion pipeline

struct SeedRun {
  std::vector<PressRecord> presses;
  CalibrationSet set;
  TrainedComponents comp;
  AblationReport report;
  double rgb_train_eval_s = 0.0;
};

std::vector<PressRecord> select(const std::vector<PressRecord>& all, const std::vector<std::size_t>& idx) {
  std::vector<PressRecord> out;
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

SeedRun run_seed(std::uint64_t seed, const nnet::EncDecWeights& completion) {
  SeedRun s;
  s.presses = render_presses(random_presses(40, kSensor, seed), kSensor);
  s.set = build_calibration_set(s.presses, kSensor, seed);
  const auto test = select(s.presses, s.set.test_presses);
  for (Lights l : kAllModes) {
    const auto t0 = Clock::now();
    auto tc = nnet::TrainConfig::mlp_defaults();
    tc.seed = seed;
    s.comp.mappers[l] = train_mapper(s.set.train, {l, false}, tc).weights;
    if (l == Lights::RGB) {
      TrainedComponents only;
      only.mappers[l] = s.comp.mappers[l];
      ablate_configs(test, kSensor, only, {l});
      s.rgb_train_eval_s = seconds_since(t0);
    }
  }
  s.comp.completion = completion;
  s.report = ablate_configs(test, kSensor, s.comp, kAllModes);
  return s;
}

Outcome table_bounds(const SeedRun& s) {
  const auto& e = s.report.row(Lights::RGB, false).errors;
  const bool ok = s.set.train_presses.size() == 32 && s.set.test_presses.size() == 8 && e.gx_rmse <= 0.043 &&
                  e.gy_rmse <= 0.042 && e.theta_x_deg <= 2.248 && e.theta_y_deg <= 2.187 && s.rgb_train_eval_s < 300;
  return {ok, fmt("RGB Gx %.4f (<= 0.043), Gy %.4f (<= 0.042), theta_x %.3f deg (<= 2.248), theta_y %.3f deg (<= 2.187)",
                  e.gx_rmse, e.gy_rmse, e.theta_x_deg, e.theta_y_deg) +
                  fmt("; 32/8 split, train+eval %.1f s (< 300 s)", s.rgb_train_eval_s)};
}

Outcome ablation_order(const std::vector<SeedRun>& runs) {
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& rep = runs[k].report;
    const double rgb = rep.row(Lights::RGB, false).errors.gx_rmse;
    const double rg = rep.row(Lights::RG, false).errors.gx_rmse;
    const double rb_nn = rep.row(Lights::RB, true).errors.gx_rmse;
    const double r_nn = rep.row(Lights::R, true).errors.gx_rmse;
    const double rb = rep.row(Lights::RB, false).errors.gx_rmse;
    const bool seed_ok = rgb <= rg && rg <= rb_nn && rb_nn <= r_nn && rb >= 2.0 * rb_nn;
    ok &= seed_ok;
    detail += std::string(k ? "; " : "") + fmt("seed %.0f: RGB %.4f <= RG %.4f", double(k + 1), rgb, rg) +
              fmt(" <= RB+NN %.4f <= R+NN %.4f", rb_nn, r_nn) + fmt(", RB w/o NN %.4f = %.2fx", rb, rb / rb_nn) +
              (seed_ok ? "" : " [violated]");
  }
  return {ok, detail};
}

double min_depth(const DepthMap& d) { return *std::min_element(d.data().begin(), d.data().end()); }

Outcome flattening(const SeedRun& s) {
  const auto img = sim::gen_ball_press(sim::BallPress{}, kSensor);
  const TactileFrame frame = sim::render_frame(img.depth, kSensor);
  const TactileFrame bg = sim::render_background(kSensor);
  const auto& rb = s.comp.mappers.at(Lights::RB);
  const DepthMap zero = reconstruct(frame, bg, rb, nullptr, {Lights::RB, false}).depth;
  const DepthMap nn = reconstruct(frame, bg, rb, &*s.comp.completion, {Lights::RB, true}).depth;
  const double zmin = min_depth(zero), nmin = min_depth(nn);
  return {zmin < 0.0 && nmin >= -0.02,
          fmt("default press: zero-fill min depth %.4f mm (< 0), completed min depth %.4f mm (>= -0.02)", zmin, nmin)};
}

std::string fnv1a_hex(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Outcome synthetic_only(const fs::path& weights, bool order_ok) {
  const fs::path prov_path = weights.parent_path() / "completion.json";
  std::ifstream in(prov_path);
  if (!in) return {false, "no provenance file " + prov_path.string()};
  const auto prov = nlohmann::json::parse(in);
  const bool synthetic = prov.value("corpus", "") == "random-surface";
  const bool matches = prov.value("weights_fnv1a", "") == fnv1a_hex(read_file_bytes(weights));
  return {synthetic && matches && order_ok,
          std::string("completion corpus '") + prov.value("corpus", "?") + "' (" +
              std::to_string(prov.value("count", 0)) + " surfaces, no ball presses), provenance " +
              (matches ? "matches" : "does NOT match") + " the weights in use, ablation ordering " +
              (order_ok ? "holds" : "fails")};
}

// ---------------------------------------------------------------------------
// 7. gradient checks

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-3, std::max(std::abs(a), std::abs(b))); }

template <class W, class Loss>
double fd_check(W& w, const std::vector<std::pair<double*, double>>& params, Loss&& loss) {
  double worst = 0.0;
  const double eps = 1e-6;
  for (const auto& [p, analytic] : params) {
    const double keep = *p;
    *p = keep + eps;
    const double up = loss(w);
    *p = keep - eps;
    const double down = loss(w);
    *p = keep;
    worst = std::max(worst, rel_err((up - down) / (2 * eps), analytic));
  }
  return worst;
}

Outcome gradient_checks() {
  double mlp_worst = 0.0, enc_worst = 0.0;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    nnet::MlpWeights w = nnet::mlp_init(nnet::MlpSpec{{5, 7, 6, 2}}, rng());
    for (auto& l : w.layers)
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * nd(rng);
    Eigen::MatrixXd x(5, 5), y(5, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = nd(rng);
    nnet::MlpWeights g;
    nnet::mlp_loss_and_grad(w, x, y, &g);
    std::vector<std::pair<double*, double>> params;
    for (std::size_t k = 0; k < w.layers.size(); ++k) {
      for (Eigen::Index i = 0; i < w.layers[k].weight.size(); ++i)
        params.emplace_back(w.layers[k].weight.data() + i, g.layers[k].weight.data()[i]);
      for (Eigen::Index i = 0; i < w.layers[k].bias.size(); ++i)
        params.emplace_back(w.layers[k].bias.data() + i, g.layers[k].bias.data()[i]);
    }
    mlp_worst = std::max(mlp_worst, fd_check(w, params, [&](const nnet::MlpWeights& ww) {
                           return nnet::mlp_loss_and_grad(ww, x, y, nullptr);
                         }));
  }
  for (int trial = 0; trial < 2; ++trial) {
    nnet::EncDecWeights w = nnet::encdec_init({1, 1, {2, 3, 3}}, rng());
    for (auto& c : w.convs)
      for (Eigen::Index i = 0; i < c.bias.size(); ++i) c.bias(i) = 0.1 * nd(rng);
    std::vector<Raster<1>> in, tg;
    for (int k = 0; k < 2; ++k) {
      Raster<1> a(8, 8), b(8, 8);
      for (auto& v : a.data()) v = static_cast<float>(nd(rng));
      for (auto& v : b.data()) v = static_cast<float>(nd(rng));
      in.push_back(a);
      tg.push_back(b);
    }
    nnet::EncDecWeights g;
    nnet::encdec_loss_and_grad(w, in, tg, &g, nnet::Precision::F64);
    std::vector<std::pair<double*, double>> params;
    for (std::size_t k = 0; k < w.convs.size(); ++k) {
      for (Eigen::Index i = 0; i < w.convs[k].weight.size(); ++i)
        params.emplace_back(w.convs[k].weight.data() + i, g.convs[k].weight.data()[i]);
      for (Eigen::Index i = 0; i < w.convs[k].bias.size(); ++i)
        params.emplace_back(w.convs[k].bias.data() + i, g.convs[k].bias.data()[i]);
    }
    enc_worst = std::max(enc_worst, fd_check(w, params, [&](const nnet::EncDecWeights& ww) {
                           return nnet::encdec_loss_and_grad(ww, in, tg, nullptr, nnet::Precision::F64);
                         }));
  }
  return {mlp_worst <= 1e-3 && enc_worst <= 1e-3,
          fmt("max relative error: MLP %.3g, encoder-decoder %.3g (<= 1e-3)", mlp_worst, enc_worst)};
}

// ---------------------------------------------------------------------------
// 8. markers

Outcome marker_inpainting(const nnet::MlpWeights& rgb_mapper) {
  const double pitch = 1.6, radius = 0.2;
  const TactileFrame bg = sim::render_background(kSensor);
  const auto probe = sim::overlay_markers(bg, pitch, radius, kSensor);
  const double fraction = double(count_set(probe.markers)) / probe.markers.pixel_count();

  // Timing on a representative gradient field.
  GradientField g(kSensor.height, kSensor.width);
  std::mt19937_64 rng(5);
  std::normal_distribution<float> nd(0.0f, 0.1f);
  for (auto& v : g.data()) v = nd(rng);
  std::vector<double> times;
  for (int k = 0; k < 15; ++k) {
    const auto t0 = Clock::now();
    const auto out = imgproc::interpolate_marker_gradients(g, probe.markers, imgproc::MarkerMethod::Nearest);
    times.push_back(1e3 * seconds_since(t0));
    if (out.height() != g.height()) return {false, "bad output"};
  }
  std::sort(times.begin(), times.end());
  const double nearest_ms = times[times.size() / 2];

  double se_lin = 0, se_zero = 0, se_raw = 0;
  std::size_t n = 0;
  for (const auto& p : random_presses(20, kSensor, 808)) {
    const auto img = sim::gen_ball_press(p, kSensor);
    const auto marked = sim::overlay_markers(sim::render_frame(img.depth, kSensor), pitch, radius, kSensor);
    auto depth_with = [&](std::optional<imgproc::MarkerMethod> method) {
      ReconstructOptions opts;
      if (method) opts.markers = {marked.markers, *method};
      return reconstruct(marked.frame, bg, rgb_mapper, nullptr, {Lights::RGB, false}, opts).depth;
    };
    const DepthMap lin = depth_with(imgproc::MarkerMethod::Linear);
    const DepthMap zero = depth_with(imgproc::MarkerMethod::Zero);
    const DepthMap raw = depth_with(std::nullopt);
    for (std::size_t i = 0; i < img.depth.data().size(); ++i) {
      if (marked.markers.data()[i] == 0.0f) continue;
      const double t = img.depth.data()[i];
      se_lin += std::pow(lin.data()[i] - t, 2);
      se_zero += std::pow(zero.data()[i] - t, 2);
      se_raw += std::pow(raw.data()[i] - t, 2);
      ++n;
    }
  }
  const double lin = std::sqrt(se_lin / n), zero = std::sqrt(se_zero / n), raw = std::sqrt(se_raw / n);
  return {fraction <= 0.05 && nearest_ms <= 10.0 && lin < zero && zero < raw,
          fmt("%.2f%% masked, nearest %.2f ms (<= 10 ms); ", 100 * fraction, nearest_ms) +
              fmt("depth RMSE under markers: interpolated %.4f < zero %.4f < untreated %.4f mm", lin, zero, raw)};
}

// ---------------------------------------------------------------------------
// 9. pose

Outcome icp_recovery() {
  using namespace wedge::pose;
  const PointCloud model = cube_corner_model();
  const auto truth = RigidTransform::from_axis_angle({0, 0, 1}, 10.0 * M_PI / 180.0, {1, 2, 0.5});
  const IcpResult r = icp(model, transform_apply(truth, model), RigidTransform::identity());
  const double static_t = (r.transform.translation - truth.translation).norm();
  const double static_r = rotation_angle_deg(r.transform.rotation, truth.rotation);

  const RigidTransform rest = cube_corner_rest_pose((kSensor.width - 1) / (2 * kSensor.ppmm),
                                                    (kSensor.height - 1) / (2 * kSensor.ppmm), 4.0);
  std::vector<PoseFrame> seq;
  std::vector<RigidTransform> poses;
  std::size_t max_points = 0;
  for (int k = 0; k < 10; ++k) {
    RigidTransform p = rest;
    p.rotation = RigidTransform::from_axis_angle({0.3, -0.2, 1.0}, k * 2.0 * M_PI / 180.0).rotation * rest.rotation;
    const DepthMap d = cube_corner_depth(p, kSensor.height, kSensor.width, kSensor.ppmm);
    Mask m(d.height(), d.width());
    for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = d.data()[i] > 0.0f ? 1.0f : 0.0f;
    max_points = std::max(max_points, count_set(m));
    seq.push_back({d, m});
    poses.push_back(p);
  }
  const auto t0 = Clock::now();
  const PoseTrack tr = track(seq, model, rest, IcpParams{}, kSensor.ppmm);
  const double rate = seq.size() / seconds_since(t0);
  double worst_deg = 0.0, worst_mm = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    worst_deg = std::max(worst_deg, rotation_angle_deg(tr.poses[k].rotation, poses[k].rotation));
    worst_mm = std::max(worst_mm, (tr.poses[k].translation - poses[k].translation).norm());
  }
  const bool ok = static_t <= 1e-3 && static_r <= 0.01 && worst_deg <= 0.5 && rate >= 10.0 && max_points <= 5000;
  return {ok, fmt("static: %.2g mm / %.2g deg (<= 1e-3 / 0.01); ", static_t, static_r) +
                  fmt("tracking: worst %.3f deg (<= 0.5), %.3f mm; ", worst_deg, worst_mm) +
                  fmt("%.1f poses/s (>= 10) at <= %.0f points/frame (<= 5000)", rate, double(max_points))};
}

// ---------------------------------------------------------------------------
// 10. determinism

Outcome determinism(const std::string& wedge_exe, const fs::path& work) {
  std::vector<fs::path> dirs{work / "repro_a", work / "repro_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    const std::string cmd = "\"" + wedge_exe + "\" --seed 11 --out \"" + d.string() +
                            "\" repro-table1 --presses 10 --surfaces 16 --mapper-epochs 5 --completion-epochs 2 > \"" +
                            (work / (d.filename().string() + ".log")).string() + "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "repro-table1 failed; see " + work.string()};
  }
  std::size_t compared = 0;
  std::vector<std::string> differ;
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".nnwt") continue;
    ++compared;
    const fs::path other = dirs[1] / e.path().filename();
    if (!fs::exists(other) || read_file_bytes(e.path()) != read_file_bytes(other)) differ.push_back(e.path().filename());
  }
  std::string detail = std::to_string(compared) + " CSV/weight files compared, " + std::to_string(differ.size()) + " differ";
  for (const auto& f : differ) detail += " " + f;
  return {compared >= 8 && differ.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string wedge_exe, completion_path, work = "acceptance_work";
  app.add_option("--wedge", wedge_exe, "Path to the wedge executable")->required();
  app.add_option("--completion", completion_path, "Completion weights trained by train-completion")->required();
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %2d  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    return o.pass;
  };

  report(1, "Poisson oracle equivalence", poisson_oracle);
  report(2, "round-trip fidelity", round_trip);

  std::optional<nnet::EncDecWeights> completion;
  std::vector<SeedRun> runs;
  std::string setup_error;
  try {
    completion = nnet::load_encdec(completion_path);
    for (std::uint64_t seed : {1, 2, 3}) runs.push_back(run_seed(seed, *completion));
  } catch (const std::exception& e) {
    setup_error = std::string("setup failed: ") + e.what();
  }
  auto needs_runs = [&](auto f) {
    return [&, f]() -> Outcome {
      if (!setup_error.empty()) return {false, setup_error};
      return f();
    };
  };
  report(3, "RGB gradient error bounds", needs_runs([&] { return table_bounds(runs[0]); }));
  const bool order_ok = report(4, "ablation ordering", needs_runs([&] { return ablation_order(runs); }));
  report(5, "flattening artifact", needs_runs([&] { return flattening(runs[0]); }));
  report(6, "completion trained on synthetic data only",
         needs_runs([&] { return synthetic_only(completion_path, order_ok); }));
  report(7, "gradient-check suite", gradient_checks);
  report(8, "marker inpainting", needs_runs([&] { return marker_inpainting(runs[0].comp.mappers.at(Lights::RGB)); }));
  report(9, "ICP recovery and tracking", icp_recovery);
  report(10, "determinism", [&] { return determinism(wedge_exe, work); });

  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
