#include "wedge/cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "wedge/core/error.hpp"
#include "wedge/core/gradients.hpp"
#include "wedge/core/raster_io.hpp"
#include "wedge/nnet/train.hpp"
#include "wedge/nnet/weights_io.hpp"
#include "wedge/pose/cube.hpp"
#include "wedge/pose/icp.hpp"
#include "wedge/recon/ablation.hpp"
#include "wedge/recon/calibration.hpp"
#include "wedge/recon/completion.hpp"
#include "wedge/recon/reconstruct.hpp"
#include "wedge/sim/markers.hpp"
#include "wedge/sim/render.hpp"
#include "wedge/sim/surfaces.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wedge::cli {
namespace {

std::string indexed(const std::string& stem, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu", i);
  return stem + buf;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
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

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CorruptFile(path.string() + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw CorruptFile(where + ": '" + s + "' is not a number");
  return v;
}

std::string history_csv(const nnet::TrainHistory& h) {
  std::string out = "epoch,train_loss,validation_loss\n";
  for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
    char line[96];
    std::snprintf(line, sizeof line, "%zu,%.9g,%.9g\n", e, h.train_loss[e], h.validation_loss[e]);
    out += line;
  }
  return out;
}

// ---------------------------------------------------------------------------
// calibration CSV

std::string samples_csv(const std::vector<recon::CalibrationSample>& samples) {
  std::string out = "r,g,b,x,y,gx,gy,contact\n";
  char line[192];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n", s.rgb[0], s.rgb[1], s.rgb[2], s.x_norm,
                  s.y_norm, s.gx, s.gy, s.in_contact ? 1 : 0);
    out += line;
  }
  return out;
}

std::vector<recon::CalibrationSample> read_samples_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "r,g,b,x,y,gx,gy,contact") {
    throw CorruptFile(path.string() + ": expected header r,g,b,x,y,gx,gy,contact");
  }
  std::vector<recon::CalibrationSample> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(n);
    if (cells.size() != 8) throw CorruptFile(where + ": expected 8 columns");
    recon::CalibrationSample s;
    for (int ch = 0; ch < 3; ++ch) s.rgb[ch] = static_cast<float>(parse_double(cells[ch], where));
    s.x_norm = static_cast<float>(parse_double(cells[3], where));
    s.y_norm = static_cast<float>(parse_double(cells[4], where));
    s.gx = static_cast<float>(parse_double(cells[5], where));
    s.gy = static_cast<float>(parse_double(cells[6], where));
    s.in_contact = parse_double(cells[7], where) != 0.0;
    out.push_back(s);
  }
  if (out.empty()) throw CorruptFile(path.string() + ": no samples");
  return out;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scenario = "ball-press";
  int count = 40;
  double marker_pitch = 0.0;   // mm; 0 disables markers
  double marker_radius = 0.3;  // mm
  double step_deg = 2.0;
  double indentation = 4.0;    // cube corner, mm
};

void overlay_if_requested(const SimulateArgs& a, const sim::SensorConfig& sensor, const fs::path& dir,
                          const std::string& name, TactileFrame& frame) {
  if (!(a.marker_pitch > 0.0)) return;
  sim::MarkedFrame m = sim::overlay_markers(frame, a.marker_pitch, a.marker_radius, sensor);
  frame = std::move(m.frame);
  write_fras(dir / (name + "_markers.fras"), m.markers);
}

std::string cmd_simulate(const PipelineConfig& cfg, const SimulateArgs& a, const fs::path& out) {
  if (a.count < 1) throw UsageError("simulate: --count must be at least 1");
  if (a.marker_pitch > 0.0 && !(a.marker_radius < a.marker_pitch / 2)) {
    throw UsageError("simulate: --marker-radius must be below half the pitch");
  }
  ensure_dir(out);
  const sim::SensorConfig& sensor = cfg.sensor;
  json manifest{{"scenario", a.scenario}, {"count", a.count}, {"seed", cfg.seed}, {"sensor", sensor}};
  json items = json::array();

  if (a.scenario == "ball-press" || a.scenario == "random-surface") {
    const TactileFrame background = sim::render_background(sensor);
    write_fras(out / "background.fras", background);
    write_ppm(out / "background.ppm", background);
    std::mt19937_64 rng(cfg.seed);
    const auto presses =
        a.scenario == "ball-press" ? recon::random_presses(a.count, sensor, cfg.seed) : std::vector<sim::BallPress>{};
    for (int i = 0; i < a.count; ++i) {
      const std::string name = indexed(a.scenario == "ball-press" ? "press" : "surface", static_cast<std::size_t>(i));
      json item{{"name", name}};
      DepthMap depth(sensor.height, sensor.width);
      GradientField grads(sensor.height, sensor.width);
      if (a.scenario == "ball-press") {
        const auto& p = presses[static_cast<std::size_t>(i)];
        sim::BallPressImage img = sim::gen_ball_press(p, sensor);
        depth = img.depth;
        grads = img.analytic;
        write_fras(out / (name + "_contact.fras"), img.contact);
        item.update({{"ball_radius", p.ball_radius},
                     {"press_depth", p.press_depth},
                     {"center_x", p.center_x},
                     {"center_y", p.center_y}});
      } else {
        depth = sim::gen_random_surface(sensor.height, sensor.width, sim::SurfaceGenParams{}, sensor.ppmm, rng);
        grads = depth_to_gradients(depth, sensor.ppmm);
      }
      TactileFrame frame = sim::render_frame(depth, sensor);
      overlay_if_requested(a, sensor, out, name, frame);
      write_fras(out / (name + "_depth.fras"), depth);
      write_fras(out / (name + "_frame.fras"), frame);
      write_ppm(out / (name + "_frame.ppm"), frame);
      write_fras(out / (name + "_grad.fras"), grads);
      items.push_back(item);
    }
  } else if (a.scenario == "cube-sequence") {
    const RigidTransform rest = pose::cube_corner_rest_pose(
        (sensor.width - 1) / (2.0 * sensor.ppmm), (sensor.height - 1) / (2.0 * sensor.ppmm), a.indentation);
    const Eigen::Vector3d axis(0.3, -0.2, 1.0);
    std::string truth = "frame,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz\n";
    for (int k = 0; k < a.count; ++k) {
      const std::string name = indexed("frame", static_cast<std::size_t>(k));
      RigidTransform p = rest;
      p.rotation = RigidTransform::from_axis_angle(axis, k * a.step_deg * M_PI / 180.0).rotation * rest.rotation;
      const DepthMap depth = pose::cube_corner_depth(p, sensor.height, sensor.width, sensor.ppmm);
      Mask mask(sensor.height, sensor.width);
      for (std::size_t i = 0; i < mask.pixel_count(); ++i) mask.data()[i] = depth.data()[i] > 0.0f ? 1.0f : 0.0f;
      write_fras(out / (name + "_depth.fras"), depth);
      write_fras(out / (name + "_mask.fras"), mask);
      truth += std::to_string(k);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) truth += fmt(",%.12g", p.rotation(r, c));
      for (int i = 0; i < 3; ++i) truth += fmt(",%.12g", p.translation[i]);
      truth += "\n";
      items.push_back({{"name", name}});
    }
    write_text(out / "truth_poses.csv", truth);
    std::string model = "x,y,z\n";
    for (const auto& q : pose::cube_corner_model()) model += fmt("%.9g", q.x()) + fmt(",%.9g", q.y()) + fmt(",%.9g\n", q.z());
    write_text(out / "model.csv", model);
    json init{{"rotation", json::array()}, {"translation", {rest.translation.x(), rest.translation.y(), rest.translation.z()}}};
    for (int r = 0; r < 3; ++r) init["rotation"].push_back({rest.rotation(r, 0), rest.rotation(r, 1), rest.rotation(r, 2)});
    write_text(out / "init_pose.json", init.dump(2) + "\n");
    manifest["step_deg"] = a.step_deg;
    manifest["indentation_mm"] = a.indentation;
  } else {
    throw UsageError("simulate: unknown scenario '" + a.scenario + "' (ball-press|random-surface|cube-sequence)");
  }
  if (a.marker_pitch > 0.0) manifest["markers"] = {{"pitch_mm", a.marker_pitch}, {"radius_mm", a.marker_radius}};
  manifest["items"] = items;
  manifest["config_hash"] = config_hash(json(cfg));
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  return "simulate: " + std::to_string(a.count) + " " + a.scenario + " item(s) -> " + out.string();
}

// ---------------------------------------------------------------------------
// calibrate / training

struct SimInput {
  sim::SensorConfig sensor;
  std::vector<std::string> names;
  std::vector<recon::PressRecord> records;
};

SimInput load_presses(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  SimInput in;
  try {
    if (manifest.at("scenario").get<std::string>() != "ball-press") {
      throw CorruptFile((dir / "manifest.json").string() + ": not a ball-press corpus");
    }
    manifest.at("sensor").get_to(in.sensor);
    in.sensor.validate();
    const TactileFrame background = read_fras<3>(dir / "background.fras");
    for (const auto& item : manifest.at("items")) {
      const std::string name = item.at("name").get<std::string>();
      sim::BallPress p;
      p.ball_radius = item.at("ball_radius").get<double>();
      p.press_depth = item.at("press_depth").get<double>();
      p.center_x = item.at("center_x").get<double>();
      p.center_y = item.at("center_y").get<double>();
      in.names.push_back(name);
      in.records.push_back({read_fras<3>(dir / (name + "_frame.fras")), background, p});
    }
  } catch (const json::exception& e) {
    throw CorruptFile((dir / "manifest.json").string() + ": " + e.what());
  }
  return in;
}

std::string cmd_calibrate(const PipelineConfig& cfg, const fs::path& input, const fs::path& out) {
  if (input.empty()) throw UsageError("calibrate: --input is required");
  const SimInput sim_in = load_presses(input);
  ensure_dir(out);
  const recon::CalibrationSet set = recon::build_calibration_set(sim_in.records, sim_in.sensor, cfg.seed);
  write_text(out / "calibration_train.csv", samples_csv(set.train));
  write_text(out / "calibration_test.csv", samples_csv(set.test));
  json split{{"split_seed", cfg.seed}, {"input", input.string()}, {"train", json::array()}, {"test", json::array()}};
  for (auto i : set.train_presses) split["train"].push_back(sim_in.names[i]);
  for (auto i : set.test_presses) split["test"].push_back(sim_in.names[i]);
  write_text(out / "split.json", split.dump(2) + "\n");
  return "calibrate: " + std::to_string(set.train.size()) + " train samples (" + std::to_string(set.train_presses.size()) +
         " presses), " + std::to_string(set.test.size()) + " test samples (" + std::to_string(set.test_presses.size()) +
         " presses) -> " + (out / "calibration_train.csv").string();
}

struct TrainArgs {
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> batch;
};

nnet::TrainConfig train_config(nnet::TrainConfig base, const TrainArgs& a, std::uint64_t seed) {
  if (a.lr) base.learning_rate = *a.lr;
  if (a.epochs) base.epochs = *a.epochs;
  if (a.batch) base.batch_size = *a.batch;
  base.seed = seed;
  try {
    base.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return base;
}

fs::path mapper_path(const fs::path& dir, recon::Lights l) { return dir / ("mapper_" + recon::to_string(l) + ".nnwt"); }

std::string cmd_train_mapper(const PipelineConfig& cfg, const fs::path& samples, const TrainArgs& ta, const fs::path& out) {
  if (samples.empty()) throw UsageError("train-mapper: --samples is required");
  const auto train = read_samples_csv(samples);
  ensure_dir(out);
  const recon::LightConfigMode mode{cfg.mode.lights, false};
  const auto res = recon::train_mapper(train, mode, train_config(nnet::TrainConfig::mlp_defaults(), ta, cfg.seed));
  const fs::path path = mapper_path(out, mode.lights);
  nnet::weights_save(path, res.weights);
  write_text(out / ("mapper_" + recon::to_string(mode.lights) + "_history.csv"), history_csv(res.history));
  return "train-mapper " + recon::to_string(mode.lights) + ": validation mse " +
         fmt("%.6g", res.history.final_validation_loss) + " at epoch " + std::to_string(res.history.best_epoch) + " -> " +
         path.string();
}

struct CompletionArgs {
  int count = 200;
  int height = 96;
  int width = 128;
};

std::string cmd_train_completion(const PipelineConfig& cfg, const CompletionArgs& ca, const TrainArgs& ta,
                                 const fs::path& out) {
  if (ca.count < 1 || ca.height < 16 || ca.width < 16 || ca.height % 4 != 0 || ca.width % 4 != 0) {
    throw UsageError("train-completion: need --count >= 1 and sizes >= 16 divisible by 4");
  }
  ensure_dir(out);
  recon::CompletionCorpusParams cp;
  cp.count = ca.count;
  cp.height = ca.height;
  cp.width = ca.width;
  cp.ppmm = cfg.sensor.ppmm;
  const auto corpus = recon::completion_corpus(cp, cfg.seed);
  const auto res = nnet::encdec_train({}, corpus, train_config(nnet::TrainConfig::encdec_defaults(), ta, cfg.seed));
  const fs::path path = out / "completion.nnwt";
  nnet::weights_save(path, res.weights);
  write_text(out / "completion_history.csv", history_csv(res.history));
  // Provenance: what the network saw. Ball presses never enter this corpus.
  const json prov{{"corpus", "random-surface"},
                  {"count", ca.count},
                  {"height", ca.height},
                  {"width", ca.width},
                  {"seed", cfg.seed},
                  {"weights_fnv1a", fnv1a_hex(read_file_bytes(path))}};
  write_text(out / "completion.json", prov.dump(2) + "\n");
  return "train-completion: validation mse " + fmt("%.6g", res.history.final_validation_loss) + " at epoch " +
         std::to_string(res.history.best_epoch) + " -> " + path.string();
}

// ---------------------------------------------------------------------------
// reconstruct / ablate / track

struct ReconstructArgs {
  std::string frame, background, mapper, completion, marker_mask;
};

std::string cmd_reconstruct(const PipelineConfig& cfg, const ReconstructArgs& a, const fs::path& out) {
  if (a.frame.empty() || a.background.empty()) throw UsageError("reconstruct: --frame and --background are required");
  const std::string mapper_file = a.mapper.empty() ? cfg.mapper_weights : a.mapper;
  const std::string completion_file = a.completion.empty() ? cfg.completion_weights : a.completion;
  if (mapper_file.empty()) throw UsageError("reconstruct: no mapper weights (--mapper or config mapper_weights)");
  if (cfg.mode.use_completion && completion_file.empty()) {
    throw UsageError("reconstruct: mode " + cfg.mode.label() + " needs --completion weights");
  }

  const TactileFrame frame = read_fras<3>(a.frame);
  const TactileFrame background = read_fras<3>(a.background);
  const nnet::MlpWeights mapper = nnet::load_mlp(mapper_file);
  std::optional<nnet::EncDecWeights> completion;
  if (cfg.mode.use_completion) completion = nnet::load_encdec(completion_file);

  recon::ReconstructOptions opts;
  opts.ppmm = cfg.sensor.ppmm;
  opts.contact_threshold = cfg.contact_threshold;
  opts.markers.method = cfg.marker_method;
  if (!a.marker_mask.empty()) opts.markers.mask = read_fras<1>(a.marker_mask);
  const recon::Reconstruction r =
      recon::reconstruct(frame, background, mapper, completion ? &*completion : nullptr, cfg.mode, opts);

  ensure_dir(out);
  write_fras(out / "depth.fras", r.depth);
  write_fras(out / "gradients.fras", r.gradients);
  write_fras(out / "contact.fras", r.contact);
  write_pgm(out / "depth.pgm", r.depth);

  const auto max_it = std::max_element(r.depth.data().begin(), r.depth.data().end());
  const double max_depth = *max_it;
  const std::size_t contact = count_set(r.contact);
  if (contact == 0) return "reconstruct: no contact, max depth " + fmt("%.4f", max_depth) + " mm -> " + (out / "depth.fras").string();
  const auto idx = static_cast<int>(max_it - r.depth.data().begin());
  return "reconstruct " + cfg.mode.label() + ": max depth " + fmt("%.4f", max_depth) + " mm at (" +
         std::to_string(idx / r.depth.width()) + ", " + std::to_string(idx % r.depth.width()) + "), " +
         std::to_string(contact) + " contact px -> " + (out / "depth.fras").string();
}

struct AblateArgs {
  std::string input, split, mappers, completion, modes = "RGB,RG,RB,R";
};

recon::AblationReport run_ablation(const SimInput& sim_in, const std::vector<std::string>& test_names,
                                   const recon::TrainedComponents& comp, const std::vector<recon::Lights>& modes) {
  std::vector<recon::PressRecord> test;
  for (const auto& name : test_names) {
    const auto it = std::find(sim_in.names.begin(), sim_in.names.end(), name);
    if (it == sim_in.names.end()) throw CorruptFile("split lists unknown press '" + name + "'");
    test.push_back(sim_in.records[static_cast<std::size_t>(it - sim_in.names.begin())]);
  }
  return recon::ablate_configs(test, sim_in.sensor, comp, modes);
}

std::string ablation_summary(const recon::AblationReport& rep, const fs::path& path) {
  std::string s = "ablate:";
  for (const auto& r : rep.rows) s += " " + r.mode.label() + "=" + fmt("%.4f", r.errors.gx_rmse);
  return s + " (gx rmse) -> " + path.string();
}

std::string cmd_ablate(const PipelineConfig& cfg, const AblateArgs& a, const fs::path& out) {
  if (a.input.empty() || a.split.empty() || a.mappers.empty()) {
    throw UsageError("ablate: --input, --split and --mappers are required");
  }
  std::vector<recon::Lights> modes;
  try {
    modes = recon::lights_list_from_string(a.modes);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const SimInput sim_in = load_presses(a.input);
  const json split = read_json(a.split);
  std::vector<std::string> test_names;
  try {
    test_names = split.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw CorruptFile(a.split + ": " + e.what());
  }
  recon::TrainedComponents comp;
  for (auto l : modes) comp.mappers[l] = nnet::load_mlp(mapper_path(a.mappers, l));
  const std::string completion_file = a.completion.empty() ? cfg.completion_weights : a.completion;
  if (!completion_file.empty()) comp.completion = nnet::load_encdec(completion_file);

  const recon::AblationReport rep = run_ablation(sim_in, test_names, comp, modes);
  ensure_dir(out);
  const fs::path path = out / "ablation.csv";
  write_text(path, rep.to_csv());
  return ablation_summary(rep, path);
}

PointCloud read_cloud_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "x,y,z") throw CorruptFile(path.string() + ": expected header x,y,z");
  PointCloud cloud;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(n);
    if (cells.size() != 3) throw CorruptFile(where + ": expected 3 columns");
    cloud.emplace_back(parse_double(cells[0], where), parse_double(cells[1], where), parse_double(cells[2], where));
  }
  return cloud;
}

RigidTransform read_pose_json(const fs::path& path) {
  const json j = read_json(path);
  RigidTransform t;
  try {
    const auto rows = j.at("rotation");
    if (rows.size() != 3) throw CorruptFile(path.string() + ": rotation needs 3 rows");
    for (int r = 0; r < 3; ++r) {
      if (rows[r].size() != 3) throw CorruptFile(path.string() + ": rotation rows need 3 entries");
      for (int c = 0; c < 3; ++c) t.rotation(r, c) = rows[r][c].get<double>();
    }
    const auto tr = j.at("translation");
    if (tr.size() != 3) throw CorruptFile(path.string() + ": translation needs 3 entries");
    for (int i = 0; i < 3; ++i) t.translation[i] = tr[i].get<double>();
  } catch (const json::exception& e) {
    throw CorruptFile(path.string() + ": " + e.what());
  }
  if (!t.is_valid(1e-6)) throw CorruptFile(path.string() + ": rotation is not orthonormal with det +1");
  return t;
}

struct TrackArgs {
  std::string input, model, init;
};

std::string cmd_track(const PipelineConfig& cfg, const TrackArgs& a, const pose::IcpParams& params, const fs::path& out) {
  if (a.input.empty() || a.model.empty() || a.init.empty()) throw UsageError("track: --input, --model and --init are required");
  std::vector<pose::PoseFrame> seq;
  for (std::size_t k = 0;; ++k) {
    const fs::path depth = fs::path(a.input) / (indexed("frame", k) + "_depth.fras");
    if (!fs::exists(depth)) break;
    seq.push_back({read_fras<1>(depth), read_fras<1>(fs::path(a.input) / (indexed("frame", k) + "_mask.fras"))});
  }
  if (seq.empty()) throw UsageError("track: no frame_000_depth.fras in " + a.input);
  const pose::PoseTrack tr = pose::track(seq, read_cloud_csv(a.model), read_pose_json(a.init), params, cfg.sensor.ppmm);

  std::string csv = "frame,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz,residual_mm,iters\n";
  for (std::size_t k = 0; k < tr.poses.size(); ++k) {
    csv += std::to_string(k);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) csv += fmt(",%.9g", tr.poses[k].rotation(r, c));
    for (int i = 0; i < 3; ++i) csv += fmt(",%.9g", tr.poses[k].translation[i]);
    csv += fmt(",%.9g", tr.residuals[k]) + "," + std::to_string(tr.iterations[k]) + "\n";
  }
  ensure_dir(out);
  const fs::path path = out / "track.csv";
  write_text(path, csv);
  double worst = 0.0;
  for (double r : tr.residuals) worst = std::max(worst, r);
  return "track: " + std::to_string(tr.poses.size()) + " frames, max residual " + fmt("%.4f", worst) + " mm -> " +
         path.string();
}

// ---------------------------------------------------------------------------
// repro-table1

struct ReproArgs {
  int presses = 40;
  CompletionArgs completion;
  TrainArgs mapper_train;
  TrainArgs completion_train;
  std::string modes = "RGB,RG,RB,R";
};

std::string cmd_repro(const PipelineConfig& cfg, const ReproArgs& a, const fs::path& out) {
  std::vector<recon::Lights> modes;
  try {
    modes = recon::lights_list_from_string(a.modes);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  SimulateArgs sa;
  sa.count = a.presses;
  cmd_simulate(cfg, sa, out / "sim");
  cmd_calibrate(cfg, out / "sim", out);
  for (auto l : modes) {
    PipelineConfig c = cfg;
    c.mode = {l, false};
    cmd_train_mapper(c, out / "calibration_train.csv", a.mapper_train, out);
  }
  const bool need_completion = std::any_of(modes.begin(), modes.end(), [](recon::Lights l) {
    return l == recon::Lights::RB || l == recon::Lights::R;
  });
  AblateArgs ab;
  ab.input = (out / "sim").string();
  ab.split = (out / "split.json").string();
  ab.mappers = out.string();
  ab.modes = a.modes;
  if (need_completion) {
    cmd_train_completion(cfg, a.completion, a.completion_train, out);
    ab.completion = (out / "completion.nnwt").string();
  }
  PipelineConfig c = cfg;
  c.completion_weights.clear();
  return "repro-table1: " + cmd_ablate(c, ab, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tactile depth reconstruction toolkit", "wedge"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "Pipeline config (JSON)");
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string mode_flag;
  bool use_nn = false;
  std::string marker_method;
  app.add_option("--mode", mode_flag, "Light configuration: RGB|RG|RB|R");
  app.add_flag("--use-nn", use_nn, "Complete Gx with the network (RB / R)");
  app.add_option("--marker-method", marker_method, "zero | nearest | linear");
  auto add_train = [](CLI::App* sub, TrainArgs& t) {
    sub->add_option("--lr", t.lr, "Learning rate");
    sub->add_option("--epochs", t.epochs, "Maximum epochs");
    sub->add_option("--batch", t.batch, "Mini-batch size");
  };

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic corpus");
  simulate->add_option("--scenario", sim_args.scenario, "ball-press | random-surface | cube-sequence")->capture_default_str();
  simulate->add_option("--count", sim_args.count, "Number of presses / surfaces / frames")->capture_default_str();
  simulate->add_option("--marker-pitch", sim_args.marker_pitch, "Marker grid pitch in mm (0 = none)")->capture_default_str();
  simulate->add_option("--marker-radius", sim_args.marker_radius, "Marker dot radius in mm")->capture_default_str();
  simulate->add_option("--step-deg", sim_args.step_deg, "Cube rotation per frame")->capture_default_str();
  simulate->add_option("--indentation", sim_args.indentation, "Cube corner indentation in mm")->capture_default_str();

  std::string calib_input;
  auto* calibrate = app.add_subcommand("calibrate", "Build mapper training samples from ball presses");
  calibrate->add_option("--input", calib_input, "Directory written by simulate --scenario ball-press");

  std::string samples;
  TrainArgs mapper_train;
  auto* train_mapper = app.add_subcommand("train-mapper", "Train the colour-to-gradient MLP");
  train_mapper->add_option("--samples", samples, "calibration_train.csv");
  add_train(train_mapper, mapper_train);

  CompletionArgs completion_args;
  TrainArgs completion_train;
  auto* train_completion = app.add_subcommand("train-completion", "Train the Gy-to-Gx encoder-decoder");
  train_completion->add_option("--count", completion_args.count, "Synthetic surfaces")->capture_default_str();
  train_completion->add_option("--height", completion_args.height)->capture_default_str();
  train_completion->add_option("--width", completion_args.width)->capture_default_str();
  add_train(train_completion, completion_train);

  ReconstructArgs rec_args;
  auto* reconstruct = app.add_subcommand("reconstruct", "Frame + background -> depth");
  reconstruct->add_option("--frame", rec_args.frame, "Contact frame (FRAS, 3 channels)");
  reconstruct->add_option("--background", rec_args.background, "Blank frame (FRAS, 3 channels)");
  reconstruct->add_option("--mapper", rec_args.mapper, "Mapper weights (NNWT)");
  reconstruct->add_option("--completion", rec_args.completion, "Completion weights (NNWT)");
  reconstruct->add_option("--marker-mask", rec_args.marker_mask, "Marker mask (FRAS, 1 channel)");

  AblateArgs ablate_args;
  auto* ablate = app.add_subcommand("ablate", "Gradient errors per light configuration");
  ablate->add_option("--input", ablate_args.input, "Ball-press corpus directory");
  ablate->add_option("--split", ablate_args.split, "split.json from calibrate");
  ablate->add_option("--mappers", ablate_args.mappers, "Directory holding mapper_<MODE>.nnwt");
  ablate->add_option("--completion", ablate_args.completion, "Completion weights (NNWT)");
  ablate->add_option("--modes", ablate_args.modes, "Comma-separated light configurations")->capture_default_str();

  TrackArgs track_args;
  pose::IcpParams icp_params;
  auto* track = app.add_subcommand("track", "ICP pose tracking over a depth sequence");
  track->add_option("--input", track_args.input, "Directory with frame_NNN_depth.fras / frame_NNN_mask.fras");
  track->add_option("--model", track_args.model, "Model cloud CSV (x,y,z)");
  track->add_option("--init", track_args.init, "Initial pose JSON");
  track->add_option("--max-iterations", icp_params.max_iterations)->capture_default_str();
  track->add_option("--max-dist", icp_params.max_correspondence_dist)->capture_default_str();
  track->add_option("--eps", icp_params.convergence_eps)->capture_default_str();

  ReproArgs repro_args;
  auto* repro = app.add_subcommand("repro-table1", "simulate -> calibrate -> train -> ablate with fixed seeds");
  repro->add_option("--presses", repro_args.presses, "Ball presses")->capture_default_str();
  repro->add_option("--surfaces", repro_args.completion.count, "Completion training surfaces")->capture_default_str();
  repro->add_option("--mapper-epochs", repro_args.mapper_train.epochs, "Mapper epochs");
  repro->add_option("--completion-epochs", repro_args.completion_train.epochs, "Completion epochs");
  repro->add_option("--modes", repro_args.modes)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    try {
      if (!mode_flag.empty()) cfg.mode.lights = recon::lights_from_string(mode_flag);
      if (use_nn) cfg.mode.use_completion = true;
      if (!marker_method.empty()) cfg.marker_method = imgproc::marker_method_from_string(marker_method);
      cfg.mode.validate();
      icp_params.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    const fs::path out_path(out_dir);

    std::string summary;
    if (*simulate) summary = cmd_simulate(cfg, sim_args, out_path);
    else if (*calibrate) summary = cmd_calibrate(cfg, calib_input, out_path);
    else if (*train_mapper) summary = cmd_train_mapper(cfg, samples, mapper_train, out_path);
    else if (*train_completion) summary = cmd_train_completion(cfg, completion_args, completion_train, out_path);
    else if (*reconstruct) summary = cmd_reconstruct(cfg, rec_args, out_path);
    else if (*ablate) summary = cmd_ablate(cfg, ablate_args, out_path);
    else if (*track) summary = cmd_track(cfg, track_args, icp_params, out_path);
    else if (*repro) summary = cmd_repro(cfg, repro_args, out_path);
    out << summary << "\n";
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wedge::cli
