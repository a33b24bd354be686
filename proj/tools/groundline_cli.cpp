// groundline: ground-plane normal estimation from ego-motion.
//
// Exit codes: 0 success, 1 data error, 2 usage/config error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "groundline/groundline.hpp"

namespace fs = std::filesystem;
using namespace groundline;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s, std::size_t expected, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + tok + "' is not a number");
    }
  }
  if (v.size() != expected) throw UsageError(flag + " expects " + std::to_string(expected) + " comma-separated values");
  return v;
}

// --- intrinsics ------------------------------------------------------------

struct IntrinsicsOpts {
  std::string intrinsics;  // fx,fy,cx,cy,width,height
  std::string calib;       // KITTI calib.txt
  std::string camera = "P2";
  int width = 1241;
  int height = 376;

  void add(CLI::App* app) {
    app->add_option("--intrinsics", intrinsics, "Camera intrinsics fx,fy,cx,cy,width,height");
    app->add_option("--calib", calib, "KITTI calib.txt (intrinsics from --camera row)");
    app->add_option("--camera", camera, "Projection row used with --calib")->capture_default_str();
    app->add_option("--width", width, "Image width used with --calib")->capture_default_str();
    app->add_option("--height", height, "Image height used with --calib")->capture_default_str();
  }

  CameraIntrinsics resolve() const {
    CameraIntrinsics k;
    if (!intrinsics.empty()) {
      const auto v = parse_list(intrinsics, 6, "--intrinsics");
      k = {v[0], v[1], v[2], v[3], static_cast<int>(v[4]), static_cast<int>(v[5])};
    } else if (!calib.empty()) {
      k = io::read_kitti_calib(calib, camera).intrinsics;
      k.width = width;
      k.height = height;
    } else {
      throw Error("missing camera intrinsics: pass --intrinsics or --calib");
    }
    k.validate();
    return k;
  }
};

ExtrinsicCalibration load_extrinsic(const std::string& path) {
  if (path.empty()) return {};
  return {io::read_transform_3x4(path)};
}

// --- simulate --------------------------------------------------------------

struct SimulateCmd {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("simulate", "Generate a synthetic drive with ground-truth normals");
    app->add_option("--config", config, "SimConfig JSON (defaults used when omitted)");
    app->add_option("--seed", seed, "Override the config seed");
    app->add_option("--out", out, "Output directory")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() const {
    SimConfig cfg;
    if (!config.empty()) cfg = io::read_sim_config(config);
    if (seed) cfg.seed = *seed;
    const SimOutput sim = simulate(cfg);
    fs::create_directories(out);
    io::write_poses(sim.odometry, fs::path(out) / "odometry.csv", io::PoseFormat::RelativeCsv);
    io::write_poses(OdometrySequence{OdometryKind::Absolute, sim.gt_poses, cfg.frame_rate},
                    fs::path(out) / "gt_poses.txt", io::PoseFormat::KittiAbsolute);
    std::vector<io::NormalRow> rows;
    for (std::size_t i = 0; i < sim.gt_normals.size(); ++i) {
      const auto d = normal_deviation(sim.gt_normals[i], UnitVector3::unit_y());
      rows.push_back({i, sim.gt_normals[i], rad_to_deg(d.pitch)});
    }
    io::write_normals(rows, fs::path(out) / "gt_normals.csv");
    std::cout << "wrote " << cfg.frames << " frames to " << out << "\n";
  }
};

// --- estimate --------------------------------------------------------------

struct EstimateCmd {
  std::vector<std::string> inputs;
  std::string format = "kitti";
  std::string estimator = "iekf";
  double process_var = 1e-2;
  double meas_var = 1.0;
  std::string extrinsic;
  std::size_t burn_in = 20;
  bool raw_residual = false;
  std::string init = "first";
  long downsample = 1;
  double frame_rate = 10.0;
  std::string out = "normals.csv";
  unsigned jobs = 1;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("estimate", "Estimate per-frame ground normals from odometry");
    app->add_option("--input", inputs, "Odometry file(s)")->required();
    app->add_option("--format", format, "Odometry format")->check(CLI::IsMember({"kitti", "relcsv"}))->capture_default_str();
    app->add_option("--estimator", estimator, "Estimator")
        ->check(CLI::IsMember({"iekf", "constant", "relative", "absolute"}))
        ->capture_default_str();
    app->add_option("--process-var", process_var, "Process variance scale p")->capture_default_str();
    app->add_option("--meas-var", meas_var, "Measurement variance scale m")->capture_default_str();
    app->add_option("--extrinsic", extrinsic, "Sensor-to-ground extrinsic (12 floats, row-major 3x4); identity if omitted");
    app->add_option("--burn-in", burn_in, "Burn-in frames")->capture_default_str();
    app->add_flag("--raw-residual", raw_residual, "Emit the residual's y column without the extrinsic");
    app->add_option("--init", init, "Filter initialization")->check(CLI::IsMember({"first", "identity"}))->capture_default_str();
    app->add_option("--downsample", downsample, "Integrate N relative frames into one (e.g. 10 for 100 Hz IMU)")
        ->capture_default_str();
    app->add_option("--frame-rate", frame_rate, "Input frame rate, Hz")->capture_default_str();
    app->add_option("--out", out, "Output NormalCsv (a directory when several inputs are given)")->capture_default_str();
    app->add_option("--jobs", jobs, "Parallel sequences")->check(CLI::PositiveNumber)->capture_default_str();
    app->callback([this] { run(); });
  }

  struct Result {
    std::vector<NormalEstimate> estimates;
    std::vector<double> step_us;
  };

  Result process(const std::string& input) const {
    OdometrySequence seq = io::parse_poses(input, io::pose_format_from_string(format), frame_rate);
    if (downsample != 1) {
      if (seq.kind == OdometryKind::Absolute) seq = differentiate(seq);
      seq = io::downsample_imu(seq, downsample);
    }
    if (seq.empty()) throw EmptySequenceError();
    const ExtrinsicCalibration ext = load_extrinsic(extrinsic);
    const FilterParams params{process_var, meas_var};
    EstimatorOptions opts;
    opts.burn_in = burn_in;
    opts.raw_residual = raw_residual;
    opts.init = init == "identity" ? Initialization::Identity : Initialization::FirstObservation;

    Result r;
    const EstimatorKind kind = estimator_kind_from_string(estimator);
    if (kind == EstimatorKind::Iekf) {
      const auto poses = absolute_poses(seq);
      GroundNormalEstimator est(ext, params, opts);
      r.estimates.reserve(poses.size());
      r.step_us.reserve(poses.size());
      for (const auto& pose : poses) {
        const auto t0 = std::chrono::steady_clock::now();
        r.estimates.push_back(est.step(pose));
        const auto t1 = std::chrono::steady_clock::now();
        r.step_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
      }
    } else {
      r.estimates = run_estimator(kind, seq, ext, params, opts);
    }
    return r;
  }

  void run() const {
    const FilterParams params{process_var, meas_var};
    try {
      params.validate();
    } catch (const InvalidConfigError& e) {
      throw UsageError(e.what());
    }
    const bool many = inputs.size() > 1;
    if (many) fs::create_directories(out);

    std::vector<std::future<Result>> futures;
    std::vector<Result> results(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); i += jobs) {
      futures.clear();
      for (std::size_t k = i; k < std::min(inputs.size(), i + jobs); ++k)
        futures.push_back(std::async(std::launch::async, [this, k] { return process(inputs[k]); }));
      for (std::size_t k = 0; k < futures.size(); ++k) results[i + k] = futures[k].get();
    }

    std::vector<double> all_us;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const fs::path dst = many ? fs::path(out) / (fs::path(inputs[i]).stem().string() + ".normals.csv") : fs::path(out);
      io::write_normals(results[i].estimates, dst);
      all_us.insert(all_us.end(), results[i].step_us.begin(), results[i].step_us.end());
      std::cout << "wrote " << results[i].estimates.size() << " normals to " << dst.string() << "\n";
    }
    if (!all_us.empty()) {
      double mean = 0.0;
      for (double v : all_us) mean += v;
      mean /= static_cast<double>(all_us.size());
      std::sort(all_us.begin(), all_us.end());
      const double p99 = all_us[std::min(all_us.size() - 1, static_cast<std::size_t>(0.99 * all_us.size()))];
      std::printf("iekf step latency: mean %.3f ms, p99 %.3f ms over %zu frames\n", mean / 1000.0, p99 / 1000.0,
                  all_us.size());
    }
  }
};

// --- evaluate --------------------------------------------------------------

struct EvaluateCmd {
  std::string estimate;
  std::string gt;
  std::size_t burn_in = 20;
  std::string out;
  std::string csv;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("evaluate", "Mean angular error between estimated and ground-truth normals");
    app->add_option("--estimate", estimate, "Estimated NormalCsv")->required();
    app->add_option("--gt", gt, "Ground-truth NormalCsv")->required();
    app->add_option("--burn-in", burn_in, "Leading frames excluded")->capture_default_str();
    app->add_option("--out", out, "ErrorReport JSON");
    app->add_option("--csv", csv, "Per-frame error CSV");
    app->callback([this] { run(); });
  }

  void run() const {
    const auto est = io::read_normals(estimate);
    const auto ref = io::read_normals(gt);
    const ErrorReport r = angular_error(io::normals_of(est), io::normals_of(ref), burn_in);
    if (!out.empty()) io::write_report(r, out);
    if (!csv.empty()) io::write_report_csv(r, csv);
    std::printf("mean_error_deg: %.6f\nmean_error_rad: %.9f\nframes: %zu\n", r.mean_error_deg, r.mean_error_rad,
                r.frames_counted);
  }
};

// --- stats -----------------------------------------------------------------

struct StatsCmd {
  std::string gt;
  std::string static_normal;
  std::string extrinsic;
  std::string out;
  std::string csv;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("stats", "Pitch/roll dynamics of a ground-truth normal stream");
    app->add_option("--gt", gt, "Ground-truth NormalCsv")->required();
    auto* s = app->add_option("--static", static_normal, "Static normal x,y,z");
    app->add_option("--extrinsic", extrinsic, "Static normal from a sensor-to-ground extrinsic file")->excludes(s);
    app->add_option("--out", out, "DynamicsStats JSON");
    app->add_option("--csv", csv, "Per-frame pitch/roll CSV");
    app->callback([this] { run(); });
  }

  void run() const {
    const auto normals = io::normals_of(io::read_normals(gt));
    UnitVector3 ref = UnitVector3::unit_y();
    if (!static_normal.empty()) {
      const auto v = parse_list(static_normal, 3, "--static");
      ref = UnitVector3(v[0], v[1], v[2]);
    } else if (!extrinsic.empty()) {
      ref = load_extrinsic(extrinsic).static_normal();
    } else {
      ref = mean_normal(normals);
    }
    const DynamicsStats s = dynamics_stats(normals, ref);
    if (!out.empty()) io::write_report(s, out);
    if (!csv.empty()) io::detail::write_file(csv, io::format_stats_csv(s));
    std::printf("pitch_mean_deg: %.6f\npitch_std_deg: %.6f\nroll_mean_deg: %.6f\nroll_std_deg: %.6f\nframes: %zu\n",
                s.pitch_mean, s.pitch_std, s.roll_mean, s.roll_std, s.frame_count);
  }
};

// --- ipm / vanishing ---------------------------------------------------------

std::vector<fs::path> sorted_files(const std::string& dir, std::initializer_list<std::string_view> exts) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    for (auto x : exts)
      if (ext == x) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct IpmCmd {
  std::string normals;
  IntrinsicsOpts intr;
  double cam_height = 1.65;
  std::string out;
  std::string images;
  std::string bev_out;
  double bev_extent = 20.0;
  double bev_resolution = 0.05;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("ipm", "Per-frame IPM homographies and optional BEV warps");
    app->add_option("--normals", normals, "NormalCsv (camera frame)")->required();
    intr.add(app);
    app->add_option("--cam-height", cam_height, "Camera height above ground, m")->capture_default_str();
    app->add_option("--out", out, "Homography CSV (9 values per row)")->required();
    app->add_option("--images", images, "Directory of PGM/PPM frames, matched by sorted order");
    app->add_option("--bev-out", bev_out, "Directory for warped BEV frames");
    app->add_option("--bev-extent", bev_extent, "BEV side length, m")->capture_default_str();
    app->add_option("--bev-resolution", bev_resolution, "BEV resolution, m/pixel")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() const {
    const CameraIntrinsics k = intr.resolve();
    const auto rows = io::read_normals(normals);
    std::vector<Homography> hs;
    hs.reserve(rows.size());
    for (const auto& r : rows) hs.push_back(ipm_homography(k, GroundPlane{r.normal, cam_height}));
    io::detail::write_file(out, io::format_homographies(hs));
    std::cout << "wrote " << hs.size() << " homographies to " << out << "\n";

    if (images.empty()) return;
    if (bev_out.empty()) throw UsageError("--images requires --bev-out");
    const auto files = sorted_files(images, {".pgm", ".ppm"});
    fs::create_directories(bev_out);
    const BevGrid grid{bev_extent, bev_resolution};
    const std::size_t n = std::min(files.size(), hs.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Image bev = warp_to_bev(io::read_pnm(files[i]), hs[i], grid);
      io::write_pnm(bev, fs::path(bev_out) / (files[i].stem().string() + (bev.channels == 1 ? ".pgm" : ".ppm")));
    }
    std::cout << "wrote " << n << " BEV frames to " << bev_out << "\n";
  }
};

struct VanishingCmd {
  std::string normals;
  IntrinsicsOpts intr;
  std::string out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("vanishing", "Per-frame vanishing lines of the ground plane");
    app->add_option("--normals", normals, "NormalCsv (camera frame)")->required();
    intr.add(app);
    app->add_option("--out", out, "Vanishing-line CSV")->required();
    app->callback([this] { run(); });
  }

  void run() const {
    const CameraIntrinsics k = intr.resolve();
    const auto rows = io::read_normals(normals);
    std::vector<ImageLine> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows) lines.push_back(vanishing_line(k, r.normal));
    io::detail::write_file(out, io::format_vanishing_lines(lines, k));
    std::cout << "wrote " << lines.size() << " vanishing lines to " << out << "\n";
  }
};

// --- groundtruth -----------------------------------------------------------

struct GroundTruthCmd {
  std::string velodyne;
  std::string masks;
  IntrinsicsOpts intr;
  std::string out;
  double threshold = 0.03;
  int iterations = 200;
  std::uint64_t seed = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("groundtruth", "Ground-truth normals by RANSAC on mask-selected LiDAR points");
    app->add_option("--velodyne", velodyne, "Directory of .bin scans (or .xyz text clouds)")->required();
    app->add_option("--masks", masks, "Directory of PGM ground masks, matched by sorted order")->required();
    intr.add(app);
    app->add_option("--out", out, "Ground-truth NormalCsv (camera frame)")->required();
    app->add_option("--threshold", threshold, "RANSAC inlier threshold, m")->capture_default_str();
    app->add_option("--iterations", iterations, "RANSAC iterations")->capture_default_str();
    app->add_option("--seed", seed, "RANSAC seed")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() const {
    if (intr.calib.empty()) throw UsageError("groundtruth needs --calib for the LiDAR-to-camera transform");
    const auto calib = io::read_kitti_calib(intr.calib, intr.camera);
    const auto clouds = sorted_files(velodyne, {".bin", ".xyz"});
    const auto mask_files = sorted_files(masks, {".pgm"});
    if (clouds.size() != mask_files.size()) throw LengthMismatchError(clouds.size(), mask_files.size());

    std::vector<io::NormalRow> rows;
    for (std::size_t i = 0; i < clouds.size(); ++i) {
      const GroundMask mask = GroundMask::from_image(io::read_pnm(mask_files[i]));
      CameraIntrinsics k = calib.intrinsics;
      k.width = mask.width;
      k.height = mask.height;
      const PointCloud cloud =
          clouds[i].extension() == ".bin" ? io::read_velodyne_bin(clouds[i]) : io::read_xyz(clouds[i]);
      const PointCloud ground = select_ground_points(cloud, k, calib.cam_from_lidar, mask);
      RansacParams rp;
      rp.threshold = threshold;
      rp.iterations = iterations;
      rp.seed = seed;
      const PlaneFit fit = ransac_plane(ground, rp);
      const auto d = normal_deviation(fit.normal, UnitVector3::unit_y());
      rows.push_back({i, fit.normal, rad_to_deg(d.pitch)});
    }
    io::write_normals(rows, out);
    std::cout << "wrote " << rows.size() << " ground-truth normals to " << out << "\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groundline: ground-plane normal estimation from ego-motion"};
  app.require_subcommand(1);

  SimulateCmd simulate_cmd;
  EstimateCmd estimate_cmd;
  EvaluateCmd evaluate_cmd;
  StatsCmd stats_cmd;
  IpmCmd ipm_cmd;
  VanishingCmd vanishing_cmd;
  GroundTruthCmd groundtruth_cmd;
  simulate_cmd.add(app);
  estimate_cmd.add(app);
  evaluate_cmd.add(app);
  stats_cmd.add(app);
  ipm_cmd.add(app);
  vanishing_cmd.add(app);
  groundtruth_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
