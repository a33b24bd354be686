#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "groundline/io.hpp"

using namespace groundline;
namespace fs = std::filesystem;

namespace {

OdometrySequence parse(const std::string& text, io::PoseFormat f) {
  std::istringstream in(text);
  return io::parse_poses(in, f);
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("groundline_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                   "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(ParsePoses, IdentityLine) {
  const auto seq = parse("1 0 0 0 0 1 0 0 0 0 1 0\n", io::PoseFormat::KittiAbsolute);
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(seq.kind, OdometryKind::Absolute);
  EXPECT_EQ(seq.frames[0].rotation.matrix(), Mat3::Identity());
  EXPECT_EQ(seq.frames[0].translation, Vec3::Zero());
}

TEST(ParsePoses, ElevenTokensReportsLine) {
  try {
    parse("# comment\n1 0 0 0 0 1 0 0 0 0 1 0\n1 0 0 0 0 1 0 0 0 0 1\n", io::PoseFormat::KittiAbsolute);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParsePoses, NonFiniteRejected) {
  EXPECT_THROW(parse("1 0 0 nan 0 1 0 0 0 0 1 0\n", io::PoseFormat::KittiAbsolute), NonFiniteValueError);
  EXPECT_THROW(parse("1 0 0 inf 0 1 0 0 0 0 1 0\n", io::PoseFormat::KittiAbsolute), NonFiniteValueError);
  EXPECT_THROW(parse("1 0 0 x 0 1 0 0 0 0 1 0\n", io::PoseFormat::KittiAbsolute), ParseError);
}

TEST(ParsePoses, RelativeCsvChecksFrameOrder) {
  const std::string ok = "frame,r00,r01,r02,t0,r10,r11,r12,t1,r20,r21,r22,t2\n0,1,0,0,0,0,1,0,0,0,0,1,0\n1,1,0,0,0,0,1,0,0,0,0,1,1\n";
  const auto seq = parse(ok, io::PoseFormat::RelativeCsv);
  EXPECT_EQ(seq.kind, OdometryKind::Relative);
  EXPECT_EQ(seq.size(), 2u);
  EXPECT_THROW(parse("0,1,0,0,0,0,1,0,0,0,0,1,0\n2,1,0,0,0,0,1,0,0,0,0,1,0\n", io::PoseFormat::RelativeCsv), ParseError);
}

TEST(ParsePoses, RepairsNearRotations) {
  const auto seq = parse("1.0001 0 0 0 0 1 0 0 0 0 1 0\n", io::PoseFormat::KittiAbsolute);
  EXPECT_TRUE(seq.frames[0].rotation.is_valid(1e-12));
}

TEST(ParsePoses, RoundTripFiveHundredRandomPoses) {
  std::mt19937 rng(67);
  std::normal_distribution<double> g(0.0, 1.0);
  OdometrySequence seq{OdometryKind::Absolute, {}, 10.0};
  for (int i = 0; i < 500; ++i) {
    seq.frames.push_back({Rotation::exp(Vec3(g(rng), g(rng), g(rng))), Vec3(50 * g(rng), 50 * g(rng), 50 * g(rng))});
  }
  for (auto fmt : {io::PoseFormat::KittiAbsolute, io::PoseFormat::RelativeCsv}) {
    const auto back = absolute_poses(parse(io::format_poses(seq, fmt), fmt));
    ASSERT_EQ(back.size(), seq.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      worst = std::max(worst, (back[i].rotation.matrix() - seq.frames[i].rotation.matrix()).cwiseAbs().maxCoeff());
      if (fmt == io::PoseFormat::KittiAbsolute)
        worst = std::max(worst, (back[i].translation - seq.frames[i].translation).cwiseAbs().maxCoeff());
    }
    // Relative rows accumulate rounding over the chain; absolute rows do not.
    EXPECT_LT(worst, fmt == io::PoseFormat::KittiAbsolute ? 1e-9 : 1e-6);
  }
}

TEST(ParsePoses, FormatIsByteDeterministic) {
  const OdometrySequence seq{OdometryKind::Absolute, {Transform{Rotation::about_x(0.3), Vec3(1, -0.0, 2)}}, 10.0};
  EXPECT_EQ(io::format_poses(seq, io::PoseFormat::KittiAbsolute), io::format_poses(seq, io::PoseFormat::KittiAbsolute));
  EXPECT_EQ(io::format_poses(seq, io::PoseFormat::KittiAbsolute).find("-0.000000000"), std::string::npos);
}

TEST(Downsample, FactorOneIsIdentity) {
  OdometrySequence seq{OdometryKind::Relative, {}, 100.0};
  for (int i = 0; i < 7; ++i) seq.frames.push_back({Rotation::about_z(0.01 * i), Vec3(0, 0, i)});
  const auto out = io::downsample_imu(seq, 1);
  ASSERT_EQ(out.size(), seq.size());
  EXPECT_EQ(out.frame_rate, 100.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_LT((out.frames[i].rotation.matrix() - seq.frames[i].rotation.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Downsample, TenSmallStepsComposeToOne) {
  OdometrySequence seq{OdometryKind::Relative, std::vector<Transform>(10, Transform{Rotation::about_x(deg_to_rad(0.1)), Vec3::Zero()}),
                       100.0};
  const auto out = io::downsample_imu(seq, 10);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_LT(out.frames[0].rotation.angle_to(Rotation::about_x(deg_to_rad(1.0))), 1e-12);
  EXPECT_EQ(out.frame_rate, 10.0);
}

TEST(Downsample, TrailingRemainderDroppedWithWarning) {
  std::vector<std::string> messages;
  auto previous = logging::set_sink([&](logging::Level, std::string_view m) { messages.emplace_back(m); });
  logging::set_level(logging::Level::Warn);
  OdometrySequence seq{OdometryKind::Relative, std::vector<Transform>(25, Transform::identity()), 100.0};
  const auto out = io::downsample_imu(seq, 10);
  logging::set_sink(previous);
  logging::set_level(logging::level_from_env());
  EXPECT_EQ(out.size(), 2u);
  ASSERT_EQ(messages.size(), 1u);
  EXPECT_NE(messages[0].find("5 trailing"), std::string::npos);
}

TEST(Downsample, InvalidFactor) {
  OdometrySequence seq{OdometryKind::Relative, std::vector<Transform>(3), 10.0};
  EXPECT_THROW(io::downsample_imu(seq, 0), InvalidFactorError);
  seq.kind = OdometryKind::Absolute;
  EXPECT_THROW(io::downsample_imu(seq, 2), AlreadyAbsoluteError);
}

TEST(Normals, EmptyListIsHeaderOnly) {
  EXPECT_EQ(io::format_normals(std::vector<NormalEstimate>{}), "frame,nx,ny,nz,pitch_deg\n");
}

TEST(Normals, FixedFormattingOfSingleRow) {
  NormalEstimate e;
  e.normal = UnitVector3::unit_y();
  e.pitch = 0.0;
  EXPECT_EQ(io::format_normals(std::vector<NormalEstimate>{e}),
            "frame,nx,ny,nz,pitch_deg\n0,0.000000000,1.000000000,0.000000000,0.000000\n");
}

TEST(Normals, RoundTrip) {
  std::mt19937 rng(71);
  std::normal_distribution<double> g(0.0, 0.05);
  std::vector<NormalEstimate> est;
  for (std::size_t i = 0; i < 100; ++i) {
    NormalEstimate e;
    e.frame_index = i;
    e.normal = UnitVector3(g(rng), 1.0, g(rng));
    e.pitch = g(rng);
    est.push_back(e);
  }
  std::istringstream in(io::format_normals(est));
  const auto rows = io::parse_normals(in);
  ASSERT_EQ(rows.size(), est.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].frame, i);
    EXPECT_LT((rows[i].normal.vec() - est[i].normal.vec()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(rows[i].pitch_deg, rad_to_deg(est[i].pitch), 1e-6);
  }
  EXPECT_EQ(io::format_normals(rows).substr(0, 24), io::format_normals(est).substr(0, 24));
}

TEST(Normals, RejectsMalformedRows) {
  std::istringstream a("frame,nx,ny,nz,pitch_deg\n0,0,1,0\n");
  EXPECT_THROW(io::parse_normals(a), ParseError);
  std::istringstream b("0,0,nan,0,0\n");
  EXPECT_THROW(io::parse_normals(b), NonFiniteValueError);
  std::istringstream c("0,0,0,0,0\n");
  EXPECT_THROW(io::parse_normals(c), ParseError);
}

TEST(Reports, JsonIsDeterministic) {
  const ErrorReport r = angular_error({UnitVector3(0.01, 1, 0)}, {UnitVector3::unit_y()});
  const std::string a = io::to_json(r).dump(2);
  EXPECT_EQ(a, io::to_json(r).dump(2));
  const auto j = nlohmann::json::parse(a);
  EXPECT_DOUBLE_EQ(j["mean_error_rad"].get<double>(), r.mean_error_rad);
  EXPECT_EQ(j["frames_counted"].get<std::size_t>(), 1u);
}

TEST(Reports, WriteToMissingDirectoryThrows) {
  EXPECT_THROW(io::write_report(ErrorReport{}, "/nonexistent-dir/x/report.json"), IoError);
}

TEST(Projective, HomographyAndVanishingRows) {
  const CameraIntrinsics k{700, 700, 600, 185, 1242, 375};
  const std::string h = io::format_homographies({ipm_homography(k, GroundPlane{})});
  EXPECT_EQ(std::count(h.begin(), h.end(), '\n'), 2);
  const std::string v = io::format_vanishing_lines({vanishing_line(k, UnitVector3::unit_y())}, k);
  EXPECT_NE(v.find("\n0,0.000000000,1.000000000,-185.000000000,0.000000,185.000000,1241.000000,185.000000\n"),
            std::string::npos);
}

TEST(PointClouds, VelodyneRoundTrip) {
  PointCloud c;
  c.points = {Vec3(1.5, -2.25, 0.125), Vec3(-10, 20, 3)};
  const PointCloud back = io::parse_velodyne_bin(io::format_velodyne_bin(c));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.points[0], c.points[0]);
  EXPECT_THROW(io::parse_velodyne_bin(std::string(15, '\0')), IoError);
}

TEST(PointClouds, Xyz) {
  std::istringstream in("# x y z\n1 2 3\n4 5 6 0.7\n");
  const PointCloud c = io::parse_xyz(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[1], Vec3(4, 5, 6));
}

TEST(Pnm, RoundTripGrayAndColor) {
  Image g(4, 3, 1, 0);
  g.at(1, 2) = 200;
  const Image gb = io::parse_pnm(io::format_pnm(g));
  EXPECT_EQ(gb.data, g.data);
  Image c(2, 2, 3, 5);
  c.at(1, 1, 2) = 9;
  const Image cb = io::parse_pnm(io::format_pnm(c));
  EXPECT_EQ(cb.channels, 3);
  EXPECT_EQ(cb.data, c.data);
  EXPECT_THROW(io::parse_pnm("P2\n1 1\n255\n0"), IoError);
  EXPECT_THROW(io::parse_pnm("P5\n4 4\n255\nab"), IoError);
}

TEST(Calibration, KittiCalibFile) {
  std::istringstream in(
      "P0: 718.856 0 607.1928 0 0 718.856 185.2157 0 0 0 1 0\n"
      "P2: 718.856 0 607.1928 45.38225 0 718.856 185.2157 -0.1130887 0 0 1 0.003779761\n"
      "Tr: 0 -1 0 0 0 0 -1 -0.08 1 0 0 -0.27\n");
  const io::KittiCalib calib = io::parse_kitti_calib(in);
  EXPECT_DOUBLE_EQ(calib.intrinsics.fx, 718.856);
  EXPECT_DOUBLE_EQ(calib.intrinsics.cy, 185.2157);
  EXPECT_LT((calib.cam_from_lidar * Vec3(10, 0, 0) - Vec3(0, -0.08, 9.73)).norm(), 1e-12);
  std::istringstream missing("P2: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  EXPECT_THROW(io::parse_kitti_calib(missing), ParseError);
}

TEST(Calibration, Transform3x4) {
  std::istringstream in("# extrinsic\n1 0 0 0.5 0 1 0 1.6 0 0 1 0\n");
  const Transform t = io::parse_transform_3x4(in);
  EXPECT_EQ(t.translation, Vec3(0.5, 1.6, 0));
}

TEST(SimConfigJson, ParsesAndValidates) {
  const auto j = nlohmann::json::parse(
      R"({"frames": 100, "pitch_amplitude": 1.5, "slope_profile": [[0, 0], [50, 2]], "seed": 3})");
  const SimConfig c = io::sim_config_from_json(j);
  EXPECT_EQ(c.frames, 100u);
  EXPECT_EQ(c.pitch_amplitude, 1.5);
  EXPECT_EQ(c.slope_profile.size(), 2u);
  EXPECT_EQ(c.seed, 3u);
  try {
    io::sim_config_from_json(nlohmann::json::parse(R"({"frames": 0})"));
    FAIL();
  } catch (const InvalidConfigError& e) {
    EXPECT_EQ(e.field(), "frames");
  }
  EXPECT_THROW(io::sim_config_from_json(nlohmann::json::parse(R"({"framez": 10})")), InvalidConfigError);
  EXPECT_THROW(io::sim_config_from_json(nlohmann::json::parse(R"({"speed": "fast"})")), InvalidConfigError);
}

TEST(Files, WriteAndReadBack) {
  const fs::path d = temp_dir();
  OdometrySequence seq{OdometryKind::Absolute, {Transform::identity(), Transform{Rotation::about_y(0.2), Vec3(0, 0, 1)}}, 10.0};
  io::write_poses(seq, d / "poses.txt", io::PoseFormat::KittiAbsolute);
  const auto back = io::parse_poses(d / "poses.txt", io::PoseFormat::KittiAbsolute);
  EXPECT_EQ(back.size(), 2u);
  EXPECT_THROW(io::parse_poses(d / "missing.txt", io::PoseFormat::KittiAbsolute), IoError);
  fs::remove_all(d);
}
