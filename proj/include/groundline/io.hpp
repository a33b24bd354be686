#pragma once

// Dataset ingestion and result serialization.
//
// Text formats are UTF-8, newline-delimited; lines starting with '#' and
// blank lines are ignored. Writers use fixed decimal formatting so identical
// inputs give identical bytes.
//
//   KittiAbsolute  12 whitespace-separated floats per line, row-major [R | t]
//   RelativeCsv    frame,r00,r01,r02,t0,r10,r11,r12,t1,r20,r21,r22,t2
//                  (frame 0 is the absolute initial pose)
//   NormalCsv      frame,nx,ny,nz,pitch_deg

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "groundline/errors.hpp"
#include "groundline/estimator.hpp"
#include "groundline/geom.hpp"
#include "groundline/groundtruth.hpp"
#include "groundline/log.hpp"
#include "groundline/metrics.hpp"
#include "groundline/projective.hpp"
#include "groundline/raster.hpp"
#include "groundline/sim.hpp"

namespace groundline::io {

enum class PoseFormat { KittiAbsolute, RelativeCsv, NormalCsv };

inline PoseFormat pose_format_from_string(std::string_view s) {
  if (s == "kitti") return PoseFormat::KittiAbsolute;
  if (s == "relcsv") return PoseFormat::RelativeCsv;
  if (s == "normalcsv") return PoseFormat::NormalCsv;
  throw InvalidConfigError("format", "unknown pose format '" + std::string(s) + "'");
}

namespace detail {

inline std::string fixed(double v, int digits) {
  const double half_ulp = 0.5 * std::pow(10.0, -digits);
  if (std::abs(v) < half_ulp) v = 0.0;  // no "-0.000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

inline std::vector<std::string_view> split(std::string_view s, bool comma) {
  std::vector<std::string_view> out;
  if (comma) {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = s.find(',', start);
      out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      const std::size_t start = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i > start) out.push_back(s.substr(start, i - start));
    }
  }
  return out;
}

inline double to_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    // from_chars rejects "nan"/"inf" spellings only on some libraries; treat
    // them uniformly as non-finite.
    std::string lower(tok);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos)
      throw NonFiniteValueError(line);
    throw ParseError(line, "not a number: '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw NonFiniteValueError(line);
  return v;
}

inline long to_long(std::string_view tok, std::size_t line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
    throw ParseError(line, "not an integer: '" + std::string(tok) + "'");
  return v;
}

/// Repairs a loaded 3x4 matrix into a Transform.
inline Transform transform_from_12(const double* v, std::size_t line) {
  Mat3 m;
  m << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
  const Rotation r = Rotation::nearest(m);
  const double correction = (r.matrix() - m).cwiseAbs().maxCoeff();
  if (correction > 1e-3) {
    logging::warn("RotationRepair: line " + std::to_string(line) + " rotation corrected by " + std::to_string(correction));
  }
  return {r, Vec3(v[3], v[7], v[11])};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void append_3x4(std::string& out, const Transform& t, char sep) {
  const auto m = t.matrix3x4();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (r != 0 || c != 0) out += sep;
      out += fixed(m(r, c), 9);
    }
  }
}

}  // namespace detail

// --- poses -----------------------------------------------------------------

inline OdometrySequence parse_poses(std::istream& in, PoseFormat format, double frame_rate = 10.0) {
  if (format == PoseFormat::NormalCsv) throw InvalidConfigError("format", "NormalCsv is not a pose format");
  const bool relative = format == PoseFormat::RelativeCsv;
  OdometrySequence seq{relative ? OdometryKind::Relative : OdometryKind::Absolute, {}, frame_rate};

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto toks = detail::split(detail::trim(line), relative);
    const std::size_t expected = relative ? 13 : 12;
    if (toks.size() != expected) {
      throw ParseError(lineno, "expected " + std::to_string(expected) + " fields, got " + std::to_string(toks.size()));
    }
    std::size_t offset = 0;
    if (relative) {
      if (toks[0] == "frame") continue;  // header row
      const long frame = detail::to_long(toks[0], lineno);
      if (frame != static_cast<long>(seq.frames.size()))
        throw ParseError(lineno, "frame index " + std::to_string(frame) + " out of sequence");
      offset = 1;
    }
    double v[12];
    for (std::size_t i = 0; i < 12; ++i) v[i] = detail::to_double(toks[i + offset], lineno);
    seq.frames.push_back(detail::transform_from_12(v, lineno));
  }
  return seq;
}

inline OdometrySequence parse_poses(const std::filesystem::path& path, PoseFormat format, double frame_rate = 10.0) {
  std::istringstream in(detail::read_file(path));
  return parse_poses(in, format, frame_rate);
}

/// KittiAbsolute writes absolute poses (accumulating a relative sequence);
/// RelativeCsv writes relative motions (differentiating an absolute one).
inline std::string format_poses(const OdometrySequence& seq, PoseFormat format) {
  std::string out;
  if (format == PoseFormat::KittiAbsolute) {
    const auto poses = absolute_poses(seq);
    for (const auto& t : poses) {
      detail::append_3x4(out, t, ' ');
      out += '\n';
    }
  } else if (format == PoseFormat::RelativeCsv) {
    const OdometrySequence rel = seq.kind == OdometryKind::Relative ? seq : differentiate(seq);
    out += "frame,r00,r01,r02,t0,r10,r11,r12,t1,r20,r21,r22,t2\n";
    for (std::size_t i = 0; i < rel.size(); ++i) {
      out += std::to_string(i);
      out += ',';
      detail::append_3x4(out, rel.frames[i], ',');
      out += '\n';
    }
  } else {
    throw InvalidConfigError("format", "NormalCsv is not a pose format");
  }
  return out;
}

inline void write_poses(const OdometrySequence& seq, const std::filesystem::path& path, PoseFormat format) {
  detail::write_file(path, format_poses(seq, format));
}

/// Integrates groups of `factor` consecutive relative motions. Frame 0 (the
/// initial pose) is part of the first group, so output frame j equals the
/// input absolute pose at index (j + 1) * factor - 1 relative to its
/// predecessor. A trailing partial group is dropped with a warning.
inline OdometrySequence downsample_imu(const OdometrySequence& seq, long factor) {
  if (factor < 1) throw InvalidFactorError(factor);
  if (seq.kind != OdometryKind::Relative) throw AlreadyAbsoluteError("downsampling expects a relative sequence");
  const auto f = static_cast<std::size_t>(factor);
  OdometrySequence out{OdometryKind::Relative, {}, seq.frame_rate / static_cast<double>(factor)};
  const std::size_t groups = seq.size() / f;
  out.frames.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    Transform t = seq.frames[g * f];
    for (std::size_t i = 1; i < f; ++i) t = t * seq.frames[g * f + i];
    t.rotation = t.rotation.orthonormalized();
    out.frames.push_back(t);
  }
  const std::size_t dropped = seq.size() - groups * f;
  if (dropped > 0) logging::warn("downsample_imu: dropped " + std::to_string(dropped) + " trailing frame(s)");
  return out;
}

// --- normals ---------------------------------------------------------------

struct NormalRow {
  std::size_t frame = 0;
  UnitVector3 normal = UnitVector3::unit_y();
  double pitch_deg = 0.0;
};

inline constexpr std::string_view kNormalHeader = "frame,nx,ny,nz,pitch_deg";

inline std::string format_normal_row(std::size_t frame, const UnitVector3& n, double pitch_deg) {
  std::string s = std::to_string(frame);
  s += ',' + detail::fixed(n.x(), 9) + ',' + detail::fixed(n.y(), 9) + ',' + detail::fixed(n.z(), 9) + ',' +
       detail::fixed(pitch_deg, 6);
  return s;
}

inline std::string format_normals(const std::vector<NormalEstimate>& estimates) {
  std::string out(kNormalHeader);
  out += '\n';
  for (const auto& e : estimates) {
    out += format_normal_row(e.frame_index, e.normal, rad_to_deg(e.pitch));
    out += '\n';
  }
  return out;
}

inline std::string format_normals(const std::vector<NormalRow>& rows) {
  std::string out(kNormalHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += format_normal_row(r.frame, r.normal, r.pitch_deg);
    out += '\n';
  }
  return out;
}

inline void write_normals(const std::vector<NormalEstimate>& estimates, const std::filesystem::path& path) {
  detail::write_file(path, format_normals(estimates));
}

inline void write_normals(const std::vector<NormalRow>& rows, const std::filesystem::path& path) {
  detail::write_file(path, format_normals(rows));
}

inline std::vector<NormalRow> parse_normals(std::istream& in) {
  std::vector<NormalRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto toks = detail::split(detail::trim(line), true);
    if (toks.size() != 5) throw ParseError(lineno, "expected 5 fields, got " + std::to_string(toks.size()));
    if (toks[0] == "frame") continue;
    const long frame = detail::to_long(toks[0], lineno);
    if (frame < 0) throw ParseError(lineno, "negative frame index");
    const Vec3 n(detail::to_double(toks[1], lineno), detail::to_double(toks[2], lineno),
                 detail::to_double(toks[3], lineno));
    if (n.norm() < 0.5) throw ParseError(lineno, "normal is not a unit vector");
    rows.push_back({static_cast<std::size_t>(frame), UnitVector3(n), detail::to_double(toks[4], lineno)});
  }
  return rows;
}

inline std::vector<NormalRow> read_normals(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file(path));
  return parse_normals(in);
}

inline std::vector<UnitVector3> normals_of(const std::vector<NormalRow>& rows) {
  std::vector<UnitVector3> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.normal);
  return out;
}

// --- reports ---------------------------------------------------------------

inline nlohmann::ordered_json to_json(const ErrorReport& r) {
  nlohmann::ordered_json j;
  j["mean_error_rad"] = r.mean_error_rad;
  j["mean_error_deg"] = r.mean_error_deg;
  j["frames_counted"] = r.frames_counted;
  j["first_frame"] = r.first_frame;
  j["per_frame_errors"] = r.per_frame_errors;
  return j;
}

inline nlohmann::ordered_json to_json(const DynamicsStats& s) {
  nlohmann::ordered_json j;
  j["frame_count"] = s.frame_count;
  j["pitch_mean_deg"] = s.pitch_mean;
  j["pitch_std_deg"] = s.pitch_std;
  j["roll_mean_deg"] = s.roll_mean;
  j["roll_std_deg"] = s.roll_std;
  j["bucket_width_deg"] = s.bucket_width;
  j["pitch_histogram"] = s.pitch_histogram;
  j["roll_histogram"] = s.roll_histogram;
  return j;
}

inline void write_report(const ErrorReport& r, const std::filesystem::path& path) {
  detail::write_file(path, to_json(r).dump(2) + "\n");
}

inline void write_report(const DynamicsStats& s, const std::filesystem::path& path) {
  detail::write_file(path, to_json(s).dump(2) + "\n");
}

/// One row per counted frame: frame,error_rad,error_deg.
inline std::string format_report_csv(const ErrorReport& r) {
  std::string out = "frame,error_rad,error_deg\n";
  for (std::size_t i = 0; i < r.per_frame_errors.size(); ++i) {
    const double e = r.per_frame_errors[i];
    out += std::to_string(r.first_frame + i) + ',' + detail::fixed(e, 9) + ',' + detail::fixed(rad_to_deg(e), 9) + '\n';
  }
  return out;
}

inline void write_report_csv(const ErrorReport& r, const std::filesystem::path& path) {
  detail::write_file(path, format_report_csv(r));
}

/// One row per frame: frame,pitch_deg,roll_deg (signed deviations).
inline std::string format_stats_csv(const DynamicsStats& s) {
  std::string out = "frame,pitch_deg,roll_deg\n";
  for (std::size_t i = 0; i < s.pitch_deviation.size(); ++i) {
    out += std::to_string(i) + ',' + detail::fixed(s.pitch_deviation[i], 9) + ',' +
           detail::fixed(s.roll_deviation[i], 9) + '\n';
  }
  return out;
}

// --- projective outputs ----------------------------------------------------

/// Nine values per row, the normalized homography in row-major order.
inline std::string format_homographies(const std::vector<Homography>& hs) {
  std::string out = "# h00,h01,h02,h10,h11,h12,h20,h21,h22\n";
  for (const auto& h : hs) {
    const Mat3 m = h.normalized();
    for (int i = 0; i < 9; ++i) {
      if (i) out += ',';
      out += detail::fixed(m(i / 3, i % 3), 9);
    }
    out += '\n';
  }
  return out;
}

/// Vanishing line per frame plus its endpoints clipped to the image width
/// (or height for near-vertical lines).
inline std::string format_vanishing_lines(const std::vector<ImageLine>& lines, const CameraIntrinsics& intr) {
  std::string out = "frame,a,b,c,u0,v0,u1,v1\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    double u0, v0, u1, v1;
    if (std::abs(l.b) >= std::abs(l.a)) {
      u0 = 0.0;
      u1 = intr.width > 0 ? intr.width - 1.0 : 0.0;
      v0 = l.v_at(u0);
      v1 = l.v_at(u1);
    } else {
      v0 = 0.0;
      v1 = intr.height > 0 ? intr.height - 1.0 : 0.0;
      u0 = l.u_at(v0);
      u1 = l.u_at(v1);
    }
    out += std::to_string(i) + ',' + detail::fixed(l.a, 9) + ',' + detail::fixed(l.b, 9) + ',' + detail::fixed(l.c, 9) +
           ',' + detail::fixed(u0, 6) + ',' + detail::fixed(v0, 6) + ',' + detail::fixed(u1, 6) + ',' +
           detail::fixed(v1, 6) + '\n';
  }
  return out;
}

// --- point clouds ----------------------------------------------------------

/// Plain-text "x y z" per line (extra columns ignored).
inline PointCloud parse_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto toks = detail::split(detail::trim(line), false);
    if (toks.size() < 3) throw ParseError(lineno, "expected 'x y z'");
    cloud.points.emplace_back(detail::to_double(toks[0], lineno), detail::to_double(toks[1], lineno),
                              detail::to_double(toks[2], lineno));
  }
  return cloud;
}

inline PointCloud read_xyz(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file(path));
  return parse_xyz(in);
}

/// KITTI Velodyne scan: little-endian float32 (x, y, z, intensity) records.
inline PointCloud parse_velodyne_bin(std::string_view bytes) {
  if (bytes.size() % 16 != 0) throw IoError("velodyne scan size is not a multiple of 16 bytes");
  PointCloud cloud;
  cloud.points.reserve(bytes.size() / 16);
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    float v[3];
    for (int i = 0; i < 3; ++i) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b)
        u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 4 * i + b])) << (8 * b);
      std::memcpy(&v[i], &u, sizeof u);
    }
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) continue;
    cloud.points.emplace_back(v[0], v[1], v[2]);
  }
  return cloud;
}

inline PointCloud read_velodyne_bin(const std::filesystem::path& path) {
  return parse_velodyne_bin(detail::read_file(path));
}

inline std::string format_velodyne_bin(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 16);
  for (const auto& p : cloud.points) {
    const float v[4] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z()), 0.0f};
    for (float f : v) {
      std::uint32_t u;
      std::memcpy(&u, &f, sizeof u);
      for (int b = 0; b < 4; ++b) out += static_cast<char>((u >> (8 * b)) & 0xff);
    }
  }
  return out;
}

// --- PNM rasters -----------------------------------------------------------

/// Binary PGM (P5) or PPM (P6), maxval <= 255.
inline Image parse_pnm(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
  };
  const std::string magic = next_token();
  int channels = 0;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else throw IoError("unsupported image format '" + magic + "' (expected P5 or P6)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw IoError("malformed PNM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw IoError("unsupported PNM dimensions or maxval");
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (bytes.size() < pos + need) throw IoError("truncated PNM data");
  Image img(w, h, channels);
  std::memcpy(img.data.data(), bytes.data() + pos, need);
  return img;
}

inline Image read_pnm(const std::filesystem::path& path) { return parse_pnm(detail::read_file(path)); }

inline std::string format_pnm(const Image& img) {
  std::string out = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

inline void write_pnm(const Image& img, const std::filesystem::path& path) { detail::write_file(path, format_pnm(img)); }

// --- calibration -----------------------------------------------------------

/// First non-comment line holding 12 floats, row-major [R | t].
inline Transform parse_transform_3x4(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    auto t = detail::trim(line);
    if (const auto colon = t.find(':'); colon != std::string_view::npos) t = detail::trim(t.substr(colon + 1));
    const auto toks = detail::split(t, false);
    if (toks.size() != 12) throw ParseError(lineno, "expected 12 values, got " + std::to_string(toks.size()));
    double v[12];
    for (int i = 0; i < 12; ++i) v[i] = detail::to_double(toks[i], lineno);
    return detail::transform_from_12(v, lineno);
  }
  throw ParseError(lineno, "no transform found");
}

inline Transform read_transform_3x4(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file(path));
  return parse_transform_3x4(in);
}

/// KITTI odometry calib.txt: camera intrinsics from a projection row
/// ("P2" by default) and the LiDAR-to-camera transform from "Tr".
struct KittiCalib {
  CameraIntrinsics intrinsics;
  Transform cam_from_lidar;
};

inline KittiCalib parse_kitti_calib(std::istream& in, std::string_view camera = "P2") {
  KittiCalib calib;
  bool have_p = false, have_tr = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto t = detail::trim(line);
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) continue;
    const auto key = detail::trim(t.substr(0, colon));
    const auto toks = detail::split(detail::trim(t.substr(colon + 1)), false);
    if (key != camera && key != "Tr" && key != "Tr_velo_to_cam") continue;
    if (toks.size() != 12) throw ParseError(lineno, "expected 12 values for " + std::string(key));
    double v[12];
    for (int i = 0; i < 12; ++i) v[i] = detail::to_double(toks[i], lineno);
    if (key == camera) {
      calib.intrinsics.fx = v[0];
      calib.intrinsics.cx = v[2];
      calib.intrinsics.fy = v[5];
      calib.intrinsics.cy = v[6];
      have_p = true;
    } else {
      calib.cam_from_lidar = detail::transform_from_12(v, lineno);
      have_tr = true;
    }
  }
  if (!have_p) throw ParseError(lineno, "calibration lacks " + std::string(camera));
  if (!have_tr) throw ParseError(lineno, "calibration lacks Tr");
  return calib;
}

inline KittiCalib read_kitti_calib(const std::filesystem::path& path, std::string_view camera = "P2") {
  std::istringstream in(detail::read_file(path));
  return parse_kitti_calib(in, camera);
}

// --- simulator config ------------------------------------------------------

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig c;
  auto num = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw InvalidConfigError(key, "must be a number");
    dst = j[key].get<double>();
  };
  if (!j.is_object()) throw InvalidConfigError("<root>", "expected a JSON object");
  if (j.contains("frames")) {
    if (!j["frames"].is_number_integer() || j["frames"].get<long long>() < 0)
      throw InvalidConfigError("frames", "must be a non-negative integer");
    c.frames = j["frames"].get<std::size_t>();
  }
  num("frame_rate", c.frame_rate);
  num("pitch_amplitude", c.pitch_amplitude);
  num("pitch_period", c.pitch_period);
  num("roll_amplitude", c.roll_amplitude);
  num("roll_period", c.roll_period);
  num("speed", c.speed);
  num("odometry_noise_std", c.odometry_noise_std);
  num("drift_rate", c.drift_rate);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw InvalidConfigError("seed", "must be an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("slope_profile")) {
    const auto& sp = j["slope_profile"];
    if (!sp.is_array()) throw InvalidConfigError("slope_profile", "must be an array of [distance, grade]");
    for (const auto& e : sp) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw InvalidConfigError("slope_profile", "entries must be [distance_m, grade_percent]");
      c.slope_profile.push_back({e[0].get<double>(), e[1].get<double>()});
    }
  }
  for (const auto& [key, _] : j.items()) {
    static const char* known[] = {"frames", "frame_rate", "pitch_amplitude", "pitch_period", "roll_amplitude",
                                  "roll_period", "slope_profile", "speed", "odometry_noise_std", "drift_rate",
                                  "seed"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidConfigError(key, "unknown field");
  }
  c.validate();
  return c;
}

inline SimConfig read_sim_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfigError("<json>", e.what());
  }
  return sim_config_from_json(j);
}

}  // namespace groundline::io
