/*
 * Copyright 2026 The shared_control Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "shared_control/trajectory_log.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shared_control {
namespace {

constexpr const char* kColumns =
    "step t x y yaw cmd_vx cmd_vy cmd_omega meas_vx meas_vy meas_omega ux uy "
    "scan_min scan_digest r_obstacles r_heading r_tracking r_vy r_smooth1 "
    "r_smooth2 r_total collision critical";
constexpr int kColumnCount = 24;
constexpr int kHeaderLines = 3;
constexpr double kDtTolerance = 1e-9;

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& s, int line, const char* field) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw LogFormatError(line, std::string("bad value '") + s + "' for " + field);
  }
  return v;
}

long parse_int(const std::string& s, int line, const char* field) {
  long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw LogFormatError(line, std::string("bad integer '") + s + "' for " + field);
  }
  return v;
}

bool parse_flag(const std::string& s, int line, const char* field) {
  const long v = parse_int(s, line, field);
  if (v != 0 && v != 1) throw LogFormatError(line, std::string(field) + " must be 0 or 1");
  return v == 1;
}

bool has_space(const std::string& s) {
  return s.empty() || s.find_first_of(" \t\r\n=") != std::string::npos;
}

}  // namespace

double TrajectoryLog::dt() const {
  const auto it = header.find("dt");
  if (it == header.end()) throw LogFormatError(2, "header lacks dt");
  double v = 0.0;
  const auto [end, ec] = std::from_chars(it->second.data(),
                                         it->second.data() + it->second.size(), v);
  if (ec != std::errc() || !(v > 0.0)) throw LogFormatError(2, "dt must be a positive number");
  return v;
}

std::uint64_t scan_digest(const LidarScan& scan) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double r : scan.ranges) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(r);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_log(const TrajectoryLog& log, std::ostream& out) {
  out << "# shared_control trajectory " << kTrajectoryLogVersion << '\n';
  out << '#';
  for (const auto& [k, v] : log.header) {
    if (has_space(k) || has_space(v)) {
      throw std::invalid_argument("log header field '" + k + "' must be a non-empty token");
    }
    out << ' ' << k << '=' << v;
  }
  out << '\n';
  out << "# columns " << kColumns << '\n';
  for (const TrajectoryRecord& r : log.records) {
    char digest[20];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(r.scan_digest));
    out << r.step << ' ' << real(r.t) << ' ' << real(r.pose.position.x) << ' '
        << real(r.pose.position.y) << ' ' << real(r.pose.yaw) << ' '
        << real(r.commanded.vx) << ' ' << real(r.commanded.vy) << ' '
        << real(r.commanded.omega) << ' ' << real(r.measured.vx) << ' '
        << real(r.measured.vy) << ' ' << real(r.measured.omega) << ' '
        << real(r.user_input.ux) << ' ' << real(r.user_input.uy) << ' '
        << real(r.scan_min) << ' ' << digest << ' ' << real(r.reward.obstacles) << ' '
        << real(r.reward.heading) << ' ' << real(r.reward.tracking) << ' '
        << real(r.reward.vy_penalty) << ' ' << real(r.reward.smoothing_1) << ' '
        << real(r.reward.smoothing_2) << ' ' << real(r.reward.total) << ' '
        << (r.collision ? 1 : 0) << ' ' << (r.critical ? 1 : 0) << '\n';
  }
}

void write_log(const TrajectoryLog& log, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write_log(log, f);
  if (!f) throw std::runtime_error("short write to " + path.string());
}

TrajectoryLog read_log(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  int n = 0;

  if (!std::getline(in, line)) throw LogFormatError(1, "empty log");
  ++n;
  if (line != "# shared_control trajectory " + std::to_string(kTrajectoryLogVersion)) {
    throw LogFormatError(n, "not a trajectory log (or unsupported version)");
  }
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw LogFormatError(2, "missing header fields");
  }
  ++n;
  {
    auto tokens = split(line.substr(1));
    for (const std::string& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw LogFormatError(n, "header field '" + tok + "' is not key=value");
      }
      log.header[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  if (!std::getline(in, line) || line != std::string("# columns ") + kColumns) {
    throw LogFormatError(3, "column line does not match this format version");
  }
  ++n;
  log.dt();

  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line);
    if (static_cast<int>(f.size()) != kColumnCount) {
      throw LogFormatError(n, "expected " + std::to_string(kColumnCount) + " fields, found " +
                                  std::to_string(f.size()));
    }
    TrajectoryRecord r;
    r.step = static_cast<int>(parse_int(f[0], n, "step"));
    r.t = parse_real(f[1], n, "t");
    r.pose.position.x = parse_real(f[2], n, "x");
    r.pose.position.y = parse_real(f[3], n, "y");
    r.pose.yaw = parse_real(f[4], n, "yaw");
    r.commanded = {parse_real(f[5], n, "cmd_vx"), parse_real(f[6], n, "cmd_vy"),
                   parse_real(f[7], n, "cmd_omega")};
    r.measured = {parse_real(f[8], n, "meas_vx"), parse_real(f[9], n, "meas_vy"),
                  parse_real(f[10], n, "meas_omega")};
    r.user_input = {parse_real(f[11], n, "ux"), parse_real(f[12], n, "uy")};
    r.scan_min = parse_real(f[13], n, "scan_min");
    {
      const std::string& d = f[14];
      const auto [end, ec] = std::from_chars(d.data(), d.data() + d.size(), r.scan_digest, 16);
      if (ec != std::errc() || end != d.data() + d.size()) {
        throw LogFormatError(n, "bad scan digest '" + d + "'");
      }
    }
    r.reward.obstacles = parse_real(f[15], n, "r_obstacles");
    r.reward.heading = parse_real(f[16], n, "r_heading");
    r.reward.tracking = parse_real(f[17], n, "r_tracking");
    r.reward.vy_penalty = parse_real(f[18], n, "r_vy");
    r.reward.smoothing_1 = parse_real(f[19], n, "r_smooth1");
    r.reward.smoothing_2 = parse_real(f[20], n, "r_smooth2");
    r.reward.total = parse_real(f[21], n, "r_total");
    r.collision = parse_flag(f[22], n, "collision");
    r.critical = parse_flag(f[23], n, "critical");
    log.records.push_back(r);
  }
  validate(log);
  return log;
}

TrajectoryLog read_log(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return read_log(f);
}

void validate(const TrajectoryLog& log) {
  const double dt = log.dt();
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    const int line = kHeaderLines + static_cast<int>(i) + 1;
    const TrajectoryRecord& a = log.records[i - 1];
    const TrajectoryRecord& b = log.records[i];
    if (b.step != a.step + 1) throw LogFormatError(line, "step counter is not consecutive");
    if (!(b.t > a.t)) throw LogFormatError(line, "time is not increasing");
    if (std::abs((b.t - a.t) - dt) > kDtTolerance) {
      throw LogFormatError(line, "time step " + real(b.t - a.t) + " differs from dt " + real(dt));
    }
  }
}

}  // namespace shared_control
