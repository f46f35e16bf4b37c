#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "curbscan/core/types.hpp"

namespace curbscan {

/// Reads an LPC file: ASCII, one `x y z intensity label` record per line,
/// `#` starts a full-line comment, blank lines ignored. Coordinates are
/// multiplied by `scale` (unit conversion into feet). Intensities are
/// min-max normalized to [0, 1] when any value falls outside that range;
/// a degenerate range maps every intensity to 1.0.
inline LabeledCloud load_lpc(const std::filesystem::path& path, double scale = 1.0) {
  if (scale <= 0.0) raise(ErrorCode::InvalidParam, "scale must be positive");
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingFile, "cannot open " + path.string());

  LabeledCloud cloud;
  cloud.id = path.stem().string();

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const char* s = line.c_str();
    while (*s == ' ' || *s == '\t' || *s == '\r') ++s;
    if (*s == '\0' || *s == '#') continue;

    double v[4];
    char* end = nullptr;
    for (double& field : v) {
      field = std::strtod(s, &end);
      if (end == s)
        raise(ErrorCode::ParseError,
              path.string() + ":" + std::to_string(lineno) + ": expected number");
      s = end;
    }
    const long label = std::strtol(s, &end, 10);
    if (end == s)
      raise(ErrorCode::ParseError,
            path.string() + ":" + std::to_string(lineno) + ": expected label");
    s = end;
    while (*s == ' ' || *s == '\t' || *s == '\r') ++s;
    if (*s != '\0')
      raise(ErrorCode::ParseError,
            path.string() + ":" + std::to_string(lineno) + ": trailing characters");
    if (label < 0 || label >= kNumLabels)
      raise(ErrorCode::LabelOutOfRange,
            path.string() + ":" + std::to_string(lineno) + ": label " +
                std::to_string(label));

    cloud.push_back({v[0] * scale, v[1] * scale, v[2] * scale, v[3]},
                    static_cast<ComponentLabel>(label));
  }
  if (cloud.empty()) raise(ErrorCode::EmptyCloud, path.string() + " has no records");

  // normalize intensity only when values escape [0, 1]
  double lo = cloud.points.front().intensity, hi = lo;
  for (const auto& p : cloud.points) {
    lo = std::min(lo, p.intensity);
    hi = std::max(hi, p.intensity);
  }
  if (lo < 0.0 || hi > 1.0) {
    const double range = hi - lo;
    for (auto& p : cloud.points)
      p.intensity = range < 1e-12 ? 1.0 : (p.intensity - lo) / range;
  }
  return cloud;
}

/// Writes an LPC file with 6 decimal places (round-trips within 1e-6 ft).
inline void save_lpc(const std::filesystem::path& path, const LabeledCloud& cloud) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << "# x y z intensity label\n";
  char buf[160];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %.6f %d\n", p.x, p.y, p.z,
                  p.intensity, static_cast<int>(cloud.labels[i]));
    out << buf;
  }
  if (!out) raise(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace curbscan
