#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "curbscan/core/types.hpp"

namespace curbscan::raster {

/// Affine map between pixel indices and world xy. Row 0 is the top of the
/// window (largest y); pixels are square.
struct RasterTransform {
  double origin_x = 0.0;    ///< world x of the left edge
  double origin_y_top = 0.0;  ///< world y of the top edge
  double pixel_size = 1.0;  ///< feet per pixel

  [[nodiscard]] Vec2 pixel_center(int col, int row) const {
    return {origin_x + (col + 0.5) * pixel_size,
            origin_y_top - (row + 0.5) * pixel_size};
  }
  /// Fractional pixel coordinates (col, row) of a world point.
  [[nodiscard]] Vec2 to_pixel(const Vec2& w) const {
    return {(w.x() - origin_x) / pixel_size,
            (origin_y_top - w.y()) / pixel_size};
  }
};

/// 8-bit single-channel top-down image.
struct RasterImage {
  int width = 0;
  int height = 0;
  RasterTransform tf;
  std::vector<std::uint8_t> px;

  [[nodiscard]] std::uint8_t at(int col, int row) const {
    return px[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
              static_cast<std::size_t>(col)];
  }
  std::uint8_t& at(int col, int row) {
    return px[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
              static_cast<std::size_t>(col)];
  }
  [[nodiscard]] std::size_t count_nonzero() const {
    std::size_t n = 0;
    for (auto v : px) n += v != 0;
    return n;
  }
};

/// Paints points into a fixed world window (top-down orthographic).
/// Pixel value is round(255 * intensity); when several points land in one
/// pixel the last point in cloud order wins. Points outside the window are
/// skipped; points exactly on the right/bottom world edge fall into the
/// last pixel (the window is closed on all sides).
inline RasterImage render_window(const std::vector<Point3>& pts, double x0,
                                 double y0, double window_ft, int canvas_px) {
  if (canvas_px <= 0 || window_ft <= 0.0)
    raise(ErrorCode::InvalidParam, "canvas and window must be positive");
  RasterImage img;
  img.width = img.height = canvas_px;
  img.tf.pixel_size = window_ft / canvas_px;
  img.tf.origin_x = x0;
  img.tf.origin_y_top = y0 + window_ft;
  img.px.assign(static_cast<std::size_t>(canvas_px) * canvas_px, 0);
  for (const auto& p : pts) {
    if (p.x < x0 || p.x > x0 + window_ft || p.y < y0 || p.y > y0 + window_ft)
      continue;
    int c = static_cast<int>(std::floor((p.x - x0) / img.tf.pixel_size));
    int r = static_cast<int>(std::floor((img.tf.origin_y_top - p.y) / img.tf.pixel_size));
    c = std::min(std::max(c, 0), canvas_px - 1);
    r = std::min(std::max(r, 0), canvas_px - 1);
    const double v = std::round(255.0 * std::min(std::max(p.intensity, 0.0), 1.0));
    img.at(c, r) = static_cast<std::uint8_t>(v);
  }
  return img;
}

/// Square window centered on the cloud's xy bounding-box center.
/// `extent_ft <= 0` selects the tight bounding square plus one pixel of slack.
inline RasterImage project_topdown(const LabeledCloud& cloud, int resolution,
                                   double extent_ft = 0.0) {
  if (cloud.empty()) raise(ErrorCode::EmptyCloud, "nothing to project");
  if (resolution <= 0) raise(ErrorCode::InvalidParam, "resolution must be positive");
  const auto b = compute_bounds(cloud.points);
  const double span =
      std::max(b.max.x() - b.min.x(), b.max.y() - b.min.y());
  double win = extent_ft;
  if (win <= 0.0) win = span > 0.0 ? span * (1.0 + 1.0 / resolution) : 1.0;
  const double cx = 0.5 * (b.min.x() + b.max.x());
  const double cy = 0.5 * (b.min.y() + b.max.y());
  return render_window(cloud.points, cx - 0.5 * win, cy - 0.5 * win, win, resolution);
}

/// Kernel width for a tile with projected-point density rho
/// (nonzero / total pixels): kappa = min(floor(1 / (2 rho)), kappa_max),
/// with empty tiles pinned to kappa_max. kappa <= 1 means "leave alone".
inline int kappa_for_density(double rho, int kappa_max) {
  if (rho < 0.0 || rho > 1.0) raise(ErrorCode::InvalidParam, "rho out of [0,1]");
  if (kappa_max < 1) raise(ErrorCode::InvalidParam, "kappa_max must be >= 1");
  if (rho == 0.0) return kappa_max;
  return std::min(static_cast<int>(std::floor(1.0 / (2.0 * rho))), kappa_max);
}

/// Square max-filter with OpenCV anchoring (anchor k/2): the window for an
/// output pixel spans offsets [-k/2, k-1-k/2] in each axis. Outside pixels
/// read as 0. k <= 1 returns the input unchanged.
inline RasterImage dilate(const RasterImage& in, int k) {
  if (in.px.empty()) raise(ErrorCode::EmptyImage, "dilate of empty image");
  if (k <= 1) return in;
  RasterImage out = in;
  const int lo = -(k / 2);
  const int hi = k - 1 - k / 2;
  for (int r = 0; r < in.height; ++r)
    for (int c = 0; c < in.width; ++c) {
      std::uint8_t m = 0;
      for (int dr = lo; dr <= hi; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= in.height) continue;
        for (int dc = lo; dc <= hi; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= in.width) continue;
          m = std::max(m, in.at(cc, rr));
        }
      }
      out.at(c, r) = m;
    }
  return out;
}

/// Density-adaptive closing: per tile of `tile_px` pixels (edge tiles
/// ragged), kappa is chosen from the tile's projected density and the
/// tile's output pixels take the kappa-window max read from the full
/// undilated input; a global k=2 dilation follows. Monotone: output
/// dominates the input pixelwise.
inline RasterImage adaptive_dilate(const RasterImage& in, int tile_px = 32,
                                   int kappa_max = 50) {
  if (in.px.empty()) raise(ErrorCode::EmptyImage, "adaptive_dilate of empty image");
  if (tile_px < 1) raise(ErrorCode::InvalidParam, "tile_px must be >= 1");
  if (kappa_max < 1) raise(ErrorCode::InvalidParam, "kappa_max must be >= 1");
  RasterImage mid = in;
  for (int tr = 0; tr < in.height; tr += tile_px)
    for (int tc = 0; tc < in.width; tc += tile_px) {
      const int r1 = std::min(tr + tile_px, in.height);
      const int c1 = std::min(tc + tile_px, in.width);
      std::size_t nonzero = 0;
      for (int r = tr; r < r1; ++r)
        for (int c = tc; c < c1; ++c) nonzero += in.at(c, r) != 0;
      const double rho = static_cast<double>(nonzero) /
                         (static_cast<double>(r1 - tr) * (c1 - tc));
      const int k = kappa_for_density(rho, kappa_max);
      if (k <= 1) continue;  // tile already dense enough; keep input values
      const int lo = -(k / 2);
      const int hi = k - 1 - k / 2;
      for (int r = tr; r < r1; ++r)
        for (int c = tc; c < c1; ++c) {
          std::uint8_t m = 0;
          for (int dr = lo; dr <= hi; ++dr) {
            const int rr = r + dr;
            if (rr < 0 || rr >= in.height) continue;
            for (int dc = lo; dc <= hi; ++dc) {
              const int cc = c + dc;
              if (cc < 0 || cc >= in.width) continue;
              m = std::max(m, in.at(cc, rr));
            }
          }
          mid.at(c, r) = m;
        }
    }
  return dilate(mid, 2);
}

/// Binary PGM (P5, maxval 255).
inline void write_pgm(const std::filesystem::path& path, const RasterImage& img) {
  if (img.px.empty()) raise(ErrorCode::EmptyImage, "write_pgm of empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.px.data()),
            static_cast<std::streamsize>(img.px.size()));
  if (!out) raise(ErrorCode::IoError, "write failed for " + path.string());
}

inline RasterImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::MissingFile, "cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") raise(ErrorCode::ParseError, path.string() + ": not a P5 PGM");
  auto next_int = [&](const char* what) {
    // allow '#' comments between header tokens
    while (true) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      int v = 0;
      if (!(in >> v))
        raise(ErrorCode::ParseError, path.string() + ": bad " + std::string(what));
      return v;
    }
  };
  RasterImage img;
  img.width = next_int("width");
  img.height = next_int("height");
  const int maxval = next_int("maxval");
  if (img.width <= 0 || img.height <= 0 || maxval != 255)
    raise(ErrorCode::ParseError, path.string() + ": unsupported header");
  in.get();  // single whitespace after maxval
  img.px.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.px.data()),
          static_cast<std::streamsize>(img.px.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.px.size()))
    raise(ErrorCode::ParseError, path.string() + ": truncated pixel data");
  return img;
}

/// Georeferencing sidecar so raster boxes can come back to world space.
inline nlohmann::ordered_json raster_sidecar(const RasterImage& img,
                                             const std::string& source_id) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["source_id"] = source_id;
  j["width"] = img.width;
  j["height"] = img.height;
  j["pixel_size_ft"] = img.tf.pixel_size;
  j["origin"] = {{"x", img.tf.origin_x}, {"y_top", img.tf.origin_y_top}};
  return j;
}

}  // namespace curbscan::raster
