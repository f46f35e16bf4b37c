#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curbscan/raster/raster.hpp"

namespace curbscan::raster {

/// One rendered tile of a survey cloud.
struct Patch {
  int ix = 0;       ///< column index in the patch grid
  int iy = 0;       ///< row index in the patch grid
  double x0 = 0.0;  ///< world x of the left edge
  double y0 = 0.0;  ///< world y of the bottom edge
  RasterImage img;
};

/// Overlapping patch tiling of a cloud's xy extent.
struct PatchGrid {
  double patch_ft = 40.0;
  double overlap = 0.5;  ///< fraction of patch_ft shared between neighbors
  int canvas_px = 1280;
  int nx = 0;
  int ny = 0;
  std::vector<Patch> patches;  ///< row-major, iy outer
};

/// Axis-aligned world-space rectangle.
struct WorldBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

/// Splits the cloud extent into overlapping square patches anchored at the
/// bounding-box minimum; the stride is patch_ft * (1 - overlap), and the
/// last row/column may overhang the extent. Points on shared boundaries
/// render into every covering patch.
inline PatchGrid tile_patches(const LabeledCloud& cloud, double patch_ft = 40.0,
                              double overlap = 0.5, int canvas_px = 1280) {
  if (cloud.empty()) raise(ErrorCode::EmptyCloud, "nothing to tile");
  if (patch_ft <= 0.0 || canvas_px <= 0)
    raise(ErrorCode::InvalidParam, "patch size and canvas must be positive");
  if (overlap < 0.0 || overlap >= 1.0)
    raise(ErrorCode::InvalidParam, "overlap must be in [0, 1)");
  const auto b = compute_bounds(cloud.points);
  const double stride = patch_ft * (1.0 - overlap);
  auto count = [&](double span) {
    if (span <= patch_ft) return 1;
    return static_cast<int>(std::ceil((span - patch_ft) / stride)) + 1;
  };
  PatchGrid grid;
  grid.patch_ft = patch_ft;
  grid.overlap = overlap;
  grid.canvas_px = canvas_px;
  grid.nx = count(b.max.x() - b.min.x());
  grid.ny = count(b.max.y() - b.min.y());
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      Patch p;
      p.ix = ix;
      p.iy = iy;
      p.x0 = b.min.x() + ix * stride;
      p.y0 = b.min.y() + iy * stride;
      p.img = render_window(cloud.points, p.x0, p.y0, patch_ft, canvas_px);
      grid.patches.push_back(std::move(p));
    }
  return grid;
}

/// Maps a pixel-space detection box (fractional columns/rows, col1 > col0,
/// row1 > row0, rows grow downward) on one patch back to world space,
/// expanding every side outward by `expand` times the box's edge length.
/// Throws IndexOutOfRange (bad patch index) and DegenerateBox (empty box).
inline WorldBox backproject_box(const PatchGrid& grid, int patch_index,
                                double col0, double row0, double col1,
                                double row1, double expand = 0.1) {
  if (patch_index < 0 || patch_index >= static_cast<int>(grid.patches.size()))
    raise(ErrorCode::IndexOutOfRange, "patch index " + std::to_string(patch_index));
  if (!(col1 > col0) || !(row1 > row0))
    raise(ErrorCode::DegenerateBox, "box has no area");
  if (expand < 0.0) raise(ErrorCode::InvalidParam, "expand must be >= 0");
  const Patch& p = grid.patches[static_cast<std::size_t>(patch_index)];
  const double ps = p.img.tf.pixel_size;
  WorldBox w;
  w.min_x = p.img.tf.origin_x + col0 * ps;
  w.max_x = p.img.tf.origin_x + col1 * ps;
  w.max_y = p.img.tf.origin_y_top - row0 * ps;
  w.min_y = p.img.tf.origin_y_top - row1 * ps;
  const double dx = expand * (w.max_x - w.min_x);
  const double dy = expand * (w.max_y - w.min_y);
  w.min_x -= dx;
  w.max_x += dx;
  w.min_y -= dy;
  w.max_y += dy;
  return w;
}

/// Points of `cloud` inside the closed box (xy test only).
inline LabeledCloud crop_cloud(const LabeledCloud& cloud, const WorldBox& box) {
  LabeledCloud out;
  out.id = cloud.id;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (p.x >= box.min_x && p.x <= box.max_x && p.y >= box.min_y &&
        p.y <= box.max_y)
      out.push_back(p, cloud.labels[i]);
  }
  return out;
}

inline nlohmann::ordered_json patch_sidecar(const PatchGrid& grid,
                                            const Patch& p,
                                            const std::string& source_id) {
  nlohmann::ordered_json j = raster_sidecar(p.img, source_id);
  j["patch_ft"] = grid.patch_ft;
  j["overlap"] = grid.overlap;
  j["index"] = {{"x", p.ix}, {"y", p.iy}};
  j["anchor"] = {{"x", p.x0}, {"y", p.y0}};
  return j;
}

/// Writes every patch as PGM plus JSON sidecar into `dir` with the stem
/// `<source_id>_px<ix>_py<iy>`.
inline void write_patches(const std::filesystem::path& dir, const PatchGrid& grid,
                          const std::string& source_id) {
  std::filesystem::create_directories(dir);
  for (const auto& p : grid.patches) {
    const std::string stem =
        source_id + "_px" + std::to_string(p.ix) + "_py" + std::to_string(p.iy);
    write_pgm(dir / (stem + ".pgm"), p.img);
    std::ofstream side(dir / (stem + ".json"));
    if (!side) raise(ErrorCode::IoError, "cannot write sidecar for " + stem);
    side << patch_sidecar(grid, p, source_id).dump(2) << "\n";
  }
}

}  // namespace curbscan::raster
