#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "curbscan/core/error.hpp"
#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/core/util.hpp"
#include "curbscan/measure/record.hpp"

namespace curbscan::synth {

enum class SamplingMode { Uniform, Grid };

/// Generator facet a point was sampled from (finer than ComponentLabel:
/// road, apron, curb faces and the beyond-landing strip all map to
/// Unassigned but have distinct planes).
enum class Region : int {
  None = 0,
  Center,
  Warn,
  FlareL,
  FlareR,
  Landing,
  Beyond,
  Gutter,
  Road,
  Apron,
  CurbFace,
};

inline ComponentLabel label_for_region(Region r) {
  switch (r) {
    case Region::Center: return ComponentLabel::CenterRamp;
    case Region::Warn: return ComponentLabel::WarningSurface;
    case Region::FlareL: return ComponentLabel::LeftFlare;
    case Region::FlareR: return ComponentLabel::RightFlare;
    case Region::Landing: return ComponentLabel::Landing;
    case Region::Gutter: return ComponentLabel::Gutter;
    default: return ComponentLabel::Unassigned;
  }
}

/// Parameters of one synthetic type-A curb ramp. Geometry is authored in a
/// ramp-local frame: curb line along x at y = 0, ramp ascending toward +y,
/// center ramp spanning |x| <= width/2. Slopes are percent grade; lengths
/// are feet unless the name says inches.
struct RampSpec {
  std::string id = "ramp";

  // center ramp
  double ramp_slope_pct = 7.0;       ///< A: grade along +y
  double cross_slope_pct = 1.0;      ///< B: grade along +x (signed)
  double width_in = 51.0;            ///< C: curb-line width of the center ramp
  double curb_height_ft = 0.42;      ///< rise; ramp length = 100*h/slope
  double warn_depth_ft = 1.0;        ///< warning-surface band above the curb line

  // flares (triangular when flare_taper, else trapezoidal with a tapered
  // outer edge so the outer-bottom corner is a strict distance argmax)
  double flare_slope_left_pct = 8.5;   ///< D: grade along the curb
  double flare_slope_right_pct = 8.5;  ///< E
  double flare_width_left_ft = 3.0;
  double flare_width_right_ft = 3.0;
  bool flare_taper = true;
  double flare_outer_taper_ft = 0.45;  ///< trapezoid mode: outer-edge inset at top

  // top landing (width 0 = ramp width) and the sidewalk run behind it
  double landing_depth_ft = 5.0;   ///< L basis
  double landing_width_ft = 0.0;   ///< K basis
  double landing_cross_pct = 1.0;  ///< I: grade along +x
  double landing_slope_pct = 1.0;  ///< J: grade along +y
  double beyond_depth_ft = 1.5;    ///< strip behind the landing (unlabeled)
  double beyond_break_pct = 4.5;   ///< grade change at the landing's back edge

  // street
  double gutter_depth_ft = 2.0;
  double gutter_slope_pct = 1.0;  ///< F: grade along the curb
  double gutter_cross_pct = 4.5;  ///< G: grade away from the curb
  double road_cross_pct = 0.5;    ///< H
  double road_depth_ft = 3.0;

  // surroundings: sidewalk strips beside the flares plus vertical curb
  // faces where they meet the street (uniform sampling only)
  double apron_width_ft = 1.2;

  // shape defects for QC corpora
  double shear_deg = 0.0;               ///< skews corners, keeps edges parallel
  double top_edge_rotation_deg = 0.0;   ///< tilts the top edge (non-parallel)

  // sampling / noise
  double density_pts_ft2 = 60.0;
  SamplingMode sampling = SamplingMode::Uniform;
  double jitter_frac = 0.25;        ///< grid mode: jitter amplitude / pitch
  double noise_sigma_z_ft = 0.0;
  double outlier_fraction = 0.0;
  double label_noise_band_ft = 0.0;

  // placement
  double rotation_deg = 0.0;
  double translate_x_ft = 0.0;
  double translate_y_ft = 0.0;
  double translate_z_ft = 0.0;

  std::uint64_t seed = 1;

  [[nodiscard]] double width_ft() const { return width_in / 12.0; }
  [[nodiscard]] double ramp_length_ft() const {
    return 100.0 * curb_height_ft / ramp_slope_pct;
  }
  [[nodiscard]] double landing_width_or_ramp_ft() const {
    return landing_width_ft > 0.0 ? landing_width_ft : width_ft();
  }

  void validate() const {
    auto need = [&](bool ok, const char* what) {
      if (!ok) raise(ErrorCode::InvalidSpec, std::string(what) + " (ramp '" + id + "')");
    };
    need(density_pts_ft2 > 0.0, "density must be positive");
    need(ramp_slope_pct > 0.0, "ramp slope must be positive");
    for (double s : {ramp_slope_pct, cross_slope_pct, flare_slope_left_pct,
                     flare_slope_right_pct, landing_cross_pct, landing_slope_pct,
                     gutter_slope_pct, gutter_cross_pct, road_cross_pct,
                     beyond_break_pct})
      need(std::abs(s) <= 50.0, "slope outside +/-50 percent");
    need(width_in > 0.0, "width must be positive");
    need(curb_height_ft > 0.0, "curb height must be positive");
    need(flare_width_left_ft >= 0.0 && flare_width_right_ft >= 0.0,
         "flare widths must be nonnegative");
    need(flare_outer_taper_ft >= 0.0, "flare outer taper must be nonnegative");
    need(landing_depth_ft > 0.0, "landing depth must be positive");
    need(landing_width_ft >= 0.0, "landing width must be nonnegative");
    need(gutter_depth_ft >= 0.0 && road_depth_ft >= 0.0 && beyond_depth_ft >= 0.0 &&
             warn_depth_ft >= 0.0 && apron_width_ft >= 0.0,
         "depths must be nonnegative");
    need(outlier_fraction >= 0.0 && outlier_fraction <= 0.3,
         "outlier fraction outside [0, 0.3]");
    need(jitter_frac >= 0.0 && jitter_frac <= 0.5, "jitter_frac outside [0, 0.5]");
    need(label_noise_band_ft >= 0.0 && label_noise_band_ft <= 1.0,
         "label noise band outside [0, 1] ft");
    need(noise_sigma_z_ft >= 0.0, "noise sigma must be nonnegative");
  }
};

/// Analytic geometry of a spec'd ramp in its local frame (before shear,
/// rotation, and translation). Exposes facet classification and exact
/// surface elevations so tests can query ground truth anywhere.
class FrameGeom {
public:
  explicit FrameGeom(const RampSpec& s) : spec_(s) {
    w2_ = 0.5 * s.width_ft();
    wl2_ = 0.5 * s.landing_width_or_ramp_ft();
    lr_ = s.ramp_length_ft();
    ttop_ = std::tan(s.top_edge_rotation_deg * M_PI / 180.0);
    y_top_l_ = y_top(-w2_);
    y_top_r_ = y_top(w2_);
    alpha_ = s.ramp_slope_pct / 100.0;
    beta_ = s.cross_slope_pct / 100.0;
    dl_ = s.flare_slope_left_pct / 100.0;
    dr_ = s.flare_slope_right_pct / 100.0;
    is_ = s.landing_cross_pct / 100.0;
    js_ = s.landing_slope_pct / 100.0;
    jb_ = (s.landing_slope_pct - s.beyond_break_pct) / 100.0;
    fs_ = s.gutter_slope_pct / 100.0;
    gc_ = s.gutter_cross_pct / 100.0;
    hr_ = s.road_cross_pct / 100.0;
    street_x0_ = -w2_ - s.flare_width_left_ft -
                 (s.apron_width_ft > 0.0 ? s.apron_width_ft : 0.0);
    street_x1_ = w2_ + s.flare_width_right_ft +
                 (s.apron_width_ft > 0.0 ? s.apron_width_ft : 0.0);
  }

  [[nodiscard]] const RampSpec& spec() const { return spec_; }
  [[nodiscard]] double half_width() const { return w2_; }
  [[nodiscard]] double ramp_length() const { return lr_; }
  [[nodiscard]] double y_top(double x) const { return lr_ - ttop_ * x; }
  [[nodiscard]] double y_top_left() const { return y_top_l_; }
  [[nodiscard]] double y_top_right() const { return y_top_r_; }

  /// Flare width at height y (0 when y is above the flare).
  [[nodiscard]] double flare_width(bool left, double y) const {
    const double full = left ? spec_.flare_width_left_ft : spec_.flare_width_right_ft;
    const double ytop = left ? y_top_l_ : y_top_r_;
    if (full <= 0.0 || y < 0.0 || y > ytop || ytop <= 0.0) return 0.0;
    if (spec_.flare_taper) return full * (1.0 - y / ytop);
    return std::max(0.0, full - spec_.flare_outer_taper_ft * (y / ytop));
  }

  [[nodiscard]] Region classify(double x, double y) const {
    const RampSpec& s = spec_;
    if (y < 0.0) {
      if (x < street_x0_ || x > street_x1_) return Region::None;
      if (y >= -s.gutter_depth_ft) return Region::Gutter;
      if (y >= -s.gutter_depth_ft - s.road_depth_ft) return Region::Road;
      return Region::None;
    }
    if (std::abs(x) <= w2_) {
      const double yt = y_top(x);
      if (y <= yt) return (y <= s.warn_depth_ft) ? Region::Warn : Region::Center;
    }
    if (std::abs(x) <= wl2_) {
      const double yt = y_top(std::clamp(x, -w2_, w2_));
      if (y > yt && y <= yt + s.landing_depth_ft) return Region::Landing;
      if (y > yt + s.landing_depth_ft &&
          y <= yt + s.landing_depth_ft + s.beyond_depth_ft)
        return Region::Beyond;
    }
    if (x < -w2_) {
      const double w = flare_width(true, y);
      if (w > 0.0 && x >= -w2_ - w) return Region::FlareL;
    } else if (x > w2_) {
      const double w = flare_width(false, y);
      if (w > 0.0 && x <= w2_ + w) return Region::FlareR;
    }
    if (s.apron_width_ft > 0.0) {
      if (x < -w2_ && x >= -w2_ - s.flare_width_left_ft - s.apron_width_ft &&
          y <= y_top_l_ + s.landing_depth_ft + s.beyond_depth_ft)
        return Region::Apron;
      if (x > w2_ && x <= w2_ + s.flare_width_right_ft + s.apron_width_ft &&
          y <= y_top_r_ + s.landing_depth_ft + s.beyond_depth_ft)
        return Region::Apron;
    }
    return Region::None;
  }

  [[nodiscard]] double z_center(double x, double y) const {
    return alpha_ * y + beta_ * x;
  }
  [[nodiscard]] double z_flare_left(double x, double y) const {
    return alpha_ * y + beta_ * (-w2_) + dl_ * (-w2_ - x);
  }
  [[nodiscard]] double z_flare_right(double x, double y) const {
    return alpha_ * y + beta_ * w2_ + dr_ * (x - w2_);
  }
  [[nodiscard]] double z_landing(double x, double y) const {
    const double yt = y_top(std::clamp(x, -w2_, w2_));
    return alpha_ * yt + is_ * x + js_ * (y - yt);
  }
  [[nodiscard]] double z_beyond(double x, double y) const {
    const double yt = y_top(std::clamp(x, -w2_, w2_));
    const double yb = yt + spec_.landing_depth_ft;
    return z_landing(x, yb) + jb_ * (y - yb);
  }
  /// Street-surface elevation along the curb line y = 0: the gutter's own
  /// grade under the center ramp (a small flowline lip against the ramp's
  /// cross slope is physical), the flare's bottom edge under the flares,
  /// constant beyond them.
  [[nodiscard]] double z_curbline(double x) const {
    if (x < -w2_)
      return z_flare_left(std::max(x, -w2_ - spec_.flare_width_left_ft), 0.0);
    if (x > w2_)
      return z_flare_right(std::min(x, w2_ + spec_.flare_width_right_ft), 0.0);
    return fs_ * x;
  }
  [[nodiscard]] double z_gutter(double x, double y) const {
    return z_curbline(x) + gc_ * y;
  }
  [[nodiscard]] double z_road(double x, double y) const {
    return z_gutter(x, -spec_.gutter_depth_ft) + hr_ * (y + spec_.gutter_depth_ft);
  }
  [[nodiscard]] double z_apron(double x, double y) const {
    return z_curbline(x) + spec_.curb_height_ft + 0.015 * y;
  }

  [[nodiscard]] double surface_z(Region r, double x, double y) const {
    switch (r) {
      case Region::Center:
      case Region::Warn: return z_center(x, y);
      case Region::FlareL: return z_flare_left(x, y);
      case Region::FlareR: return z_flare_right(x, y);
      case Region::Landing: return z_landing(x, y);
      case Region::Beyond: return z_beyond(x, y);
      case Region::Gutter: return z_gutter(x, y);
      case Region::Road: return z_road(x, y);
      case Region::Apron: return z_apron(x, y);
      default:
        raise(ErrorCode::InvalidParam, "surface_z on non-surface region");
    }
  }

  /// Frame-space bounding box of everything that can be sampled.
  [[nodiscard]] Bounds3 frame_bbox() const {
    const RampSpec& s = spec_;
    Bounds3 b;
    b.min = Vec3(street_x0_, -s.gutter_depth_ft - s.road_depth_ft, 0.0);
    b.max = Vec3(street_x1_,
                 std::max(y_top_l_, y_top_r_) + s.landing_depth_ft + s.beyond_depth_ft,
                 0.0);
    return b;
  }

  [[nodiscard]] double street_x0() const { return street_x0_; }
  [[nodiscard]] double street_x1() const { return street_x1_; }

private:
  RampSpec spec_;
  double w2_ = 0, wl2_ = 0, lr_ = 0, ttop_ = 0, y_top_l_ = 0, y_top_r_ = 0;
  double alpha_ = 0, beta_ = 0, dl_ = 0, dr_ = 0, is_ = 0, js_ = 0, jb_ = 0;
  double fs_ = 0, gc_ = 0, hr_ = 0;
  double street_x0_ = 0, street_x1_ = 0;
};

/// Everything the oracle knows about a generated ramp, in world frame.
struct GroundTruth {
  MeasurementRecord record;        ///< analytic A1..L3, all valid
  std::array<Vec3, 6> corners{};   ///< P1..P6 (pre-noise elevations)
  Line2 separator_left;            ///< oriented: left flare on negative side
  Line2 separator_right;           ///< oriented: right flare on positive side
  Line2 bottom_line;               ///< oriented: ramp side positive
  std::vector<ComponentLabel> true_labels;  ///< pre-corruption labels
  std::vector<Region> regions;              ///< generator facet per point
  std::vector<std::uint8_t> is_outlier;     ///< 1 = z displaced off-surface
  double ramp_length_ft = 0.0;
  double landing_width_ft = 0.0;
  double grid_pitch_ft = 0.0;  ///< 0 in uniform mode
};

namespace detail {

inline double intensity_base(Region r) {
  switch (r) {
    case Region::Center: return 0.42;
    case Region::Warn: return 0.58;
    case Region::FlareL:
    case Region::FlareR: return 0.46;
    case Region::Landing: return 0.50;
    case Region::Beyond: return 0.50;
    case Region::Gutter: return 0.38;
    case Region::Road: return 0.33;
    case Region::Apron: return 0.52;
    case Region::CurbFace: return 0.40;
    default: return 0.5;
  }
}

struct RegionJob {
  Region accept;         // facet to keep (Warn accepted alongside Center)
  double x0, x1, y0, y1; // sampling bbox
  double area;           // analytic area -> point count
};

inline void append_surface_point(std::vector<Point3>& pts, std::vector<Region>& regs,
                                 const FrameGeom& g, Region r, double x, double y,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> tint(-0.05, 0.05);
  Point3 p;
  p.x = x;
  p.y = y;
  p.z = g.surface_z(r, x, y);
  p.intensity = std::clamp(intensity_base(r) + tint(rng), 0.0, 1.0);
  pts.push_back(p);
  regs.push_back(r);
}

inline void sample_region_uniform(std::vector<Point3>& pts, std::vector<Region>& regs,
                                  const FrameGeom& g, const RegionJob& job,
                                  std::mt19937_64& rng) {
  const double rho = g.spec().density_pts_ft2;
  const auto n = static_cast<long long>(std::llround(job.area * rho));
  if (n <= 0 || job.x1 <= job.x0 || job.y1 <= job.y0) return;
  std::uniform_real_distribution<double> ux(job.x0, job.x1);
  std::uniform_real_distribution<double> uy(job.y0, job.y1);
  long long placed = 0;
  long long attempts = 0;
  const long long cap = 2000 * n + 10000;
  while (placed < n) {
    if (++attempts > cap)
      raise(ErrorCode::InvalidSpec, "region sampling failed to converge (id '" +
                                        g.spec().id + "')");
    const double x = ux(rng);
    const double y = uy(rng);
    Region r = g.classify(x, y);
    if (job.accept == Region::Center) {
      if (r != Region::Center && r != Region::Warn) continue;
    } else if (r != job.accept) {
      continue;
    }
    append_surface_point(pts, regs, g, r, x, y, rng);
    ++placed;
  }
}

}  // namespace detail

/// Generates one labeled cloud plus its ground truth. Deterministic in
/// spec.seed. Grid mode lays a jittered lattice of pitch 1/sqrt(density)
/// anchored so that axis-aligned facet boundaries at multiples of the pitch
/// fall mid-channel; curb faces are emitted in uniform mode only (vertical
/// strips cannot sit on an xy lattice).
inline std::pair<LabeledCloud, GroundTruth> generate(const RampSpec& spec) {
  spec.validate();
  const FrameGeom g(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<Point3> pts;
  std::vector<Region> regs;

  const double w2 = g.half_width();
  const double wl2 = 0.5 * spec.landing_width_or_ramp_ft();
  const double lr = g.ramp_length();
  const double ytl = g.y_top_left();
  const double ytr = g.y_top_right();
  const double ytmax = std::max(ytl, ytr);
  const double ytmin = std::min(ytl, ytr);

  if (spec.sampling == SamplingMode::Uniform) {
    using detail::RegionJob;
    const double street_w = g.street_x1() - g.street_x0();
    auto flare_area = [&](bool left) {
      const double full = left ? spec.flare_width_left_ft : spec.flare_width_right_ft;
      const double yt = left ? ytl : ytr;
      if (full <= 0.0 || yt <= 0.0) return 0.0;
      if (spec.flare_taper) return 0.5 * full * yt;
      return (full - 0.5 * std::min(spec.flare_outer_taper_ft, full)) * yt;
    };
    std::vector<RegionJob> jobs;
    jobs.push_back({Region::Center, -w2, w2, 0.0, ytmax, spec.width_ft() * lr});
    if (spec.flare_width_left_ft > 0.0)
      jobs.push_back({Region::FlareL, -w2 - spec.flare_width_left_ft, -w2, 0.0, ytl,
                      flare_area(true)});
    if (spec.flare_width_right_ft > 0.0)
      jobs.push_back({Region::FlareR, w2, w2 + spec.flare_width_right_ft, 0.0, ytr,
                      flare_area(false)});
    jobs.push_back({Region::Landing, -wl2, wl2, ytmin, ytmax + spec.landing_depth_ft,
                    2.0 * wl2 * spec.landing_depth_ft});
    if (spec.beyond_depth_ft > 0.0)
      jobs.push_back({Region::Beyond, -wl2, wl2, ytmin + spec.landing_depth_ft,
                      ytmax + spec.landing_depth_ft + spec.beyond_depth_ft,
                      2.0 * wl2 * spec.beyond_depth_ft});
    if (spec.gutter_depth_ft > 0.0)
      jobs.push_back({Region::Gutter, g.street_x0(), g.street_x1(),
                      -spec.gutter_depth_ft, 0.0, street_w * spec.gutter_depth_ft});
    if (spec.road_depth_ft > 0.0)
      jobs.push_back({Region::Road, g.street_x0(), g.street_x1(),
                      -spec.gutter_depth_ft - spec.road_depth_ft,
                      -spec.gutter_depth_ft, street_w * spec.road_depth_ft});
    if (spec.apron_width_ft > 0.0) {
      const double hl = ytl + spec.landing_depth_ft + spec.beyond_depth_ft;
      const double hr = ytr + spec.landing_depth_ft + spec.beyond_depth_ft;
      jobs.push_back({Region::Apron, -w2 - spec.flare_width_left_ft - spec.apron_width_ft,
                      -w2, 0.0, hl,
                      (spec.flare_width_left_ft + spec.apron_width_ft) * hl -
                          flare_area(true)});
      jobs.push_back({Region::Apron, w2,
                      w2 + spec.flare_width_right_ft + spec.apron_width_ft, 0.0, hr,
                      (spec.flare_width_right_ft + spec.apron_width_ft) * hr -
                          flare_area(false)});
    }
    for (const auto& job : jobs) detail::sample_region_uniform(pts, regs, g, job, rng);

    // vertical curb faces where the aprons meet the street
    if (spec.apron_width_ft > 0.0 && spec.curb_height_ft > 0.0) {
      const auto face = [&](double fx0, double fx1) {
        const auto n = static_cast<long long>(
            std::llround((fx1 - fx0) * spec.curb_height_ft * spec.density_pts_ft2));
        std::uniform_real_distribution<double> ux(fx0, fx1);
        std::uniform_real_distribution<double> uy(-0.004, 0.004);
        std::uniform_real_distribution<double> tint(-0.05, 0.05);
        for (long long i = 0; i < n; ++i) {
          const double x = ux(rng);
          const double z0 = g.z_curbline(x);
          std::uniform_real_distribution<double> uz(z0, z0 + spec.curb_height_ft);
          Point3 p;
          p.x = x;
          p.y = uy(rng);
          p.z = uz(rng);
          p.intensity =
              std::clamp(detail::intensity_base(Region::CurbFace) + tint(rng), 0.0, 1.0);
          pts.push_back(p);
          regs.push_back(Region::CurbFace);
        }
      };
      face(-w2 - spec.flare_width_left_ft - spec.apron_width_ft,
           -w2 - spec.flare_width_left_ft);
      face(w2 + spec.flare_width_right_ft,
           w2 + spec.flare_width_right_ft + spec.apron_width_ft);
    }
  } else {
    const double h = 1.0 / std::sqrt(spec.density_pts_ft2);
    const Bounds3 bb = g.frame_bbox();
    const auto i0 = static_cast<long long>(std::floor(bb.min.x() / h)) - 1;
    const auto i1 = static_cast<long long>(std::ceil(bb.max.x() / h)) + 1;
    const auto j0 = static_cast<long long>(std::floor(bb.min.y() / h)) - 1;
    const auto j1 = static_cast<long long>(std::ceil(bb.max.y() / h)) + 1;
    for (long long j = j0; j <= j1; ++j) {
      for (long long i = i0; i <= i1; ++i) {
        const double jx = spec.jitter_frac * h * (u01(rng) - 0.5);
        const double jy = spec.jitter_frac * h * (u01(rng) - 0.5);
        const double x = (static_cast<double>(i) + 0.5) * h + jx;
        const double y = (static_cast<double>(j) + 0.5) * h + jy;
        const Region r = g.classify(x, y);
        if (r == Region::None) continue;
        detail::append_surface_point(pts, regs, g, r, x, y, rng);
      }
    }
  }

  const std::size_t n = pts.size();
  if (n == 0) raise(ErrorCode::EmptyCloud, "spec produced no points (id '" + spec.id + "')");

  GroundTruth truth;
  truth.regions = regs;
  truth.true_labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) truth.true_labels[i] = label_for_region(regs[i]);
  std::vector<ComponentLabel> labels = truth.true_labels;

  // crude-visual-segmentation noise: near an inter-facet boundary, flip to a
  // neighboring facet's label with probability 1/2
  if (spec.label_noise_band_ft > 0.0) {
    const double band = spec.label_noise_band_ft;
    std::array<ComponentLabel, 8> probes{};
    for (std::size_t i = 0; i < n; ++i) {
      const ComponentLabel own = truth.true_labels[i];
      int m = 0;
      for (int k = 0; k < 8; ++k) {
        const double a = k * (M_PI / 4.0);
        const ComponentLabel lb = label_for_region(
            g.classify(pts[i].x + band * std::cos(a), pts[i].y + band * std::sin(a)));
        if (lb == own) continue;
        bool seen = false;
        for (int q = 0; q < m; ++q) seen = seen || probes[static_cast<std::size_t>(q)] == lb;
        if (!seen) probes[static_cast<std::size_t>(m++)] = lb;
      }
      if (m == 0) continue;
      if (u01(rng) < 0.5) {
        const auto pick =
            std::min<std::size_t>(static_cast<std::size_t>(u01(rng) * m),
                                  static_cast<std::size_t>(m - 1));
        labels[i] = probes[pick];
      }
    }
  }

  // shear (QC skew corpora), then world placement
  const double shear = std::tan(spec.shear_deg * M_PI / 180.0);
  if (shear != 0.0)
    for (auto& p : pts) p.x += shear * p.y;
  const RigidXY rigid = RigidXY::from_degrees(spec.rotation_deg, spec.translate_x_ft,
                                              spec.translate_y_ft, spec.translate_z_ft);
  for (auto& p : pts) p = rigid.apply(p);

  if (spec.noise_sigma_z_ft > 0.0) {
    std::normal_distribution<double> gz(0.0, spec.noise_sigma_z_ft);
    for (auto& p : pts) p.z += gz(rng);
  }

  truth.is_outlier.assign(n, 0);
  if (spec.outlier_fraction > 0.0) {
    std::uniform_real_distribution<double> mag(0.2, 0.6);
    for (std::size_t i = 0; i < n; ++i) {
      if (u01(rng) >= spec.outlier_fraction) continue;
      const double sign = (u01(rng) < 0.5) ? -1.0 : 1.0;
      pts[i].z += sign * mag(rng);
      truth.is_outlier[i] = 1;
    }
  }

  // ----- analytic truth -----
  auto place = [&](double x, double y, double z) {
    return rigid.apply(Vec3{x + shear * y, y, z});
  };
  truth.corners[0] = place(-w2, 0.0, g.z_center(-w2, 0.0));
  truth.corners[1] = place(w2, 0.0, g.z_center(w2, 0.0));
  truth.corners[2] = place(-w2, ytl, g.z_center(-w2, ytl));
  truth.corners[3] = place(w2, ytr, g.z_center(w2, ytr));
  truth.corners[4] = place(-w2 - spec.flare_width_left_ft, 0.0,
                           g.z_flare_left(-w2 - spec.flare_width_left_ft, 0.0));
  truth.corners[5] = place(w2 + spec.flare_width_right_ft, 0.0,
                           g.z_flare_right(w2 + spec.flare_width_right_ft, 0.0));

  auto xy = [](const Vec3& v) { return Vec2{v.x(), v.y()}; };
  auto oriented = [&](Line2 l, const Vec2& probe, bool want_negative) {
    l = l.normalized();
    const double e = l.eval(probe);
    if ((want_negative && e > 0.0) || (!want_negative && e < 0.0)) return l.flipped();
    return l;
  };
  const Vec2 center_probe = xy(place(0.0, lr * 0.5, 0.0));
  const Vec2 lflare_probe =
      xy(place(-w2 - 0.5 * std::max(spec.flare_width_left_ft, 0.2), 0.1, 0.0));
  const Vec2 rflare_probe =
      xy(place(w2 + 0.5 * std::max(spec.flare_width_right_ft, 0.2), 0.1, 0.0));
  truth.separator_left =
      oriented(line_through(xy(place(-w2, 0.0, 0.0)), xy(place(-w2, lr, 0.0))),
               lflare_probe, true);
  truth.separator_right =
      oriented(line_through(xy(place(w2, 0.0, 0.0)), xy(place(w2, lr, 0.0))),
               rflare_probe, false);
  truth.bottom_line =
      oriented(line_through(xy(place(-1.0, 0.0, 0.0)), xy(place(1.0, 0.0, 0.0))),
               center_probe, false);

  MeasurementRecord& rec = truth.record;
  rec.set_all(Feature::A, spec.ramp_slope_pct);
  rec.set_all(Feature::B, std::abs(spec.cross_slope_pct));
  rec.set_all(Feature::C,
              spec.width_in * std::hypot(1.0, spec.cross_slope_pct / 100.0));
  rec.set_all(Feature::D, std::abs(spec.flare_slope_left_pct));
  rec.set_all(Feature::E, std::abs(spec.flare_slope_right_pct));
  rec.set_all(Feature::F, std::abs(spec.gutter_slope_pct));
  rec.set_all(Feature::G, std::abs(spec.gutter_cross_pct));
  rec.set_all(Feature::H, std::abs(spec.road_cross_pct));
  rec.set_all(Feature::I, std::abs(spec.landing_cross_pct));
  rec.set_all(Feature::J, std::abs(spec.landing_slope_pct));
  rec.set_all(Feature::K, 12.0 * spec.landing_width_or_ramp_ft() *
                              std::hypot(1.0, spec.landing_cross_pct / 100.0));
  rec.set_all(Feature::L, 12.0 * spec.landing_depth_ft *
                              std::hypot(1.0, spec.landing_slope_pct / 100.0));

  truth.ramp_length_ft = lr;
  truth.landing_width_ft = spec.landing_width_or_ramp_ft();
  truth.grid_pitch_ft =
      (spec.sampling == SamplingMode::Grid) ? 1.0 / std::sqrt(spec.density_pts_ft2) : 0.0;

  LabeledCloud cloud;
  cloud.id = spec.id;
  cloud.points = std::move(pts);
  cloud.labels = std::move(labels);
  return {std::move(cloud), std::move(truth)};
}

/// Applies a further rigid motion to an already-generated ramp and its truth
/// (rotation-invariance harnesses rotate the same cloud rather than
/// re-sampling).
inline void apply_rigid(LabeledCloud& cloud, GroundTruth& truth, const RigidXY& t) {
  for (auto& p : cloud.points) p = t.apply(p);
  for (auto& c : truth.corners) c = t.apply(c);
  truth.separator_left = t.apply(truth.separator_left).normalized();
  truth.separator_right = t.apply(truth.separator_right).normalized();
  truth.bottom_line = t.apply(truth.bottom_line).normalized();
}

/// Inclusive numeric ranges for corpus sampling: every geometry/placement
/// field is drawn independently and uniformly between lo's and hi's value;
/// sampling mode, density, noise, and flags are copied from lo.
struct SpecRanges {
  RampSpec lo;
  RampSpec hi;
};

inline RampSpec sample_spec(const SpecRanges& r, std::mt19937_64& rng) {
  RampSpec s = r.lo;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto draw = [&](double RampSpec::* f) {
    const double u = u01(rng);
    s.*f = r.lo.*f + u * (r.hi.*f - r.lo.*f);
  };
  draw(&RampSpec::ramp_slope_pct);
  draw(&RampSpec::cross_slope_pct);
  draw(&RampSpec::width_in);
  draw(&RampSpec::curb_height_ft);
  draw(&RampSpec::warn_depth_ft);
  draw(&RampSpec::flare_slope_left_pct);
  draw(&RampSpec::flare_slope_right_pct);
  draw(&RampSpec::flare_width_left_ft);
  draw(&RampSpec::flare_width_right_ft);
  draw(&RampSpec::landing_depth_ft);
  draw(&RampSpec::landing_width_ft);
  draw(&RampSpec::landing_cross_pct);
  draw(&RampSpec::landing_slope_pct);
  draw(&RampSpec::beyond_depth_ft);
  draw(&RampSpec::beyond_break_pct);
  draw(&RampSpec::gutter_depth_ft);
  draw(&RampSpec::gutter_slope_pct);
  draw(&RampSpec::gutter_cross_pct);
  draw(&RampSpec::road_cross_pct);
  draw(&RampSpec::road_depth_ft);
  draw(&RampSpec::apron_width_ft);
  draw(&RampSpec::shear_deg);
  draw(&RampSpec::top_edge_rotation_deg);
  draw(&RampSpec::rotation_deg);
  draw(&RampSpec::translate_x_ft);
  draw(&RampSpec::translate_y_ft);
  draw(&RampSpec::translate_z_ft);
  return s;
}

/// n specs drawn from the ranges; ids "<prefix>-001".. ; per-ramp seeds
/// derive from the corpus seed and the id. Collapsed ranges (lo == hi)
/// give identical geometry with differing sampling noise.
inline std::vector<RampSpec> corpus(std::uint64_t seed, int n, const SpecRanges& r,
                                    const std::string& prefix) {
  if (n <= 0) raise(ErrorCode::InvalidParam, "corpus size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<RampSpec> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RampSpec s = sample_spec(r, rng);
    char buf[16];
    std::snprintf(buf, sizeof buf, "-%03d", i + 1);
    s.id = prefix + buf;
    s.seed = derive_seed(seed, s.id);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Named corpora used by the end-to-end test batteries.
// ---------------------------------------------------------------------------

/// Ranges of the realistic survey corpus: uniform sampling at 60 pts/ft^2,
/// sigma_z = 2 mm, 5% outliers, 0.15 ft label noise. Flares run steep
/// (legacy non-compliant geometry), which keeps the flare/center fold
/// sharply detectable under the z-noise.
inline SpecRanges primary_ranges() {
  SpecRanges r;
  RampSpec& lo = r.lo;
  RampSpec& hi = r.hi;
  lo.sampling = hi.sampling = SamplingMode::Uniform;
  lo.density_pts_ft2 = hi.density_pts_ft2 = 60.0;
  lo.noise_sigma_z_ft = hi.noise_sigma_z_ft = 0.002 / 0.3048;  // 2 mm
  lo.outlier_fraction = hi.outlier_fraction = 0.05;
  lo.label_noise_band_ft = hi.label_noise_band_ft = 0.15;
  lo.flare_taper = hi.flare_taper = true;
  lo.ramp_slope_pct = 5.5;         hi.ramp_slope_pct = 7.5;
  lo.cross_slope_pct = 0.4;        hi.cross_slope_pct = 1.6;
  lo.width_in = 50.0;              hi.width_in = 56.0;
  lo.curb_height_ft = 0.38;        hi.curb_height_ft = 0.52;
  lo.warn_depth_ft = 0.8;          hi.warn_depth_ft = 1.4;
  lo.flare_slope_left_pct = 11.0;  hi.flare_slope_left_pct = 16.0;
  lo.flare_slope_right_pct = 11.0; hi.flare_slope_right_pct = 16.0;
  lo.flare_width_left_ft = 2.4;    hi.flare_width_left_ft = 3.4;
  lo.flare_width_right_ft = 2.4;   hi.flare_width_right_ft = 3.4;
  lo.landing_depth_ft = 3.8;       hi.landing_depth_ft = 5.0;
  lo.landing_width_ft = hi.landing_width_ft = 0.0;  // = ramp width
  lo.landing_cross_pct = 0.4;      hi.landing_cross_pct = 1.5;
  lo.landing_slope_pct = 0.4;      hi.landing_slope_pct = 1.5;
  lo.beyond_depth_ft = 1.2;        hi.beyond_depth_ft = 1.8;
  lo.beyond_break_pct = 3.5;       hi.beyond_break_pct = 5.5;
  lo.gutter_depth_ft = 1.6;        hi.gutter_depth_ft = 2.4;
  lo.gutter_slope_pct = 0.5;       hi.gutter_slope_pct = 1.5;
  lo.gutter_cross_pct = 4.0;       hi.gutter_cross_pct = 5.0;
  lo.road_cross_pct = 0.3;         hi.road_cross_pct = 1.2;
  lo.road_depth_ft = 2.8;          hi.road_depth_ft = 3.5;
  lo.apron_width_ft = 1.0;         hi.apron_width_ft = 1.5;
  lo.shear_deg = hi.shear_deg = 0.0;
  lo.top_edge_rotation_deg = hi.top_edge_rotation_deg = 0.0;
  lo.rotation_deg = 0.0;           hi.rotation_deg = 360.0;
  lo.translate_x_ft = -30.0;       hi.translate_x_ft = 30.0;
  lo.translate_y_ft = -30.0;       hi.translate_y_ft = 30.0;
  lo.translate_z_ft = -2.0;        hi.translate_z_ft = 2.0;
  return r;
}

inline std::vector<RampSpec> corpus_primary(std::uint64_t seed, int n = 50) {
  return corpus(seed, n, primary_ranges(), "ramp");
}

/// Noise-free exactness corpus: jittered-grid sampling at pitch 1/16 ft with
/// every facet boundary a multiple of the pitch (mid-channel), zero cross
/// slope, trapezoidal flares, exactly flat landing and street. Three
/// placements exercise rotation/translation.
inline std::vector<RampSpec> corpus_exact() {
  RampSpec base;
  base.sampling = SamplingMode::Grid;
  base.density_pts_ft2 = 256.0;  // pitch 1/16 ft
  base.jitter_frac = 0.02;
  base.noise_sigma_z_ft = 0.0;
  base.outlier_fraction = 0.0;
  base.label_noise_band_ft = 0.0;
  base.cross_slope_pct = 0.0;
  base.flare_taper = false;
  base.flare_outer_taper_ft = 0.45;
  base.warn_depth_ft = 1.0;
  base.landing_depth_ft = 5.0;      // 80 h
  base.landing_width_ft = 0.0;
  base.landing_cross_pct = 0.0;
  base.landing_slope_pct = 0.0;
  base.beyond_depth_ft = 1.25;      // 20 h
  base.beyond_break_pct = 5.0;      // back-of-landing downgrade -5%
  base.gutter_depth_ft = 3.25;      // 52 h
  base.gutter_slope_pct = 0.0;
  base.gutter_cross_pct = 0.0;
  base.road_cross_pct = 0.0;
  base.road_depth_ft = 3.3125;      // 53 h
  base.apron_width_ft = 0.0;

  std::vector<RampSpec> out(3, base);
  out[0].id = "exact-001";
  out[0].ramp_slope_pct = 7.0;
  out[0].curb_height_ft = 0.49;     // length 7.0 = 112 h
  out[0].width_in = 51.0;           // half-width 2.125 = 34 h
  out[0].flare_width_left_ft = 3.4375;   // 55 h
  out[0].flare_width_right_ft = 3.4375;
  out[0].flare_slope_left_pct = 8.5;
  out[0].flare_slope_right_pct = 9.0;
  out[0].rotation_deg = 0.0;

  out[1].id = "exact-002";
  out[1].ramp_slope_pct = 6.0;
  out[1].curb_height_ft = 0.42;     // length 7.0
  out[1].width_in = 52.5;           // half-width 2.1875 = 35 h
  out[1].flare_width_left_ft = 3.375;    // 54 h
  out[1].flare_width_right_ft = 3.375;
  out[1].flare_slope_left_pct = 8.0;
  out[1].flare_slope_right_pct = 7.6;
  out[1].rotation_deg = 30.0;
  out[1].translate_x_ft = 12.0;
  out[1].translate_y_ft = -7.0;
  out[1].translate_z_ft = 0.8;

  out[2].id = "exact-003";
  out[2].ramp_slope_pct = 7.5;
  out[2].curb_height_ft = 0.525;    // length 7.0
  out[2].width_in = 49.5;           // half-width 2.0625 = 33 h
  out[2].flare_width_left_ft = 3.5;      // 56 h
  out[2].flare_width_right_ft = 3.5;
  out[2].flare_slope_left_pct = 9.2;
  out[2].flare_slope_right_pct = 8.9;
  out[2].rotation_deg = 137.0;
  out[2].translate_x_ft = -25.0;
  out[2].translate_y_ft = 40.0;
  out[2].translate_z_ft = -1.2;

  std::uint64_t k = 0;
  for (auto& s : out) s.seed = derive_seed(0x5eedULL + (k++), s.id);
  return out;
}

/// Base ramps for the rotation-invariance battery: dense jittered grid, low
/// noise, no outliers/label noise. The harness rotates each generated cloud
/// (apply_rigid), it does not re-sample.
inline std::vector<RampSpec> corpus_rotation(std::uint64_t seed, int n = 20) {
  SpecRanges r;
  RampSpec& lo = r.lo;
  RampSpec& hi = r.hi;
  lo.sampling = hi.sampling = SamplingMode::Grid;
  lo.density_pts_ft2 = hi.density_pts_ft2 = 484.0;  // pitch 1/22 ft
  lo.jitter_frac = hi.jitter_frac = 0.3;
  lo.noise_sigma_z_ft = hi.noise_sigma_z_ft = 0.0005;
  lo.outlier_fraction = hi.outlier_fraction = 0.0;
  lo.label_noise_band_ft = hi.label_noise_band_ft = 0.0;
  lo.flare_taper = hi.flare_taper = true;
  lo.ramp_slope_pct = 5.0;         hi.ramp_slope_pct = 7.5;
  lo.cross_slope_pct = 0.4;        hi.cross_slope_pct = 1.2;
  lo.width_in = 50.18;             hi.width_in = 50.18;  // half-width 46 h
  lo.curb_height_ft = 0.25;        hi.curb_height_ft = 0.375;  // length 5.0-7.5 at 5-7.5%
  lo.warn_depth_ft = hi.warn_depth_ft = 1.0;
  lo.flare_slope_left_pct = 7.0;   hi.flare_slope_left_pct = 9.5;
  lo.flare_slope_right_pct = 7.0;  hi.flare_slope_right_pct = 9.5;
  lo.flare_width_left_ft = hi.flare_width_left_ft = 2.5;   // 55 h
  lo.flare_width_right_ft = hi.flare_width_right_ft = 2.5;
  lo.landing_depth_ft = hi.landing_depth_ft = 2.727272727272727;  // 60 h
  lo.landing_width_ft = hi.landing_width_ft = 0.0;
  lo.landing_cross_pct = 0.3;      hi.landing_cross_pct = 1.0;
  lo.landing_slope_pct = 0.3;      hi.landing_slope_pct = 1.0;
  lo.beyond_depth_ft = hi.beyond_depth_ft = 1.0;
  lo.beyond_break_pct = hi.beyond_break_pct = 4.5;
  lo.gutter_depth_ft = hi.gutter_depth_ft = 2.0;
  lo.gutter_slope_pct = 0.5;       hi.gutter_slope_pct = 1.2;
  lo.gutter_cross_pct = hi.gutter_cross_pct = 4.5;
  lo.road_cross_pct = hi.road_cross_pct = 0.5;
  lo.road_depth_ft = hi.road_depth_ft = 2.5;
  lo.apron_width_ft = hi.apron_width_ft = 0.0;
  lo.rotation_deg = hi.rotation_deg = 0.0;
  lo.translate_x_ft = hi.translate_x_ft = 0.0;
  lo.translate_y_ft = hi.translate_y_ft = 0.0;
  lo.translate_z_ft = hi.translate_z_ft = 0.0;
  return corpus(seed, n, r, "rot");
}

/// QC battery: 5 sound ramps, then 3 sparse (10 pts/ft^2), 2 sheared
/// (25 deg parallelogram corners), 2 non-parallel (top edge rotated 15 deg),
/// in that id order (qc-001..qc-012).
inline std::vector<RampSpec> corpus_qc(std::uint64_t seed) {
  SpecRanges pr = primary_ranges();
  // QC never measures flares; milder slopes are fine here
  pr.lo.flare_slope_left_pct = 8.0;  pr.hi.flare_slope_left_pct = 12.0;
  pr.lo.flare_slope_right_pct = 8.0; pr.hi.flare_slope_right_pct = 12.0;
  std::mt19937_64 rng(seed);
  std::vector<RampSpec> out;
  for (int i = 0; i < 12; ++i) {
    RampSpec s = sample_spec(pr, rng);
    char buf[16];
    std::snprintf(buf, sizeof buf, "qc-%03d", i + 1);
    s.id = buf;
    if (i >= 5 && i < 8) s.density_pts_ft2 = 10.0;      // sparse
    if (i >= 8 && i < 10) s.shear_deg = 25.0;           // skewed corners
    if (i >= 10) s.top_edge_rotation_deg = 15.0;        // non-parallel edges
    s.seed = derive_seed(seed, s.id);
    out.push_back(std::move(s));
  }
  return out;
}

/// Small realistic corpus for determinism / report-shape batteries.
inline std::vector<RampSpec> corpus_small(std::uint64_t seed, int n = 6) {
  return corpus(seed, n, primary_ranges(), "det");
}

}  // namespace curbscan::synth
