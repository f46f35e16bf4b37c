#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "curbscan/raster/patches.hpp"
#include "curbscan/raster/raster.hpp"
#include "test_support.hpp"

using namespace curbscan;
using namespace curbscan::raster;
using test_support::error_code;
using test_support::TempDir;
using test_support::write_text;

TEST_CASE("kappa follows the pinned density table") {
  REQUIRE(kappa_for_density(1.0, 50) == 0);    // saturated tile: leave alone
  REQUIRE(kappa_for_density(0.5, 50) == 1);    // floor(1) -> no-op
  REQUIRE(kappa_for_density(0.25, 50) == 2);
  REQUIRE(kappa_for_density(0.1, 50) == 5);
  REQUIRE(kappa_for_density(0.01, 50) == 50);
  REQUIRE(kappa_for_density(0.005, 50) == 50);  // capped
  REQUIRE(kappa_for_density(0.005, 80) == 80);  // cap is the parameter
  REQUIRE(kappa_for_density(0.0, 50) == 50);    // empty tile pinned to the cap
  REQUIRE(error_code([] { (void)kappa_for_density(-0.1, 50); }) ==
          ErrorCode::InvalidParam);
  REQUIRE(error_code([] { (void)kappa_for_density(1.1, 50); }) ==
          ErrorCode::InvalidParam);
  REQUIRE(error_code([] { (void)kappa_for_density(0.5, 0); }) ==
          ErrorCode::InvalidParam);
}

TEST_CASE("render maps intensity to pixel values, last writer wins") {
  std::vector<Point3> pts{
      {0.5, 0.5, 0.0, 1.0},   // bottom-left pixel
      {9.5, 9.5, 0.0, 0.5},   // top-right pixel
      {0.5, 0.5, 0.0, 0.2},   // overwrites the first
  };
  const auto img = render_window(pts, 0.0, 0.0, 10.0, 10);
  REQUIRE(img.at(0, 9) == 51);   // round(255 * 0.2)
  REQUIRE(img.at(9, 0) == 128);  // round(255 * 0.5)
  REQUIRE(img.count_nonzero() == 2);

  // closed window: exact right/top edge falls into the last pixel
  std::vector<Point3> edge{{10.0, 10.0, 0.0, 1.0}, {0.0, 0.0, 0.0, 1.0}};
  const auto e = render_window(edge, 0.0, 0.0, 10.0, 10);
  REQUIRE(e.at(9, 0) == 255);
  REQUIRE(e.at(0, 9) == 255);
  // outside stays out
  std::vector<Point3> out{{10.001, 5.0, 0.0, 1.0}, {-0.001, 5.0, 0.0, 1.0}};
  REQUIRE(render_window(out, 0.0, 0.0, 10.0, 10).count_nonzero() == 0);
}

TEST_CASE("pixel transform round trips") {
  const auto img = render_window({{1, 1, 0, 1}}, -3.0, 2.0, 8.0, 64);
  for (int col : {0, 10, 63})
    for (int row : {0, 31, 63}) {
      const Vec2 w = img.tf.pixel_center(col, row);
      const Vec2 p = img.tf.to_pixel(w);
      REQUIRE(p.x() == Catch::Approx(col + 0.5));
      REQUIRE(p.y() == Catch::Approx(row + 0.5));
    }
}

TEST_CASE("project_topdown centers the cloud") {
  LabeledCloud c;
  c.push_back({0.0, 0.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  c.push_back({10.0, 4.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  const auto img = project_topdown(c, 100, 20.0);
  REQUIRE(img.width == 100);
  REQUIRE(img.tf.pixel_size == Catch::Approx(0.2));
  // window is centered at (5, 2)
  REQUIRE(img.tf.origin_x == Catch::Approx(-5.0));
  REQUIRE(img.tf.origin_y_top == Catch::Approx(12.0));
  REQUIRE(img.count_nonzero() == 2);
  REQUIRE(error_code([] { (void)project_topdown(LabeledCloud{}, 100, 20.0); }) ==
          ErrorCode::EmptyCloud);
  REQUIRE(error_code([&] { (void)project_topdown(c, 0, 20.0); }) ==
          ErrorCode::InvalidParam);
}

TEST_CASE("dilate kernel anchoring") {
  std::vector<Point3> pts{{5.05, 4.95, 0.0, 1.0}};  // pixel (5, 5) in 10x10 @1ft
  const auto img = render_window(pts, 0.0, 0.0, 10.0, 10);
  REQUIRE(img.at(5, 5) == 255);

  SECTION("k = 1 is the identity") {
    const auto d = dilate(img, 1);
    REQUIRE(d.px == img.px);
  }
  SECTION("k = 2 spreads toward +row/+col only") {
    const auto d = dilate(img, 2);
    REQUIRE(d.count_nonzero() == 4);
    REQUIRE(d.at(5, 5) == 255);
    REQUIRE(d.at(6, 5) == 255);
    REQUIRE(d.at(5, 6) == 255);
    REQUIRE(d.at(6, 6) == 255);
  }
  SECTION("k = 3 is the centered 3x3 block") {
    const auto d = dilate(img, 3);
    REQUIRE(d.count_nonzero() == 9);
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) REQUIRE(d.at(5 + dc, 5 + dr) == 255);
  }
  SECTION("borders clamp instead of wrapping") {
    std::vector<Point3> corner{{0.5, 9.5, 0.0, 1.0}};  // pixel (0, 0)
    const auto d = dilate(render_window(corner, 0, 0, 10.0, 10), 3);
    REQUIRE(d.count_nonzero() == 4);  // 2x2 survives at the corner
  }
}

TEST_CASE("adaptive dilation saturates sparse tiles and leaves dense ones") {
  // one point in a 64x64 tile: rho = 1/4096 -> kappa capped at 50
  std::vector<Point3> lone{{32.5, 31.5, 0.0, 1.0}};  // pixel (32, 32)
  const auto img = render_window(lone, 0.0, 0.0, 64.0, 64);
  const auto out = adaptive_dilate(img, 64, 50);
  // 50-window offsets [-25, 24] then the global k=2 pass adds one +row/+col
  REQUIRE(out.count_nonzero() == 51 * 51);
  REQUIRE(out.at(8, 8) == 255);
  REQUIRE(out.at(58, 58) == 255);
  REQUIRE(out.at(7, 30) == 0);

  // saturated image: every tile rho = 1 -> copy; global pass changes nothing
  RasterImage full = img;
  std::fill(full.px.begin(), full.px.end(), std::uint8_t{200});
  const auto same = adaptive_dilate(full, 16, 50);
  REQUIRE(same.px == full.px);
}

TEST_CASE("adaptive dilation is monotone on random images") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 64.0);
  std::uniform_real_distribution<double> ui(0.1, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<Point3> pts;
    for (int i = 0; i < 120; ++i) pts.push_back({u(rng), u(rng), 0.0, ui(rng)});
    const auto img = render_window(pts, 0.0, 0.0, 64.0, 128);
    const auto out = adaptive_dilate(img, 32, 50);
    for (std::size_t i = 0; i < img.px.size(); ++i) REQUIRE(out.px[i] >= img.px[i]);
    REQUIRE(error_code([] { (void)adaptive_dilate(RasterImage{}, 32, 50); }) ==
            ErrorCode::EmptyImage);
  }
}

TEST_CASE("pgm round trip is byte exact") {
  TempDir tmp("pgm");
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 16.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({u(rng), u(rng), 0.0, 0.7});
  const auto img = render_window(pts, 0.0, 0.0, 16.0, 48);
  write_pgm(tmp.file("a.pgm"), img);
  const auto back = read_pgm(tmp.file("a.pgm"));
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  REQUIRE(back.px == img.px);

  REQUIRE(error_code([&] { (void)read_pgm(tmp.file("missing.pgm")); }) ==
          ErrorCode::MissingFile);
  write_text(tmp.file("bad.pgm"), "P2\n2 2\n255\n0 0 0 0\n");
  REQUIRE(error_code([&] { (void)read_pgm(tmp.file("bad.pgm")); }) ==
          ErrorCode::ParseError);
  write_text(tmp.file("trunc.pgm"), "P5\n4 4\n255\nab");
  REQUIRE(error_code([&] { (void)read_pgm(tmp.file("trunc.pgm")); }) ==
          ErrorCode::ParseError);
}

TEST_CASE("patch tiling covers the extent with overlap") {
  LabeledCloud c;
  c.id = "survey";
  c.push_back({0.0, 0.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  c.push_back({50.0, 30.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  c.push_back({40.0, 10.0, 0.0, 1.0}, ComponentLabel::Unassigned);  // shared edge
  const auto grid = tile_patches(c, 40.0, 0.5, 128);
  REQUIRE(grid.nx == 2);  // stride 20 covers 50 ft with two columns
  REQUIRE(grid.ny == 1);
  REQUIRE(grid.patches.size() == 2);
  REQUIRE(grid.patches[0].x0 == Catch::Approx(0.0));
  REQUIRE(grid.patches[1].x0 == Catch::Approx(20.0));
  // the x = 40 point paints into both covering patches
  REQUIRE(grid.patches[0].img.count_nonzero() >= 2);
  REQUIRE(grid.patches[1].img.count_nonzero() >= 2);

  REQUIRE(error_code([&] { (void)tile_patches(c, 40.0, 1.0, 128); }) ==
          ErrorCode::InvalidParam);
  REQUIRE(error_code([] { (void)tile_patches(LabeledCloud{}, 40.0, 0.5, 128); }) ==
          ErrorCode::EmptyCloud);
}

TEST_CASE("backprojection restores world boxes with expansion") {
  LabeledCloud c;
  c.id = "s";
  c.push_back({0.0, 0.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  c.push_back({40.0, 40.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  c.push_back({10.0, 30.0, 1.5, 0.8}, ComponentLabel::CenterRamp);
  const auto grid = tile_patches(c, 40.0, 0.5, 400);  // 0.1 ft pixels
  // the interesting point sits at pixel col 100, row 100 of patch 0
  const auto box = backproject_box(grid, 0, 95.0, 95.0, 105.0, 105.0, 0.1);
  REQUIRE(box.min_x == Catch::Approx(9.5 - 0.1));
  REQUIRE(box.max_x == Catch::Approx(10.5 + 0.1));
  REQUIRE(box.min_y == Catch::Approx(29.5 - 0.1));
  REQUIRE(box.max_y == Catch::Approx(30.5 + 0.1));
  const auto crop = crop_cloud(c, box);
  REQUIRE(crop.size() == 1);
  REQUIRE(crop.labels[0] == ComponentLabel::CenterRamp);

  REQUIRE(error_code([&] {
            (void)backproject_box(grid, 99, 0, 0, 1, 1);
          }) == ErrorCode::IndexOutOfRange);
  REQUIRE(error_code([&] {
            (void)backproject_box(grid, 0, 5, 5, 5, 9);
          }) == ErrorCode::DegenerateBox);
}

TEST_CASE("patch sidecars carry georeferencing") {
  TempDir tmp("patches");
  LabeledCloud c;
  c.id = "side";
  c.push_back({0.0, 0.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  c.push_back({25.0, 12.0, 0.0, 1.0}, ComponentLabel::Unassigned);
  const auto grid = tile_patches(c, 40.0, 0.5, 64);
  write_patches(tmp.path(), grid, c.id);
  REQUIRE(std::filesystem::exists(tmp.file("side_px0_py0.pgm")));
  REQUIRE(std::filesystem::exists(tmp.file("side_px0_py0.json")));
  std::ifstream in(tmp.file("side_px0_py0.json"));
  const auto j = nlohmann::json::parse(in);
  REQUIRE(j["schema_version"] == 1);
  REQUIRE(j["patch_ft"] == 40.0);
  REQUIRE(j["anchor"]["x"] == 0.0);
  REQUIRE(j["pixel_size_ft"] == Catch::Approx(40.0 / 64.0));
}
