#include <catch2/catch_amalgamated.hpp>

#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/lpc_io.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/core/util.hpp"
#include "test_support.hpp"

using namespace curbscan;
using test_support::error_code;
using test_support::TempDir;
using test_support::write_text;

TEST_CASE("labels map to stable names and integers") {
  REQUIRE(static_cast<int>(ComponentLabel::Unassigned) == 0);
  REQUIRE(static_cast<int>(ComponentLabel::CenterRamp) == 1);
  REQUIRE(static_cast<int>(ComponentLabel::WarningSurface) == 2);
  REQUIRE(static_cast<int>(ComponentLabel::LeftFlare) == 3);
  REQUIRE(static_cast<int>(ComponentLabel::RightFlare) == 4);
  REQUIRE(static_cast<int>(ComponentLabel::Landing) == 5);
  REQUIRE(static_cast<int>(ComponentLabel::Gutter) == 6);
  REQUIRE(std::string(label_name(ComponentLabel::WarningSurface)) == "warning_surface");
}

TEST_CASE("lpc round-trip preserves coordinates within 1e-6") {
  TempDir tmp("lpc");
  LabeledCloud cloud;
  cloud.id = "rt";
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_real_distribution<double> ui(0.0, 1.0);
  for (int i = 0; i < 500; ++i)
    cloud.push_back({u(rng), u(rng), u(rng), ui(rng)},
                    static_cast<ComponentLabel>(i % kNumLabels));
  save_lpc(tmp.file("rt.lpc"), cloud);
  const LabeledCloud back = load_lpc(tmp.file("rt.lpc"));
  REQUIRE(back.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    REQUIRE(back.points[i].x == Catch::Approx(cloud.points[i].x).margin(1e-6));
    REQUIRE(back.points[i].y == Catch::Approx(cloud.points[i].y).margin(1e-6));
    REQUIRE(back.points[i].z == Catch::Approx(cloud.points[i].z).margin(1e-6));
    REQUIRE(back.points[i].intensity ==
            Catch::Approx(cloud.points[i].intensity).margin(1e-6));
    REQUIRE(back.labels[i] == cloud.labels[i]);
  }
}

TEST_CASE("lpc parser skips comments and blanks, applies scale") {
  TempDir tmp("lpc2");
  write_text(tmp.file("a.lpc"),
             "# header comment\n"
             "\n"
             "1.0 2.0 3.0 0.5 1\n"
             "   # indented comment\n"
             "4.0 5.0 6.0 0.25 6\n");
  const LabeledCloud c = load_lpc(tmp.file("a.lpc"), 2.0);
  REQUIRE(c.size() == 2);
  REQUIRE(c.points[0].x == Catch::Approx(2.0));
  REQUIRE(c.points[1].z == Catch::Approx(12.0));
  REQUIRE(c.points[0].intensity == Catch::Approx(0.5));  // intensity not scaled
  REQUIRE(c.labels[1] == ComponentLabel::Gutter);
  REQUIRE(c.id == "a");
}

TEST_CASE("lpc parser error codes") {
  TempDir tmp("lpc3");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("missing.lpc")); }) ==
          ErrorCode::MissingFile);

  write_text(tmp.file("bad.lpc"), "1 2 three 0.5 1\n");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("bad.lpc")); }) ==
          ErrorCode::ParseError);

  write_text(tmp.file("short.lpc"), "1 2 3 0.5\n");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("short.lpc")); }) ==
          ErrorCode::ParseError);

  write_text(tmp.file("trail.lpc"), "1 2 3 0.5 1 junk\n");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("trail.lpc")); }) ==
          ErrorCode::ParseError);

  write_text(tmp.file("label.lpc"), "1 2 3 0.5 7\n");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("label.lpc")); }) ==
          ErrorCode::LabelOutOfRange);

  write_text(tmp.file("neg.lpc"), "1 2 3 0.5 -1\n");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("neg.lpc")); }) ==
          ErrorCode::LabelOutOfRange);

  write_text(tmp.file("empty.lpc"), "# only a comment\n\n");
  REQUIRE(error_code([&] { (void)load_lpc(tmp.file("empty.lpc")); }) ==
          ErrorCode::EmptyCloud);
}

TEST_CASE("intensity normalization triggers only outside [0,1]") {
  TempDir tmp("lpc4");
  SECTION("in-range values untouched") {
    write_text(tmp.file("in.lpc"), "0 0 0 0.2 0\n1 0 0 0.9 0\n");
    const auto c = load_lpc(tmp.file("in.lpc"));
    REQUIRE(c.points[0].intensity == Catch::Approx(0.2));
    REQUIRE(c.points[1].intensity == Catch::Approx(0.9));
  }
  SECTION("out-of-range triggers min-max") {
    write_text(tmp.file("out.lpc"), "0 0 0 100 0\n1 0 0 300 0\n2 0 0 200 0\n");
    const auto c = load_lpc(tmp.file("out.lpc"));
    REQUIRE(c.points[0].intensity == Catch::Approx(0.0));
    REQUIRE(c.points[1].intensity == Catch::Approx(1.0));
    REQUIRE(c.points[2].intensity == Catch::Approx(0.5));
  }
  SECTION("degenerate range maps to 1") {
    write_text(tmp.file("deg.lpc"), "0 0 0 500 0\n1 0 0 500 0\n");
    const auto c = load_lpc(tmp.file("deg.lpc"));
    REQUIRE(c.points[0].intensity == Catch::Approx(1.0));
    REQUIRE(c.points[1].intensity == Catch::Approx(1.0));
  }
}

TEST_CASE("cloud subset and index helpers") {
  LabeledCloud c;
  c.push_back({0, 0, 0, 0}, ComponentLabel::CenterRamp);
  c.push_back({1, 0, 0, 0}, ComponentLabel::Gutter);
  c.push_back({2, 0, 0, 0}, ComponentLabel::CenterRamp);
  REQUIRE(c.indices_of(ComponentLabel::CenterRamp) == std::vector<int>{0, 2});
  const auto sub = c.subset(ComponentLabel::CenterRamp);
  REQUIRE(sub.size() == 2);
  REQUIRE(sub.points[1].x == Catch::Approx(2.0));
}

TEST_CASE("line construction, intersection and side values") {
  const Line2 l = line_through({0.0, 0.0}, {2.0, 0.0});  // the x-axis
  REQUIRE(l.eval(1.0, 5.0) > 0.0);   // left of travel direction is +
  REQUIRE(l.eval(1.0, -5.0) < 0.0);
  REQUIRE(std::abs(l.eval(7.0, 0.0)) < 1e-12);
  REQUIRE(std::hypot(l.a, l.b) == Catch::Approx(1.0));

  const Line2 m = line_through({1.0, -1.0}, {1.0, 1.0});  // x = 1
  const auto p = intersect_lines(l, m);
  REQUIRE(p.has_value());
  REQUIRE(p->x() == Catch::Approx(1.0));
  REQUIRE(p->y() == Catch::Approx(0.0).margin(1e-12));

  const Line2 par = line_through({0.0, 3.0}, {1.0, 3.0});
  REQUIRE_FALSE(intersect_lines(l, par).has_value());

  REQUIRE(error_code([] { (void)line_through({1.0, 1.0}, {1.0, 1.0}); }) ==
          ErrorCode::DegenerateGeometry);
}

TEST_CASE("polygon area matches the shoelace oracle") {
  const std::vector<Vec2> square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  REQUIRE(polygon_signed_area(square) == Catch::Approx(4.0));  // CCW positive
  std::vector<Vec2> cw(square.rbegin(), square.rend());
  REQUIRE(polygon_signed_area(cw) == Catch::Approx(-4.0));
  REQUIRE(polygon_area(cw) == Catch::Approx(4.0));
  const std::vector<Vec2> tri{{0, 0}, {4, 0}, {0, 3}};
  REQUIRE(polygon_area(tri) == Catch::Approx(6.0));
}

TEST_CASE("point-in-polygon and proper segment intersection") {
  const std::vector<Vec2> square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  REQUIRE(point_in_polygon({1.0, 1.0}, square));
  REQUIRE_FALSE(point_in_polygon({3.0, 1.0}, square));
  REQUIRE_FALSE(point_in_polygon({-0.001, 1.0}, square));

  REQUIRE(segments_properly_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {1, 1}, {2, 2}, {3, 3}));
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));
  // sharing an endpoint is not a proper crossing
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));
}

TEST_CASE("segment distances") {
  REQUIRE(point_segment_distance2({1, 1}, {0, 0}, {2, 0}) == Catch::Approx(1.0));
  REQUIRE(point_segment_distance2({-3, 4}, {0, 0}, {2, 0}) == Catch::Approx(5.0));
  REQUIRE(point_segment_distance3({1, 0, 2}, {0, 0, 0}, {2, 0, 0}) ==
          Catch::Approx(2.0));
  REQUIRE(point_segment_distance3({5, 0, 0}, {0, 0, 0}, {2, 0, 0}) ==
          Catch::Approx(3.0));
}

TEST_CASE("rigid transform preserves line-point incidence") {
  const auto t = RigidXY::from_degrees(37.0, 4.0, -2.5, 1.25);
  const Line2 l = line_through({0.3, -1.0}, {2.0, 5.0});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const Line2 tl = t.apply(l);
    REQUIRE(tl.eval(t.apply(p)) == Catch::Approx(l.eval(p)).margin(1e-9));
  }
  const Vec3 q{1.0, 2.0, 3.0};
  REQUIRE(t.apply(q).z() == Catch::Approx(4.25));
}

TEST_CASE("fnv1a64 matches published vectors") {
  REQUIRE(fnv1a64("") == 0xcbf29ce484222325ull);
  REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  REQUIRE(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("median and quantile against sorted oracles") {
  REQUIRE(median({3.0, 1.0, 2.0}) == Catch::Approx(2.0));
  REQUIRE(median({4.0, 1.0, 3.0, 2.0}) == Catch::Approx(2.5));
  REQUIRE(quantile({1, 2, 3, 4, 5}, 0.0) == Catch::Approx(1.0));
  REQUIRE(quantile({1, 2, 3, 4, 5}, 1.0) == Catch::Approx(5.0));
  REQUIRE(quantile({1, 2, 3, 4, 5}, 0.5) == Catch::Approx(3.0));
  REQUIRE(quantile({1, 2, 3, 4}, 0.5) == Catch::Approx(2.5));
  REQUIRE(error_code([] { (void)median({}); }) == ErrorCode::InvalidParam);
}

TEST_CASE("sampling without replacement is deterministic and valid") {
  const auto a = sample_without_replacement(100, 10, 42);
  const auto b = sample_without_replacement(100, 10, 42);
  REQUIRE(a == b);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 1; i < a.size(); ++i) REQUIRE(a[i] > a[i - 1]);
  for (int v : a) {
    REQUIRE(v >= 0);
    REQUIRE(v < 100);
  }
  const auto c = sample_without_replacement(100, 10, 43);
  REQUIRE(a != c);
  const auto all = sample_without_replacement(5, 5, 1);
  REQUIRE(all == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("bounds of a point set") {
  std::vector<Point3> pts{{1, 2, 3, 0}, {-1, 5, 0, 0}, {0, 0, 9, 0}};
  const auto b = compute_bounds(pts);
  REQUIRE(b.min.x() == Catch::Approx(-1.0));
  REQUIRE(b.max.y() == Catch::Approx(5.0));
  REQUIRE(b.max.z() == Catch::Approx(9.0));
  REQUIRE(error_code([] { (void)compute_bounds({}); }) == ErrorCode::EmptyCloud);
}
