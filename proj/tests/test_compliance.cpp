#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "curbscan/compliance/compliance.hpp"
#include "test_support.hpp"

using Catch::Matchers::WithinAbs;
using curbscan::ErrorCode;
using curbscan::Feature;
using curbscan::MeasurementRecord;
using curbscan::SubMeasurement;
using test_support::error_code;

namespace compliance = curbscan::compliance;
namespace qc = curbscan::qc;

namespace {

const qc::QcVerdict kQcPass{true, {}, {}};

qc::QcVerdict qc_fail() {
  qc::QcVerdict v;
  v.pass = false;
  v.reasons.push_back({qc::QcReasonKind::DensityTooLow, 3.0, 0});
  return v;
}

/// Record with every feature uniformly at its threshold (everything passes
/// on the inclusive boundary).
MeasurementRecord record_at_thresholds(const compliance::StandardsTable& table) {
  MeasurementRecord rec;
  for (const auto& s : table) rec.set_all(s.feature, s.threshold);
  return rec;
}

}  // namespace

TEST_CASE("default standards table matches the twelve-row form") {
  const auto table = compliance::default_standards();
  struct Row {
    Feature f;
    compliance::Direction d;
    double t;
  };
  const std::vector<Row> expect = {
      {Feature::A, compliance::Direction::UpperBound, 7.7},
      {Feature::B, compliance::Direction::UpperBound, 1.7},
      {Feature::C, compliance::Direction::LowerBound, 49.75},
      {Feature::D, compliance::Direction::UpperBound, 9.2},
      {Feature::E, compliance::Direction::UpperBound, 9.2},
      {Feature::F, compliance::Direction::UpperBound, 1.7},
      {Feature::G, compliance::Direction::UpperBound, 5.2},
      {Feature::H, compliance::Direction::UpperBound, 5.2},
      {Feature::I, compliance::Direction::UpperBound, 1.7},
      {Feature::J, compliance::Direction::UpperBound, 1.7},
      {Feature::K, compliance::Direction::LowerBound, 49.75},
      {Feature::L, compliance::Direction::LowerBound, 49.75}};
  REQUIRE(table.size() == expect.size());
  for (const auto& row : expect) {
    const auto& s = table[static_cast<std::size_t>(row.f)];
    CHECK(s.feature == row.f);
    CHECK(s.direction == row.d);
    CHECK(s.threshold == row.t);
  }
}

TEST_CASE("aggregate_feature applies worst-case rules") {
  const compliance::ComplianceStandard upper{Feature::A,
                                             compliance::Direction::UpperBound, 7.7};
  const compliance::ComplianceStandard lower{Feature::C,
                                             compliance::Direction::LowerBound, 49.75};

  SECTION("upper-bound feature reports the maximum") {
    const std::vector<SubMeasurement> vals = {{7.1, true}, {7.5, true}, {7.3, true}};
    CHECK(compliance::aggregate_feature(vals, upper) == 7.5);
  }
  SECTION("lower-bound feature reports the minimum") {
    const std::vector<SubMeasurement> vals = {{50.0, true}, {49.8, true}, {51.0, true}};
    CHECK(compliance::aggregate_feature(vals, lower) == 49.8);
  }
  SECTION("invalid sub-measurements are ignored") {
    const std::vector<SubMeasurement> vals = {{99.0, false}, {7.2, true}};
    CHECK(compliance::aggregate_feature(vals, upper) == 7.2);
  }
  SECTION("all invalid raises AllInvalid") {
    const std::vector<SubMeasurement> vals = {{1.0, false}, {2.0, false}};
    CHECK(error_code([&] { compliance::aggregate_feature(vals, upper); }) ==
          ErrorCode::AllInvalid);
    CHECK(error_code([&] {
            compliance::aggregate_feature(std::vector<SubMeasurement>{}, upper);
          }) == ErrorCode::AllInvalid);
  }
}

TEST_CASE("thresholds are inclusive and strict exceedance fails") {
  const auto table = compliance::default_standards();

  SECTION("A = 7.7 compliant, A = 7.71 not") {
    MeasurementRecord rec = record_at_thresholds(table);
    auto rep = compliance::evaluate(rec, kQcPass, table);
    CHECK(rep.features[static_cast<std::size_t>(Feature::A)].pass);
    rec.set_all(Feature::A, 7.71);
    rep = compliance::evaluate(rec, kQcPass, table);
    CHECK_FALSE(rep.features[static_cast<std::size_t>(Feature::A)].pass);
  }
  SECTION("C = 49.75 compliant, C = 49.5 not") {
    MeasurementRecord rec = record_at_thresholds(table);
    auto rep = compliance::evaluate(rec, kQcPass, table);
    CHECK(rep.features[static_cast<std::size_t>(Feature::C)].pass);
    rec.set_all(Feature::C, 49.5);
    rep = compliance::evaluate(rec, kQcPass, table);
    CHECK_FALSE(rep.features[static_cast<std::size_t>(Feature::C)].pass);
  }
  SECTION("every feature passes exactly on its boundary and fails just past it") {
    for (const auto& s : table) {
      MeasurementRecord rec = record_at_thresholds(table);
      auto rep = compliance::evaluate(rec, kQcPass, table);
      CAPTURE(curbscan::feature_name(s.feature));
      CHECK(rep.features[static_cast<std::size_t>(s.feature)].pass);
      CHECK(rep.status == compliance::RampStatus::Compliant);

      const double bad = s.direction == compliance::Direction::UpperBound
                             ? s.threshold + 0.01
                             : s.threshold - 0.25;
      rec.set_all(s.feature, bad);
      rep = compliance::evaluate(rec, kQcPass, table);
      CHECK_FALSE(rep.features[static_cast<std::size_t>(s.feature)].pass);
      CHECK(rep.status == compliance::RampStatus::NonCompliant);
      CHECK_FALSE(rep.overall_pass);
    }
  }
}

TEST_CASE("evaluate is monotone for upper-bound features") {
  const auto table = compliance::default_standards();
  bool seen_fail = false;
  for (double v = 7.0; v <= 8.4; v += 0.05) {
    MeasurementRecord rec = record_at_thresholds(table);
    rec.set_all(Feature::A, v);
    const auto rep = compliance::evaluate(rec, kQcPass, table);
    const bool pass = rep.features[static_cast<std::size_t>(Feature::A)].pass;
    if (seen_fail) CHECK_FALSE(pass);  // increasing value never flips fail->pass
    if (!pass) seen_fail = true;
  }
  CHECK(seen_fail);
}

TEST_CASE("ramp status ordering and overall pass") {
  const auto table = compliance::default_standards();

  SECTION("compliant when everything is valid and passes") {
    const auto rep =
        compliance::evaluate(record_at_thresholds(table), kQcPass, table);
    CHECK(rep.status == compliance::RampStatus::Compliant);
    CHECK(rep.overall_pass);
  }
  SECTION("an all-invalid feature means needs-field-verification") {
    MeasurementRecord rec = record_at_thresholds(table);
    for (int i = 0; i < MeasurementRecord::count(Feature::G); ++i)
      rec.at(Feature::G, i) = SubMeasurement{};  // clear to invalid
    const auto rep = compliance::evaluate(rec, kQcPass, table);
    CHECK(rep.status == compliance::RampStatus::NeedsFieldVerification);
    CHECK_FALSE(rep.overall_pass);
    CHECK_FALSE(rep.features[static_cast<std::size_t>(Feature::G)].valid);
  }
  SECTION("a failing valid feature beats an invalid one") {
    MeasurementRecord rec = record_at_thresholds(table);
    for (int i = 0; i < MeasurementRecord::count(Feature::G); ++i)
      rec.at(Feature::G, i) = SubMeasurement{};
    rec.set_all(Feature::B, 2.5);
    const auto rep = compliance::evaluate(rec, kQcPass, table);
    CHECK(rep.status == compliance::RampStatus::NonCompliant);
  }
  SECTION("qc failure dominates everything") {
    MeasurementRecord rec = record_at_thresholds(table);
    rec.set_all(Feature::B, 2.5);
    const auto rep = compliance::evaluate(rec, qc_fail(), table);
    CHECK(rep.status == compliance::RampStatus::QcFailed);
    CHECK_FALSE(rep.overall_pass);
    // per-feature verdicts are still populated for the report
    CHECK_FALSE(rep.features[static_cast<std::size_t>(Feature::B)].pass);
  }
  SECTION("partially-invalid feature still aggregates over the valid slots") {
    MeasurementRecord rec = record_at_thresholds(table);
    rec.at(Feature::A, 1) = SubMeasurement{};
    rec.set(Feature::A, 2, 7.6);
    const auto rep = compliance::evaluate(rec, kQcPass, table);
    const auto& fv = rep.features[static_cast<std::size_t>(Feature::A)];
    CHECK(fv.valid);
    CHECK(fv.value == 7.7);  // max of {7.7, 7.6}
    CHECK(fv.contributing.size() == 2);
    CHECK(fv.contributing[0].slot == "A1");
    CHECK(fv.contributing[1].slot == "A3");
    CHECK(rep.status == compliance::RampStatus::Compliant);
  }
}

TEST_CASE("margin arithmetic matches the delta formula") {
  const auto table = compliance::default_standards();

  // automated A = 7.8 fails; manual A = 7.6 passes; both inside 7.7 +- 0.385
  MeasurementRecord rec = record_at_thresholds(table);
  rec.set_all(Feature::A, 7.8);
  const auto rep = compliance::evaluate(rec, kQcPass, table);

  SECTION("conflict reclassified within 5 percent") {
    const auto ma =
        compliance::margin_compare(rep, {{Feature::A, 7.6}}, {5.0, 10.0}, table);
    REQUIRE(ma.entries.size() == 1);
    const auto& e = ma.entries[0];
    CHECK_FALSE(e.agree);
    REQUIRE(e.within_margin.has_value());
    CHECK(*e.within_margin == 5.0);
    CHECK(e.classification() == "conflict-within-5");
  }
  SECTION("wide disagreement stays a genuine conflict at 10 percent") {
    MeasurementRecord wide = record_at_thresholds(table);
    wide.set_all(Feature::A, 9.0);
    const auto wrep = compliance::evaluate(wide, kQcPass, table);
    const auto ma =
        compliance::margin_compare(wrep, {{Feature::A, 7.0}}, {5.0, 10.0}, table);
    REQUIRE(ma.entries.size() == 1);
    CHECK_FALSE(ma.entries[0].agree);
    CHECK_FALSE(ma.entries[0].within_margin.has_value());
    CHECK(ma.entries[0].classification() == "conflict-beyond");
  }
  SECTION("identical verdicts agree regardless of margin") {
    const auto ma =
        compliance::margin_compare(rep, {{Feature::A, 8.0}}, {5.0, 10.0}, table);
    REQUIRE(ma.entries.size() == 1);
    CHECK(ma.entries[0].agree);
    CHECK(ma.entries[0].classification() == "agree");
  }
  SECTION("p = 0 reduces to raw verdict comparison") {
    const auto ma = compliance::margin_compare(rep, {{Feature::A, 7.6}}, {0.0}, table);
    REQUIRE(ma.entries.size() == 1);
    CHECK_FALSE(ma.entries[0].agree);
    CHECK_FALSE(ma.entries[0].within_margin.has_value());
  }
  SECTION("widening the margin list never loses a within classification") {
    const auto tight =
        compliance::margin_compare(rep, {{Feature::A, 7.6}}, {5.0}, table);
    const auto wide =
        compliance::margin_compare(rep, {{Feature::A, 7.6}}, {5.0, 10.0}, table);
    REQUIRE(tight.entries[0].within_margin.has_value());
    REQUIRE(wide.entries[0].within_margin.has_value());
    CHECK(*wide.entries[0].within_margin <= *tight.entries[0].within_margin);

    // a conflict beyond 5 but within 10 gets picked up by the wider list
    MeasurementRecord mid = record_at_thresholds(table);
    mid.set_all(Feature::A, 8.3);  // inside [6.93, 8.47], outside [7.315, 8.085]
    const auto mrep = compliance::evaluate(mid, kQcPass, table);
    const auto only5 =
        compliance::margin_compare(mrep, {{Feature::A, 7.5}}, {5.0}, table);
    const auto both =
        compliance::margin_compare(mrep, {{Feature::A, 7.5}}, {5.0, 10.0}, table);
    CHECK_FALSE(only5.entries[0].within_margin.has_value());
    REQUIRE(both.entries[0].within_margin.has_value());
    CHECK(*both.entries[0].within_margin == 10.0);
    CHECK(both.entries[0].classification() == "conflict-within-10");
  }
  SECTION("lower-bound band uses the same formula") {
    // C: T = 49.75, p = 5 -> delta = 2.4875, band [47.2625, 52.2375]
    MeasurementRecord rec2 = record_at_thresholds(table);
    rec2.set_all(Feature::C, 48.0);  // fails, inside band
    const auto r2 = compliance::evaluate(rec2, kQcPass, table);
    const auto ma =
        compliance::margin_compare(r2, {{Feature::C, 50.0}}, {5.0}, table);
    REQUIRE(ma.entries.size() == 1);
    CHECK(ma.entries[0].within_margin.has_value());
  }
}

TEST_CASE("margin_compare input validation") {
  const auto table = compliance::default_standards();
  const auto rep = compliance::evaluate(record_at_thresholds(table), kQcPass, table);

  CHECK(error_code([&] { compliance::margin_compare(rep, {}, {5.0}, table); }) ==
        ErrorCode::NoSharedFeatures);
  CHECK(error_code([&] {
          compliance::margin_compare(rep, {{Feature::A, 7.0}}, {-1.0}, table);
        }) == ErrorCode::InvalidParam);

  SECTION("features the report could not measure are not shared") {
    MeasurementRecord rec;  // nothing valid at all
    const auto empty_rep = compliance::evaluate(rec, kQcPass, table);
    CHECK(error_code([&] {
            compliance::margin_compare(empty_rep, {{Feature::A, 7.0}}, {5.0}, table);
          }) == ErrorCode::NoSharedFeatures);
  }
  SECTION("manual features outside the report are skipped, shared ones kept") {
    MeasurementRecord rec = record_at_thresholds(table);
    for (int i = 0; i < MeasurementRecord::count(Feature::L); ++i)
      rec.at(Feature::L, i) = SubMeasurement{};
    const auto r = compliance::evaluate(rec, kQcPass, table);
    const auto ma = compliance::margin_compare(
        r, {{Feature::L, 60.0}, {Feature::A, 7.0}}, {5.0}, table);
    REQUIRE(ma.entries.size() == 1);
    CHECK(ma.entries[0].feature == Feature::A);
  }
}

TEST_CASE("standards table round-trips through the config JSON bit-exactly") {
  auto table = compliance::default_standards();
  // awkward binary representations on purpose
  table[static_cast<std::size_t>(Feature::B)].threshold = 1.0 / 3.0;
  table[static_cast<std::size_t>(Feature::K)].threshold =
      std::nextafter(49.75, 50.0);

  const std::string text = compliance::standards_to_json(table).dump(2);
  const auto parsed = compliance::standards_from_json(nlohmann::json::parse(text));
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(parsed[i].feature == table[i].feature);
    CHECK(parsed[i].direction == table[i].direction);
    CHECK(parsed[i].threshold == table[i].threshold);  // bitwise equality
  }
}

TEST_CASE("standards config validation") {
  auto good = compliance::standards_to_json(compliance::default_standards());

  SECTION("shuffled rows come back in feature order") {
    std::swap(good[0], good[11]);
    std::swap(good[3], good[7]);
    const auto table = compliance::standards_from_json(good);
    for (int i = 0; i < curbscan::kNumFeatures; ++i)
      CHECK(table[static_cast<std::size_t>(i)].feature == static_cast<Feature>(i));
  }
  SECTION("wrong row count") {
    good.erase(5);
    CHECK(error_code([&] { compliance::standards_from_json(good); }) ==
          ErrorCode::ConfigError);
  }
  SECTION("duplicate feature") {
    good[3]["feature"] = "A";
    CHECK(error_code([&] { compliance::standards_from_json(good); }) ==
          ErrorCode::ConfigError);
  }
  SECTION("unknown feature name") {
    good[0]["feature"] = "Z";
    CHECK(error_code([&] { compliance::standards_from_json(good); }) ==
          ErrorCode::ConfigError);
  }
  SECTION("unknown direction") {
    good[0]["direction"] = "sideways";
    CHECK(error_code([&] { compliance::standards_from_json(good); }) ==
          ErrorCode::ConfigError);
  }
  SECTION("non-numeric threshold") {
    good[0]["threshold"] = "7.7";
    CHECK(error_code([&] { compliance::standards_from_json(good); }) ==
          ErrorCode::ConfigError);
  }
}

TEST_CASE("manual survey CSV parsing") {
  SECTION("subset of feature columns in arbitrary order") {
    std::istringstream in("id,C,A\nramp-1,50.0,7.5\nramp-2,,8.1\n");
    const auto rows = compliance::parse_manual_csv(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == "ramp-1");
    CHECK(rows[0].second.at(Feature::C) == 50.0);
    CHECK(rows[0].second.at(Feature::A) == 7.5);
    CHECK(rows[1].second.count(Feature::C) == 0);
    CHECK(rows[1].second.at(Feature::A) == 8.1);
  }
  SECTION("windows line endings and padded cells") {
    std::istringstream in("id,A\r\nramp-1, 7.25\r\n");
    const auto rows = compliance::parse_manual_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].second.at(Feature::A) == 7.25);
  }
  SECTION("errors") {
    std::istringstream empty("");
    CHECK(error_code([&] { compliance::parse_manual_csv(empty); }) ==
          ErrorCode::ParseError);
    std::istringstream bad_header("ramp,A\nx,1\n");
    CHECK(error_code([&] { compliance::parse_manual_csv(bad_header); }) ==
          ErrorCode::ParseError);
    std::istringstream bad_feature("id,Q\nx,1\n");
    CHECK(error_code([&] { compliance::parse_manual_csv(bad_feature); }) ==
          ErrorCode::ParseError);
    std::istringstream bad_number("id,A\nx,seven\n");
    CHECK(error_code([&] { compliance::parse_manual_csv(bad_number); }) ==
          ErrorCode::ParseError);
    std::istringstream ragged("id,A,B\nx,1\n");
    CHECK(error_code([&] { compliance::parse_manual_csv(ragged); }) ==
          ErrorCode::ParseError);
  }
}

TEST_CASE("report JSON carries the full verdict") {
  const auto table = compliance::default_standards();
  MeasurementRecord rec = record_at_thresholds(table);
  rec.set_all(Feature::B, 2.5);
  for (int i = 0; i < MeasurementRecord::count(Feature::G); ++i)
    rec.at(Feature::G, i) = SubMeasurement{};
  const auto rep = compliance::evaluate(rec, kQcPass, table);
  const auto j = compliance::report_to_json(rep);

  CHECK(j.at("status") == "non-compliant");
  CHECK(j.at("overall_pass") == false);
  CHECK(j.at("qc").at("pass") == true);
  REQUIRE(j.at("features").size() == 12);
  const auto& b = j.at("features")[1];
  CHECK(b.at("feature") == "B");
  CHECK(b.at("pass") == false);
  CHECK(b.at("value") == 2.5);
  CHECK(b.at("contributing").size() == 3);
  CHECK(b.at("contributing")[0].at("slot") == "B1");
  const auto& g = j.at("features")[6];
  CHECK(g.at("valid") == false);
  CHECK_FALSE(g.contains("value"));

  const auto ma = compliance::margin_compare(rep, {{Feature::B, 1.6}}, {5.0, 10.0}, table);
  const auto mj = compliance::margin_to_json(ma);
  REQUIRE(mj.at("entries").size() == 1);
  CHECK(mj.at("entries")[0].at("feature") == "B");
  CHECK(mj.at("entries")[0].at("classification") == "conflict-beyond");
}
