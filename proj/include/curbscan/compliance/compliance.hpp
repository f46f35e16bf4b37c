#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curbscan/core/error.hpp"
#include "curbscan/measure/record.hpp"
#include "curbscan/qc/qc.hpp"

namespace curbscan::compliance {

// ---------------------------------------------------------------------------
// standards table
// ---------------------------------------------------------------------------

/// Whether a standard caps the value from above (slopes) or requires a
/// minimum (widths, depth).
enum class Direction { UpperBound, LowerBound };

inline const char* direction_name(Direction d) {
  return d == Direction::UpperBound ? "upper-bound" : "lower-bound";
}

/// One row of the Caltrans-form standards table. Thresholds are inclusive:
/// value == threshold complies.
struct ComplianceStandard {
  Feature feature = Feature::A;
  Direction direction = Direction::UpperBound;
  double threshold = 0.0;  ///< percent grade for slopes, inches for dimensions

  [[nodiscard]] bool complies(double value) const {
    return direction == Direction::UpperBound ? value <= threshold
                                              : value >= threshold;
  }
};

using StandardsTable = std::array<ComplianceStandard, kNumFeatures>;

/// The twelve-row default table (slope limits in percent grade, dimensional
/// limits in inches).
inline StandardsTable default_standards() {
  return {{{Feature::A, Direction::UpperBound, 7.7},
           {Feature::B, Direction::UpperBound, 1.7},
           {Feature::C, Direction::LowerBound, 49.75},
           {Feature::D, Direction::UpperBound, 9.2},
           {Feature::E, Direction::UpperBound, 9.2},
           {Feature::F, Direction::UpperBound, 1.7},
           {Feature::G, Direction::UpperBound, 5.2},
           {Feature::H, Direction::UpperBound, 5.2},
           {Feature::I, Direction::UpperBound, 1.7},
           {Feature::J, Direction::UpperBound, 1.7},
           {Feature::K, Direction::LowerBound, 49.75},
           {Feature::L, Direction::LowerBound, 49.75}}};
}

/// Serializes the table as the config-file JSON array.
inline nlohmann::ordered_json standards_to_json(const StandardsTable& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : table)
    arr.push_back({{"feature", feature_name(s.feature)},
                   {"direction", direction_name(s.direction)},
                   {"threshold", s.threshold}});
  return arr;
}

/// Parses a standards config array. Every feature must appear exactly once;
/// rows may arrive in any order and are returned in feature order.
inline StandardsTable standards_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(kNumFeatures))
    raise(ErrorCode::ConfigError, "standards config must be a 12-row array");
  StandardsTable table{};
  std::array<bool, kNumFeatures> seen{};
  for (const auto& row : arr) {
    if (!row.is_object() || !row.contains("feature") || !row.contains("direction") ||
        !row.contains("threshold"))
      raise(ErrorCode::ConfigError,
            "standards row needs feature, direction, threshold");
    Feature f{};
    try {
      f = feature_from_name(row.at("feature").get<std::string>());
    } catch (const Error&) {
      raise(ErrorCode::ConfigError,
            "unknown feature in standards config: " + row.at("feature").dump());
    }
    const std::string dir = row.at("direction").get<std::string>();
    Direction d{};
    if (dir == "upper-bound")
      d = Direction::UpperBound;
    else if (dir == "lower-bound")
      d = Direction::LowerBound;
    else
      raise(ErrorCode::ConfigError, "unknown direction '" + dir + "'");
    if (!row.at("threshold").is_number())
      raise(ErrorCode::ConfigError, "threshold must be numeric");
    const auto slot = static_cast<std::size_t>(f);
    if (seen[slot])
      raise(ErrorCode::ConfigError,
            std::string("duplicate standards row for feature ") + feature_name(f));
    seen[slot] = true;
    table[slot] = {f, d, row.at("threshold").get<double>()};
  }
  return table;
}

// ---------------------------------------------------------------------------
// aggregation and evaluation
// ---------------------------------------------------------------------------

/// Worst-case aggregation: every measured location must comply, so an
/// upper-bound feature reports its maximum sub-measurement and a lower-bound
/// feature its minimum.
inline double aggregate_feature(const std::vector<SubMeasurement>& values,
                                const ComplianceStandard& standard) {
  std::optional<double> agg;
  for (const auto& v : values) {
    if (!v.valid) continue;
    if (!agg)
      agg = v.value;
    else
      agg = standard.direction == Direction::UpperBound ? std::max(*agg, v.value)
                                                        : std::min(*agg, v.value);
  }
  if (!agg)
    raise(ErrorCode::AllInvalid,
          std::string("no valid sub-measurement for feature ") +
              feature_name(standard.feature));
  return *agg;
}

/// One contributing sub-measurement inside a feature verdict.
struct Contribution {
  std::string slot;  ///< "A1" .. "L3"
  double value = 0.0;
};

/// Per-feature evaluation result. `valid` is false when every
/// sub-measurement failed extraction; `pass` is meaningful only then.
struct FeatureVerdict {
  Feature feature = Feature::A;
  Direction direction = Direction::UpperBound;
  double threshold = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();  ///< aggregated
  bool valid = false;
  bool pass = false;
  std::vector<Contribution> contributing;
};

/// Ramp-level status, worst condition first: QC disqualification dominates, a
/// failing valid feature beats a merely unmeasurable one, and "compliant"
/// requires all twelve features measured and passing.
enum class RampStatus { QcFailed, NonCompliant, NeedsFieldVerification, Compliant };

inline const char* ramp_status_name(RampStatus s) {
  switch (s) {
    case RampStatus::QcFailed: return "qc-failed";
    case RampStatus::NonCompliant: return "non-compliant";
    case RampStatus::NeedsFieldVerification: return "needs-field-verification";
    case RampStatus::Compliant: return "compliant";
  }
  return "?";
}

struct ComplianceReport {
  std::array<FeatureVerdict, kNumFeatures> features{};
  qc::QcVerdict qc;
  RampStatus status = RampStatus::Compliant;
  bool overall_pass = false;  ///< qc passed, nothing invalid, everything passes
};

/// Evaluates a measurement record against the standards table. Never throws:
/// an all-invalid feature is carried as `valid == false` and downgrades the
/// ramp to needs-field-verification rather than non-compliant.
inline ComplianceReport evaluate(const MeasurementRecord& record,
                                 const qc::QcVerdict& qc,
                                 const StandardsTable& standards = default_standards()) {
  ComplianceReport rep;
  rep.qc = qc;
  bool any_fail = false;
  bool any_invalid = false;
  for (const auto& standard : standards) {
    auto& fv = rep.features[static_cast<std::size_t>(standard.feature)];
    fv.feature = standard.feature;
    fv.direction = standard.direction;
    fv.threshold = standard.threshold;
    std::vector<SubMeasurement> values;
    for (int i = 0; i < MeasurementRecord::count(standard.feature); ++i) {
      const SubMeasurement& sub = record.at(standard.feature, i);
      values.push_back(sub);
      if (sub.valid)
        fv.contributing.push_back(
            {MeasurementRecord::slot_name(standard.feature, i), sub.value});
    }
    try {
      fv.value = aggregate_feature(values, standard);
      fv.valid = true;
      fv.pass = standard.complies(fv.value);
      if (!fv.pass) any_fail = true;
    } catch (const Error&) {
      any_invalid = true;
    }
  }
  if (!qc.pass)
    rep.status = RampStatus::QcFailed;
  else if (any_fail)
    rep.status = RampStatus::NonCompliant;
  else if (any_invalid)
    rep.status = RampStatus::NeedsFieldVerification;
  else
    rep.status = RampStatus::Compliant;
  rep.overall_pass = qc.pass && !any_fail && !any_invalid;
  return rep;
}

// ---------------------------------------------------------------------------
// tolerance-margin comparison against manual measurements
// ---------------------------------------------------------------------------

/// Sparse manual survey values: feature -> measured value (percent or
/// inches, matching the automated units).
using ManualValues = std::map<Feature, double>;

/// One shared feature of an automated/manual comparison. `within_margin`
/// holds the smallest margin percent at which the conflict falls inside the
/// tolerance band [T - delta, T + delta] for both values; empty means the
/// verdicts agree or the conflict persists beyond every margin.
struct MarginEntry {
  Feature feature = Feature::A;
  double auto_value = 0.0;
  double manual_value = 0.0;
  double threshold = 0.0;
  bool auto_pass = false;
  bool manual_pass = false;
  bool agree = false;
  std::optional<double> within_margin;

  [[nodiscard]] std::string classification() const {
    if (agree) return "agree";
    if (!within_margin) return "conflict-beyond";
    std::ostringstream os;
    os << "conflict-within-" << *within_margin;
    return os.str();
  }
};

struct MarginAnalysis {
  std::vector<MarginEntry> entries;  ///< shared features, feature order
  std::vector<double> margins;       ///< percents applied, ascending
};

/// Compares automated and manual per-feature verdicts. A disagreement is a
/// conflict; it is bucketed under the smallest margin p whose band
/// delta = T * p / 100 contains both values, and stays a genuine conflict
/// when none does. Features the automated report could not measure, and
/// features absent from the manual survey, are skipped.
inline MarginAnalysis margin_compare(const ComplianceReport& automated,
                                     const ManualValues& manual,
                                     std::vector<double> margins = {5.0, 10.0},
                                     const StandardsTable& standards = default_standards()) {
  for (double p : margins)
    if (p < 0.0 || !std::isfinite(p))
      raise(ErrorCode::InvalidParam, "margin percent must be finite and >= 0");
  std::sort(margins.begin(), margins.end());
  margins.erase(std::unique(margins.begin(), margins.end()), margins.end());

  MarginAnalysis out;
  out.margins = margins;
  for (const auto& standard : standards) {
    const auto& fv = automated.features[static_cast<std::size_t>(standard.feature)];
    const auto it = manual.find(standard.feature);
    if (!fv.valid || it == manual.end()) continue;
    MarginEntry e;
    e.feature = standard.feature;
    e.auto_value = fv.value;
    e.manual_value = it->second;
    e.threshold = standard.threshold;
    e.auto_pass = fv.pass;
    e.manual_pass = standard.complies(e.manual_value);
    e.agree = e.auto_pass == e.manual_pass;
    if (!e.agree) {
      for (double p : margins) {
        const double delta = standard.threshold * p / 100.0;
        const double lo = standard.threshold - delta;
        const double hi = standard.threshold + delta;
        if (e.auto_value >= lo && e.auto_value <= hi && e.manual_value >= lo &&
            e.manual_value <= hi) {
          e.within_margin = p;
          break;
        }
      }
    }
    out.entries.push_back(e);
  }
  if (out.entries.empty())
    raise(ErrorCode::NoSharedFeatures,
          "manual survey shares no measurable feature with the report");
  return out;
}

// ---------------------------------------------------------------------------
// manual-measurement CSV
// ---------------------------------------------------------------------------

/// Parses the manual survey CSV: header `id,A,B,...` (any feature subset, any
/// order), one ramp per row, empty cells for unmeasured features. Returns
/// rows in file order as (id, values) pairs.
inline std::vector<std::pair<std::string, ManualValues>> parse_manual_csv(
    std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    raise(ErrorCode::ParseError, "manual CSV is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
        cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(cell);
    }
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  const std::vector<std::string> header = split(line);
  if (header.empty() || header[0] != "id")
    raise(ErrorCode::ParseError, "manual CSV header must start with 'id'");
  std::vector<Feature> columns;
  for (std::size_t c = 1; c < header.size(); ++c)
    columns.push_back(feature_from_name(header[c]));

  std::vector<std::pair<std::string, ManualValues>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      raise(ErrorCode::ParseError, "manual CSV line " + std::to_string(lineno) +
                                       ": expected " + std::to_string(header.size()) +
                                       " cells, got " + std::to_string(cells.size()));
    ManualValues vals;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        raise(ErrorCode::ParseError,
              "manual CSV line " + std::to_string(lineno) + ": bad number '" +
                  cells[c] + "'");
      }
      if (used != cells[c].size())
        raise(ErrorCode::ParseError,
              "manual CSV line " + std::to_string(lineno) + ": bad number '" +
                  cells[c] + "'");
      vals[columns[c - 1]] = v;
    }
    rows.emplace_back(cells[0], std::move(vals));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// report JSON
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json report_to_json(const ComplianceReport& rep) {
  nlohmann::ordered_json j;
  j["status"] = ramp_status_name(rep.status);
  j["overall_pass"] = rep.overall_pass;
  nlohmann::ordered_json qc;
  qc["pass"] = rep.qc.pass;
  qc["reasons"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.qc.reasons) qc["reasons"].push_back(r.describe());
  qc["notes"] = rep.qc.notes;
  j["qc"] = qc;
  nlohmann::ordered_json feats = nlohmann::ordered_json::array();
  for (const auto& fv : rep.features) {
    nlohmann::ordered_json f;
    f["feature"] = feature_name(fv.feature);
    f["direction"] = direction_name(fv.direction);
    f["threshold"] = fv.threshold;
    f["valid"] = fv.valid;
    if (fv.valid) {
      f["value"] = fv.value;
      f["pass"] = fv.pass;
    }
    nlohmann::ordered_json subs = nlohmann::ordered_json::array();
    for (const auto& c : fv.contributing)
      subs.push_back({{"slot", c.slot}, {"value", c.value}});
    f["contributing"] = subs;
    feats.push_back(f);
  }
  j["features"] = feats;
  return j;
}

inline nlohmann::ordered_json margin_to_json(const MarginAnalysis& ma) {
  nlohmann::ordered_json j;
  j["margins"] = ma.margins;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : ma.entries) {
    nlohmann::ordered_json row;
    row["feature"] = feature_name(e.feature);
    row["auto"] = e.auto_value;
    row["manual"] = e.manual_value;
    row["threshold"] = e.threshold;
    row["auto_pass"] = e.auto_pass;
    row["manual_pass"] = e.manual_pass;
    row["classification"] = e.classification();
    entries.push_back(row);
  }
  j["entries"] = entries;
  return j;
}

}  // namespace curbscan::compliance
