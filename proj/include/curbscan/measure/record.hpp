#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "curbscan/core/error.hpp"

namespace curbscan {

/// The twelve Caltrans-form features measured on a ramp.
enum class Feature : int {
  A = 0,  ///< ramp slope (%)
  B,      ///< ramp cross slope (%)
  C,      ///< ramp width (in)
  D,      ///< left flare slope (%)
  E,      ///< right flare slope (%)
  F,      ///< gutter slope (%)
  G,      ///< gutter cross slope (%)
  H,      ///< road surface cross slope (%)
  I,      ///< top landing cross slope (%)
  J,      ///< top landing slope (%)
  K,      ///< top landing width (in)
  L,      ///< top landing depth (in)
};

inline constexpr int kNumFeatures = 12;

/// Sub-measurement counts per feature: A1-A3 ... L1-L3, 31 total.
inline constexpr std::array<int, kNumFeatures> kSubCounts = {3, 3, 3, 1, 1, 2,
                                                             3, 3, 3, 3, 3, 3};

inline constexpr int kTotalSubMeasurements = 31;  // sum of kSubCounts

inline const char* feature_name(Feature f) {
  switch (f) {
    case Feature::A: return "A";
    case Feature::B: return "B";
    case Feature::C: return "C";
    case Feature::D: return "D";
    case Feature::E: return "E";
    case Feature::F: return "F";
    case Feature::G: return "G";
    case Feature::H: return "H";
    case Feature::I: return "I";
    case Feature::J: return "J";
    case Feature::K: return "K";
    case Feature::L: return "L";
  }
  return "?";
}

/// Inverse of feature_name; raises ParseError on anything but "A".."L".
inline Feature feature_from_name(const std::string& s) {
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'L')
    return static_cast<Feature>(s[0] - 'A');
  raise(ErrorCode::ParseError, "unknown feature name '" + s + "'");
}

inline const char* feature_description(Feature f) {
  switch (f) {
    case Feature::A: return "Ramp Slope (%)";
    case Feature::B: return "Ramp Cross Slope (%)";
    case Feature::C: return "Ramp Width (inches)";
    case Feature::D: return "Left Flare Slope (%)";
    case Feature::E: return "Right Flare Slope (%)";
    case Feature::F: return "Gutter Slope (%)";
    case Feature::G: return "Gutter Cross Slope (%)";
    case Feature::H: return "Road Surface Cross Slope (%)";
    case Feature::I: return "Top Landing Cross Slope (%)";
    case Feature::J: return "Top Landing Slope (%)";
    case Feature::K: return "Top Landing Width (inches)";
    case Feature::L: return "Top Landing Depth (inches)";
  }
  return "?";
}

/// Whether a feature is a slope (percent) or a dimension (inches).
inline bool feature_is_slope(Feature f) {
  switch (f) {
    case Feature::C:
    case Feature::K:
    case Feature::L: return false;
    default: return true;
  }
}

/// One sub-measurement; `valid` false means the value could not be
/// extracted (refit failure, missing region, ...) and must be ignored.
struct SubMeasurement {
  double value = 0.0;
  bool valid = false;
};

/// The 31 sub-measurement slots of the Caltrans form (A1..L3), with
/// per-value validity flags. Slopes are unsigned percent grade; widths
/// and depths are inches.
struct MeasurementRecord {
  std::array<std::array<SubMeasurement, 3>, kNumFeatures> slots{};

  static int count(Feature f) { return kSubCounts[static_cast<int>(f)]; }

  SubMeasurement& at(Feature f, int i) {
    check_index(f, i);
    return slots[static_cast<int>(f)][static_cast<std::size_t>(i)];
  }
  const SubMeasurement& at(Feature f, int i) const {
    check_index(f, i);
    return slots[static_cast<int>(f)][static_cast<std::size_t>(i)];
  }

  void set(Feature f, int i, double value) {
    at(f, i) = SubMeasurement{value, true};
  }

  /// Uniform value across all sub-slots of a feature (ground-truth helper).
  void set_all(Feature f, double value) {
    for (int i = 0; i < count(f); ++i) set(f, i, value);
  }

  [[nodiscard]] int valid_count(Feature f) const {
    int n = 0;
    for (int i = 0; i < count(f); ++i)
      if (at(f, i).valid) ++n;
    return n;
  }

  /// Sub-measurement label like "A1", "L3".
  static std::string slot_name(Feature f, int i) {
    return std::string(feature_name(f)) + std::to_string(i + 1);
  }

private:
  static void check_index(Feature f, int i) {
    if (i < 0 || i >= count(f))
      raise(ErrorCode::IndexOutOfRange,
            "sub-measurement index " + std::to_string(i) + " for feature " +
                feature_name(f));
  }
};

inline constexpr std::array<Feature, kNumFeatures> kAllFeatures = {
    Feature::A, Feature::B, Feature::C, Feature::D, Feature::E, Feature::F,
    Feature::G, Feature::H, Feature::I, Feature::J, Feature::K, Feature::L};

}  // namespace curbscan
