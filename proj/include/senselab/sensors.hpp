#pragma once

#include <array>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace senselab {

// The robot carries 15 sensor variables: two rear-facing IR range sensors,
// a photo cell, two IR thermometers, four cliff IR sensors, a wall IR
// sensor, and five booleans (two bumper switches, three wheel-drop
// switches). This header is the single source of truth for their order,
// kinds, and legal ranges.

enum class SensorKind { IntegerAdc, Temperature, Boolean };

struct SensorSpec {
  std::string_view name;
  SensorKind kind;
  double lo = 0.0;
  double hi = 0.0;
  std::string_view units;
};

inline constexpr int kSensorCount = 15;
inline constexpr int kNumericSensorCount = 10;  // the first 10 in order
inline constexpr int kBooleanSensorCount = 5;   // the last 5 in order

// Feature indices in canonical order (also the dataset CSV column order
// after the t column).
enum SensorIndex : int {
  kIrRearMedium = 0,
  kIrRearLong = 1,
  kPhoto = 2,
  kThermA = 3,
  kThermB = 4,
  kCliffLeft = 5,
  kCliffFrontLeft = 6,
  kCliffFrontRight = 7,
  kCliffRight = 8,
  kWall = 9,
  kBumpLeft = 10,
  kBumpRight = 11,
  kWheelLeft = 12,
  kWheelRight = 13,
  kWheelCaster = 14,
};

// ADC ceilings: 1023 for the Arduino-attached sensors (10-bit), 4095 for
// the drive-platform internals (12-bit). Thermometer bounds are the
// sensor's rated ambient operating range.
inline const std::array<SensorSpec, kSensorCount>& sensor_table() {
  static const std::array<SensorSpec, kSensorCount> table = {{
      {"ir_rear_medium", SensorKind::IntegerAdc, 0, 1023, "counts"},
      {"ir_rear_long", SensorKind::IntegerAdc, 0, 1023, "counts"},
      {"photo", SensorKind::IntegerAdc, 0, 1023, "counts"},
      {"therm_a", SensorKind::Temperature, -40.0, 125.0, "degC"},
      {"therm_b", SensorKind::Temperature, -40.0, 125.0, "degC"},
      {"cliff_left", SensorKind::IntegerAdc, 0, 4095, "counts"},
      {"cliff_front_left", SensorKind::IntegerAdc, 0, 4095, "counts"},
      {"cliff_front_right", SensorKind::IntegerAdc, 0, 4095, "counts"},
      {"cliff_right", SensorKind::IntegerAdc, 0, 4095, "counts"},
      {"wall", SensorKind::IntegerAdc, 0, 4095, "counts"},
      {"bump_left", SensorKind::Boolean, 0, 1, ""},
      {"bump_right", SensorKind::Boolean, 0, 1, ""},
      {"wheel_left", SensorKind::Boolean, 0, 1, ""},
      {"wheel_right", SensorKind::Boolean, 0, 1, ""},
      {"wheel_caster", SensorKind::Boolean, 0, 1, ""},
  }};
  return table;
}

// One simultaneous reading of all 15 variables, t seconds after the start
// of the experiment.
struct Observation {
  double t = 0.0;
  int ir_rear_medium = 0;
  int ir_rear_long = 0;
  int photo = 0;
  double therm_a = 0.0;
  double therm_b = 0.0;
  int cliff_left = 0;
  int cliff_front_left = 0;
  int cliff_front_right = 0;
  int cliff_right = 0;
  int wall = 0;
  bool bump_left = false;
  bool bump_right = false;
  bool wheel_left = false;
  bool wheel_right = false;
  bool wheel_caster = false;

  bool operator==(const Observation&) const = default;

  double field(int index) const {
    switch (index) {
      case kIrRearMedium: return ir_rear_medium;
      case kIrRearLong: return ir_rear_long;
      case kPhoto: return photo;
      case kThermA: return therm_a;
      case kThermB: return therm_b;
      case kCliffLeft: return cliff_left;
      case kCliffFrontLeft: return cliff_front_left;
      case kCliffFrontRight: return cliff_front_right;
      case kCliffRight: return cliff_right;
      case kWall: return wall;
      case kBumpLeft: return bump_left ? 1.0 : 0.0;
      case kBumpRight: return bump_right ? 1.0 : 0.0;
      case kWheelLeft: return wheel_left ? 1.0 : 0.0;
      case kWheelRight: return wheel_right ? 1.0 : 0.0;
      case kWheelCaster: return wheel_caster ? 1.0 : 0.0;
      default: return 0.0;
    }
  }

  // Canonical feature vector: numeric sensors as-is, booleans as 0/1.
  std::array<double, kSensorCount> features() const {
    std::array<double, kSensorCount> f{};
    for (int i = 0; i < kSensorCount; ++i)
      f[static_cast<std::size_t>(i)] = field(i);
    return f;
  }
};

// Scenario labels: 0 = empty room, 1 = walk-across, 2 = walk-around.
inline constexpr int kScenarioCount = 3;
inline constexpr int kScenarioEmpty = 0;
inline constexpr int kScenarioWalkAcross = 1;
inline constexpr int kScenarioWalkAround = 2;

// Proximity bands, distances in cm from the robot shell.
// 0 = contact, then 1-20, 21-40, 41-60, 61-80.
inline constexpr int kProximityBandCount = 5;

struct ProximityBand {
  int index = 0;

  bool is_contact() const { return index == 0; }
  double lo_cm() const { return index == 0 ? 0.0 : 20.0 * (index - 1) + 1.0; }
  double hi_cm() const { return index == 0 ? 0.0 : 20.0 * index; }
  std::string_view label() const {
    static constexpr std::array<std::string_view, kProximityBandCount> names =
        {"contact", "1-20cm", "21-40cm", "41-60cm", "61-80cm"};
    return names[static_cast<std::size_t>(index)];
  }
};

// Derived bumper state: left contact = 1, right contact = 2, center
// (both switches) = 3, no contact = 0. Stored data keeps the two raw
// switches; this is a view.
inline int bump_state(bool bump_left, bool bump_right) {
  if (bump_left && bump_right) return 3;
  if (bump_left) return 1;
  if (bump_right) return 2;
  return 0;
}

struct Validity {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};

// Accepts iff t is non-negative and every field lies inside its spec
// range; on rejection the message names the offending field and value.
inline Validity validate_observation(const Observation& obs,
                                     std::span<const SensorSpec> specs) {
  if (obs.t < 0.0) {
    return {false, "t is negative: " + std::to_string(obs.t)};
  }
  for (int i = 0; i < kSensorCount && i < static_cast<int>(specs.size());
       ++i) {
    const auto& spec = specs[static_cast<std::size_t>(i)];
    const double v = obs.field(i);
    if (v < spec.lo || v > spec.hi) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s out of range [%g, %g]: %g",
                    std::string(spec.name).c_str(), spec.lo, spec.hi, v);
      return {false, buf};
    }
  }
  return {};
}

inline Validity validate_observation(const Observation& obs) {
  return validate_observation(obs, sensor_table());
}

}  // namespace senselab
