#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "senselab/sensors.hpp"

using namespace senselab;

TEST_CASE("sensor table lists exactly the 15 variables in canonical order") {
  const auto& table = sensor_table();
  REQUIRE(table.size() == 15);
  REQUIRE(table[kIrRearMedium].name == "ir_rear_medium");
  REQUIRE(table[kIrRearLong].name == "ir_rear_long");
  REQUIRE(table[kPhoto].name == "photo");
  REQUIRE(table[kThermA].name == "therm_a");
  REQUIRE(table[kThermB].name == "therm_b");
  REQUIRE(table[kCliffLeft].name == "cliff_left");
  REQUIRE(table[kWall].name == "wall");
  REQUIRE(table[kBumpLeft].name == "bump_left");
  REQUIRE(table[kWheelCaster].name == "wheel_caster");
  int numeric = 0;
  int booleans = 0;
  for (const auto& spec : table) {
    REQUIRE(spec.lo < spec.hi);
    if (spec.kind == SensorKind::Boolean) {
      REQUIRE(spec.lo == 0.0);
      REQUIRE(spec.hi == 1.0);
      ++booleans;
    } else {
      ++numeric;
    }
  }
  REQUIRE(numeric == kNumericSensorCount);
  REQUIRE(booleans == kBooleanSensorCount);
}

TEST_CASE("observation field accessor matches the table order one-to-one") {
  Observation o;
  o.ir_rear_medium = 1;
  o.ir_rear_long = 2;
  o.photo = 3;
  o.therm_a = 4.5;
  o.therm_b = 5.5;
  o.cliff_left = 6;
  o.cliff_front_left = 7;
  o.cliff_front_right = 8;
  o.cliff_right = 9;
  o.wall = 10;
  o.bump_left = true;
  o.wheel_right = true;
  const auto f = o.features();
  REQUIRE(f[kIrRearMedium] == 1.0);
  REQUIRE(f[kIrRearLong] == 2.0);
  REQUIRE(f[kPhoto] == 3.0);
  REQUIRE(f[kThermA] == 4.5);
  REQUIRE(f[kThermB] == 5.5);
  REQUIRE(f[kCliffLeft] == 6.0);
  REQUIRE(f[kCliffFrontLeft] == 7.0);
  REQUIRE(f[kCliffFrontRight] == 8.0);
  REQUIRE(f[kCliffRight] == 9.0);
  REQUIRE(f[kWall] == 10.0);
  REQUIRE(f[kBumpLeft] == 1.0);
  REQUIRE(f[kBumpRight] == 0.0);
  REQUIRE(f[kWheelLeft] == 0.0);
  REQUIRE(f[kWheelRight] == 1.0);
  REQUIRE(f[kWheelCaster] == 0.0);
}

TEST_CASE("bump_state encodes the three contact states") {
  REQUIRE(bump_state(true, false) == 1);
  REQUIRE(bump_state(false, true) == 2);
  REQUIRE(bump_state(true, true) == 3);
  REQUIRE(bump_state(false, false) == 0);
}

TEST_CASE("bump_state is a bijection over the four switch pairs") {
  std::set<int> seen;
  for (bool l : {false, true}) {
    for (bool r : {false, true}) {
      seen.insert(bump_state(l, r));
    }
  }
  REQUIRE(seen == std::set<int>{0, 1, 2, 3});
}

static Observation mid_range_observation() {
  Observation o;
  o.t = 1.0;
  o.ir_rear_medium = 500;
  o.ir_rear_long = 500;
  o.photo = 500;
  o.therm_a = 21.0;
  o.therm_b = 21.5;
  o.cliff_left = 1200;
  o.cliff_front_left = 1200;
  o.cliff_front_right = 1200;
  o.cliff_right = 1200;
  o.wall = 30;
  return o;
}

TEST_CASE("validate_observation accepts mid-range values") {
  REQUIRE(static_cast<bool>(validate_observation(mid_range_observation())));
}

TEST_CASE("validate_observation names the offending field") {
  auto hot = mid_range_observation();
  hot.therm_a = 1000.0;
  const auto v1 = validate_observation(hot);
  REQUIRE_FALSE(v1.ok);
  REQUIRE(v1.message.find("therm_a") != std::string::npos);

  auto dark = mid_range_observation();
  dark.photo = -1;
  const auto v2 = validate_observation(dark);
  REQUIRE_FALSE(v2.ok);
  REQUIRE(v2.message.find("photo") != std::string::npos);

  auto backwards = mid_range_observation();
  backwards.t = -0.5;
  REQUIRE_FALSE(validate_observation(backwards).ok);
}
