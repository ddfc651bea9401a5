#include <cmath>
#include <random>

#include "doctest.h"
#include "risvec/geometry.hpp"

using namespace risvec;

TEST_CASE("distance examples") {
  CHECK(distance({0, 0, 0}, {3, 4, 0}) == doctest::Approx(5.0));
  CHECK(distance({0, 0, 25}, {250, 220, 25}) == doctest::Approx(333.0165).epsilon(1e-6));
  CHECK(distance({1, 2, 3}, {1, 2, 3}) == 0.0);
}

TEST_CASE("distance is symmetric and obeys the triangle inequality") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const Position3D a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
  }
}

TEST_CASE("sin_angle_to_ris examples") {
  const Position3D ris{250, 220, 25};
  CHECK(sin_angle_to_ris({250, 100, 1.5}, ris) == doctest::Approx(0.0));
  CHECK(std::abs(sin_angle_to_ris({400, 220, 1.5}, ris)) == doctest::Approx(1.0));
  CHECK(std::abs(sin_angle_to_ris({0, 0, 25}, ris)) == doctest::Approx(250.0 / std::hypot(250.0, 220.0)));
  CHECK(std::abs(sin_angle_to_ris({0, 0, 25}, ris)) == doctest::Approx(0.7507).epsilon(1e-4));
  CHECK_THROWS(sin_angle_to_ris({250, 220, 0}, ris));
}

TEST_CASE("sin_angle_to_ris stays within [-1, 1]") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-2000.0, 2000.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = sin_angle_to_ris({u(rng), u(rng), u(rng)}, {250, 220, 25});
    CHECK(std::abs(s) <= 1.0);
  }
}

TEST_CASE("advance_vehicles kinematics and respawn") {
  ScenarioLayout layout;
  Rng rng(5);
  std::vector<VehicleState> v{{0, {100, 200, 1.5}, 10.0}};
  v = advance_vehicles(v, 0.1, layout, rng);
  CHECK(v[0].position.x == doctest::Approx(101.0));

  v = {{0, {layout.road_end_x - 0.5, 200, 1.5}, 10.0}};
  v = advance_vehicles(v, 0.1, layout, rng);
  CHECK(v[0].position.x == layout.road_start_x);
  CHECK(v[0].speed >= layout.speed_min);
  CHECK(v[0].speed <= layout.speed_max);

  CHECK_THROWS(advance_vehicles(v, 0.0, layout, rng));
}

TEST_CASE("advance_vehicles keeps count and stays on the road") {
  ScenarioLayout layout;
  Rng rng(6);
  auto v = spawn_vehicles(layout, rng);
  REQUIRE(v.size() == 8);
  for (int t = 0; t < 100; ++t) {
    v = advance_vehicles(v, 0.1, layout, rng);
    REQUIRE(v.size() == 8);
    for (const auto& s : v) {
      CHECK(s.position.x >= layout.road_start_x);
      CHECK(s.position.x <= layout.road_end_x);
    }
  }
  // long horizon at high speed forces many respawns
  for (int t = 0; t < 2000; ++t) v = advance_vehicles(v, 1.0, layout, rng);
  for (const auto& s : v) CHECK((s.position.x >= layout.road_start_x && s.position.x <= layout.road_end_x));
}

TEST_CASE("layout validation") {
  ScenarioLayout bad;
  bad.road_end_x = bad.road_start_x;
  CHECK_THROWS(bad.validate());
  ScenarioLayout bad_speed;
  bad_speed.speed_min = 20.0;
  CHECK_THROWS(bad_speed.validate());
  CHECK_NOTHROW(ScenarioLayout{}.validate());
}
