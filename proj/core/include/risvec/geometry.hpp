#pragma once

#include <vector>

#include "risvec/rng.hpp"

namespace risvec {

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct VehicleState {
  int id = 0;
  Position3D position;
  double speed = 0.0;  // m/s along +x
};

// Straight road parallel to the x axis. The RIS is a uniform linear array
// along x facing the road (broadside normal is -y).
struct ScenarioLayout {
  Position3D bs{0.0, 0.0, 25.0};
  Position3D ris{250.0, 220.0, 25.0};
  double road_start_x = 0.0;
  double road_end_x = 500.0;
  double road_y = 200.0;
  double vehicle_antenna_z = 1.5;
  int num_vehicles = 8;
  double speed_min = 10.0;
  double speed_max = 15.0;

  double road_length() const { return road_end_x - road_start_x; }
  void validate() const;
};

double distance(const Position3D& a, const Position3D& b);

// Sine of the horizontal angle between p->ris and the RIS broadside normal,
// i.e. dx / horizontal distance. Throws when p is horizontally coincident
// with the RIS.
double sin_angle_to_ris(const Position3D& p, const Position3D& ris);

double sample_speed(const ScenarioLayout& layout, Rng& rng);

// Uniform positions on the road, uniform speeds in [speed_min, speed_max].
std::vector<VehicleState> spawn_vehicles(const ScenarioLayout& layout, Rng& rng);

// Constant-velocity step. A vehicle leaving the road re-enters at
// road_start_x with a freshly drawn speed, so the count stays K.
std::vector<VehicleState> advance_vehicles(std::vector<VehicleState> states, double dt,
                                           const ScenarioLayout& layout, Rng& rng);

}  // namespace risvec
