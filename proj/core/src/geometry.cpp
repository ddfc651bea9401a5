#include "risvec/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace risvec {

void ScenarioLayout::validate() const {
  if (!(road_end_x > road_start_x)) throw std::invalid_argument("road_end_x must exceed road_start_x");
  if (num_vehicles < 1) throw std::invalid_argument("num_vehicles must be >= 1");
  if (!(speed_min > 0.0) || speed_max < speed_min)
    throw std::invalid_argument("speed range must satisfy 0 < speed_min <= speed_max");
  if (bs.z < 0.0 || ris.z < 0.0 || vehicle_antenna_z < 0.0)
    throw std::invalid_argument("heights must be non-negative");
}

double distance(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double sin_angle_to_ris(const Position3D& p, const Position3D& ris) {
  const double dx = p.x - ris.x;
  const double horizontal = std::hypot(dx, p.y - ris.y);
  if (horizontal == 0.0) throw std::invalid_argument("sin_angle_to_ris: point coincides with the RIS");
  return dx / horizontal;
}

double sample_speed(const ScenarioLayout& layout, Rng& rng) {
  std::uniform_real_distribution<double> speed(layout.speed_min, layout.speed_max);
  return speed(rng);
}

std::vector<VehicleState> spawn_vehicles(const ScenarioLayout& layout, Rng& rng) {
  std::uniform_real_distribution<double> along(layout.road_start_x, layout.road_end_x);
  std::vector<VehicleState> out;
  out.reserve(static_cast<std::size_t>(layout.num_vehicles));
  for (int k = 0; k < layout.num_vehicles; ++k) {
    VehicleState v;
    v.id = k;
    v.position = {along(rng), layout.road_y, layout.vehicle_antenna_z};
    v.speed = sample_speed(layout, rng);
    out.push_back(v);
  }
  return out;
}

std::vector<VehicleState> advance_vehicles(std::vector<VehicleState> states, double dt,
                                           const ScenarioLayout& layout, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_vehicles: dt must be positive");
  for (auto& v : states) {
    v.position.x += v.speed * dt;
    if (v.position.x > layout.road_end_x) {
      v.position.x = layout.road_start_x;
      v.speed = sample_speed(layout, rng);
    }
  }
  return states;
}

}  // namespace risvec
