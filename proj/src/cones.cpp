#include "tripods/cones.hpp"

namespace tri {

std::pair<double, double> orbit_centers(const std::optional<std::array<BndR, 3>>& coords) {
  if (!coords) return {0.0, 0.0};
  const auto& [x, y, z] = *coords;
  Geodesic g0(BndR::of(0), BndR::infinity());
  Geodesic g1(x, y);
  PlaneTripod inner(x, y, z);
  // alternating projection onto the two axes converges to the closest pair
  cplx a = inner.s, b = geo_project(g0, a);
  for (int it = 0; it < 30; ++it) {
    a = geo_project(g1, b);
    b = geo_project(g0, a);
  }
  // orbit basepoints run along the axes at twice the shear parameter
  double c0 = 0.5 * std::log(std::abs(b));
  double c1 = 0.5 * geo_signed_dist(g1, inner.s, a);
  return {c0, c1};
}

std::vector<double> orbit_params(double center, double shift, int param_samples) {
  const double step = 0.25;
  int side = (param_samples - 1) / 2;
  double byshift = std::floor(shift / step + 0.5);
  if (byshift < side) side = static_cast<int>(byshift);
  if (side < 0) side = 0;
  std::vector<double> out;
  out.reserve(2 * side + 1);
  for (int j = -side; j <= side; ++j) out.push_back(center + step * j);
  return out;
}

}  // namespace tri
