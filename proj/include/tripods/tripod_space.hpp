#pragma once
// Metric on the space of tripods (left-invariant matrix-log norm, normalized
// so the shear flow has unit speed), deterministic flag grids, and the
// grid-sup metric d_tau on group elements.

#include <vector>

#include "tripods/models.hpp"

namespace tri {

// distance between tripods of one model; left-invariant, shear flow is unit
// speed; uses the principal matrix log, so it is exact on shear orbits and
// symmetric for nearby pairs, but only approximate across branch cuts
template <class M>
double tripod_space_dist(const GTripod<M>& a, const GTripod<M>& b);

// deterministic low-discrepancy grid of n flags (whole flag manifold)
template <class M>
std::vector<Flag<M>> flag_grid(int n);

// sup over the grid of d_tau(a(u), u): the induced sup metric on group
// elements, reported as a lower bound of the true sup
template <class M>
double group_metric(const GTripod<M>& t, const GMat<M>& a, const std::vector<Flag<M>>& grid) {
  if (grid.empty()) throw EmptyGrid("group_metric: empty flag grid");
  double best = 0;
  for (const auto& u : grid) best = std::max(best, tripod_metric(t, act<M>(a, u), u));
  return best;
}

double halton(int index, int base);

}  // namespace tri
