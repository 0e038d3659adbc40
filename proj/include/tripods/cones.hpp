#pragma once
// Cones of flags around a tripod's middle vertex, chords (shear-flow orbits),
// nesting of cones, the shift between coplanar chords, and the squeezed /
// controlled quantifier predicates evaluated over finite samples.

#include <utility>
#include <vector>

#include "tripods/tripod_space.hpp"

namespace tri {

struct NotCoplanar : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class M>
struct Cone {
  GTripod<M> tau;
  double alpha;  // radius of the flag ball around the middle vertex

  Cone(const GTripod<M>& t, double a) : tau(t), alpha(a) {
    if (alpha < 0) throw std::invalid_argument("cone: negative radius");
  }
};

template <class M>
bool cone_contains(const Cone<M>& c, const Flag<M>& u) {
  return tripod_metric(c.tau, vzero(c.tau), u) <= c.alpha;
}

// chord: the full shear-flow orbit of a generating tripod
template <class M>
struct ChordG {
  GTripod<M> tau;
  Flag<M> minus, plus;  // endpoints, shared by every tripod of the orbit

  explicit ChordG(const GTripod<M>& t) : tau(t), minus(vminus(t)), plus(vplus(t)) {}
  GTripod<M> at(double t) const { return shear(tau, t); }
};

// both cone conditions of nesting, checked over the grid points that fall in
// the inner cone: containment C_alpha(t1) within C_{kappa alpha}(t0), and the
// kappa-Lipschitz comparison of the two metrics there
template <class M>
bool nested_check(const GTripod<M>& t0, const GTripod<M>& t1, double alpha, double kappa,
                  const std::vector<Flag<M>>& grid) {
  if (!(alpha > 0) || !(kappa > 0))
    throw std::invalid_argument("nested_check: alpha and kappa must be positive");
  const double slack = 1e-9;
  Cone<M> inner(t1, alpha);
  Flag<M> z0 = vzero(t0);
  std::vector<const Flag<M>*> in;
  Flag<M> z1 = vzero(t1);
  in.push_back(&z1);
  for (const auto& u : grid)
    if (cone_contains(inner, u)) in.push_back(&u);
  for (const Flag<M>* u : in)
    if (tripod_metric(t0, z0, *u) > kappa * alpha + slack) return false;
  // cap the pair count so dense grids stay affordable
  size_t stride = in.size() > 64 ? (in.size() + 63) / 64 : 1;
  for (size_t i = 0; i < in.size(); i += stride)
    for (size_t j = i + stride; j < in.size(); j += stride) {
      double d1 = tripod_metric(t1, *in[i], *in[j]);
      double d0 = tripod_metric(t0, *in[i], *in[j]);
      if (d0 > kappa * d1 + slack) return false;
    }
  return true;
}

// boundary coordinates of the second chord's vertices on the first chord's
// circle, when the two chords share one
template <class M>
std::optional<std::array<BndR, 3>> common_plane_coords(const ChordG<M>& H0, const ChordG<M>& H1,
                                                       double tol = 1e-8) {
  auto x = circle_preimage(H0.tau, vminus(H1.tau), tol);
  auto y = circle_preimage(H0.tau, vplus(H1.tau), tol);
  auto z = circle_preimage(H0.tau, vzero(H1.tau), tol);
  if (!x || !y || !z) return std::nullopt;
  return std::array<BndR, 3>{*x, *y, *z};
}

// infimum of the distance between the two orbits, realized at the common
// perpendicular: the hyperbolic distance between the axes in the shared plane
template <class M>
double chord_shift(const ChordG<M>& H0, const ChordG<M>& H1) {
  auto c = common_plane_coords(H0, H1);
  if (!c) throw NotCoplanar("chord_shift: chords do not share a circle");
  return geo_distance(Geodesic(BndR::of(0), BndR::infinity()), Geodesic((*c)[0], (*c)[1]));
}

// orbit parameters of the closest-approach points of two coplanar chords;
// (0, 0) when no shared circle exists
std::pair<double, double> orbit_centers(const std::optional<std::array<BndR, 3>>& coords);

// uniform 0.25-step samples centered at a chord's closest approach; the window
// half-width follows the shift between the chords, capped at param_samples
std::vector<double> orbit_params(double center, double shift, int param_samples);

template <class M>
std::pair<std::vector<double>, std::vector<double>> orbit_sample_params(const ChordG<M>& H0,
                                                                        const ChordG<M>& H1,
                                                                        int param_samples) {
  auto coords = common_plane_coords(H0, H1);
  auto [c0, c1] = orbit_centers(coords);
  double shift = coords ? geo_distance(Geodesic(BndR::of(0), BndR::infinity()),
                                       Geodesic((*coords)[0], (*coords)[1]))
                        : 1e9;  // no shared plane: fall back to the full window
  return {orbit_params(c0, shift, param_samples), orbit_params(c1, shift, param_samples)};
}

// exists t0 on H0 nesting against every sampled t1 on H1 (the commanding tripod)
template <class M>
bool squeezed_check(const ChordG<M>& H0, const ChordG<M>& H1, double alpha, double k,
                    const std::vector<Flag<M>>& grid, int param_samples) {
  auto [p0, p1] = orbit_sample_params(H0, H1, param_samples);
  for (double t : p0) {
    GTripod<M> t0 = H0.at(t);
    bool all = true;
    for (size_t j = 0; j < p1.size() && all; ++j)
      all = nested_check(t0, H1.at(p1[j]), alpha, k, grid);
    if (all) return true;
  }
  return false;
}

// every sampled t1 on H1 admits some nesting t0 on H0
template <class M>
bool controlled_check(const ChordG<M>& H0, const ChordG<M>& H1, double alpha, double k,
                      const std::vector<Flag<M>>& grid, int param_samples) {
  auto [p0, p1] = orbit_sample_params(H0, H1, param_samples);
  for (double s : p1) {
    GTripod<M> t1 = H1.at(s);
    bool found = false;
    for (size_t i = 0; i < p0.size() && !found; ++i)
      found = nested_check(H0.at(p0[i]), t1, alpha, k, grid);
    if (!found) return false;
  }
  return true;
}

struct ContractionEstimate {
  double k_hat = 0;          // prefactor, ratio bounded by k_hat / 4 at separation 0
  double c_hat = 0;          // decay exponent
  double max_residual = 0;   // worst log-scale misfit of the regression
};

// worst contraction ratio d_{t0} / d_{t1} over flag pairs near the middle
// vertex of t1 = shear(t0, t)
template <class M>
double cone_ratio(double t, int flags_per_cone = 8) {
  GTripod<M> t0;
  GTripod<M> t1 = shear(t0, t);
  std::vector<Flag<M>> u;
  for (int j = 0; j < flags_per_cone; ++j) {
    double th = -0.35 + 0.7 * j / (flags_per_cone - 1.0);     // visual offset from the vertex
    u.push_back(circle_map(t1, BndR::of(-1.0 / std::tan((th - kPi / 2) / 2))));
  }
  double worst = 0;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j) {
      double d1 = tripod_metric(t1, u[i], u[j]);
      if (d1 < 1e-12) continue;
      worst = std::max(worst, tripod_metric(t0, u[i], u[j]) / d1);
    }
  return worst;
}

// log-linear fit of cone_ratio against separation: the exponent comes from
// least squares, the prefactor is the upper envelope (k_hat/4) e^{-c_hat d}
// that dominates every sample; ratios at separation zero force k_hat >= 4
template <class M>
ContractionEstimate contraction_estimate(const std::vector<double>& separations) {
  if (separations.size() < 3)
    throw InsufficientData("contraction_estimate: need at least 3 separations");
  double lo = *std::min_element(separations.begin(), separations.end());
  double hi = *std::max_element(separations.begin(), separations.end());
  if (hi - lo < 1.0)
    throw InsufficientData("contraction_estimate: separation span below 1");
  Eigen::MatrixX2d A(separations.size(), 2);
  Eigen::VectorXd b(separations.size());
  GTripod<M> base;
  for (size_t i = 0; i < separations.size(); ++i) {
    double d = tripod_space_dist(base, shear(base, separations[i]));
    A(i, 0) = 1;
    A(i, 1) = -d;
    b(i) = std::log(cone_ratio<M>(separations[i]));
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  ContractionEstimate out;
  out.c_hat = coef(1);
  double intercept = coef(0);
  for (int i = 0; i < b.size(); ++i) intercept = std::max(intercept, b(i) - A(i, 1) * out.c_hat);
  out.k_hat = std::max(4 * std::exp(intercept), 4.0);
  out.max_residual = (A * coef - b).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace tri
