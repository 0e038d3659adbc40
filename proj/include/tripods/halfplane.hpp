#pragma once
// Upper half-plane substrate: plane tripods (triples of boundary points with a
// cached basepoint), geodesics, the visual metric seen from a tripod, the
// shear flow, and the three tripod symmetries.

#include "tripods/moebius.hpp"

namespace tri {

using BndR = BoundaryPoint<double>;
using MobR = MoebiusMap<double>;

struct Geodesic {
  BndR a, b;  // oriented from a to b
  Geodesic(const BndR& a_, const BndR& b_) : a(a_), b(b_) {
    if (proj_dist(a, b) <= 1e-13) throw DegenerateConfiguration("geodesic: equal endpoints");
  }
};

struct PlaneTripod {
  BndR tm, tp, tz;  // t_minus, t_plus, t_zero
  cplx s;           // basepoint: orthogonal projection of tz onto geodesic (tm, tp)

  PlaneTripod(const BndR& m, const BndR& p, const BndR& z);
  static PlaneTripod base() { return PlaneTripod(BndR::of(0), BndR::infinity(), BndR::of(1)); }
};

enum class Sym { omega, sigma, K };

double h2_distance(cplx p, cplx q);
MobR to_standard(const BndR& a, const BndR& b);  // carries (a, b) to (0, infinity)
cplx geo_project(const Geodesic& g, cplx p);            // foot of perpendicular from p
cplx geo_project_bnd(const Geodesic& g, const BndR& x); // same, from a boundary point
bool geo_cross(const Geodesic& g, const Geodesic& h);   // endpoints linked on the circle
double geo_distance(const Geodesic& g, const Geodesic& h);  // 0 if they meet
// signed arclength from `from` to `to`, both on g, positive in the a->b direction
double geo_signed_dist(const Geodesic& g, cplx from, cplx to);
cplx geo_walk(const Geodesic& g, cplx from, double t);  // walk distance t along g

double visual_distance(const PlaneTripod& T, const BndR& x, const BndR& y);
PlaneTripod shear_flow(const PlaneTripod& T, double s);
PlaneTripod symmetry(const PlaneTripod& T, Sym which);

inline PlaneTripod moebius_apply(const MobR& g, const PlaneTripod& T) {
  return PlaneTripod(moebius_apply(g, T.tm), moebius_apply(g, T.tp), moebius_apply(g, T.tz));
}
inline bool approx_equal(const PlaneTripod& a, const PlaneTripod& b, double tol = kTol) {
  return proj_dist(a.tm, b.tm) <= tol && proj_dist(a.tp, b.tp) <= tol &&
         proj_dist(a.tz, b.tz) <= tol;
}

// frame at interior point p: unique g with g(i) = p, g'(i) in the direction of
// the unit tangent making angle `theta` with the upward vertical at p
MobR frame_at(cplx p, double theta = 0);
MobR half_turn(cplx p);                         // rotation by pi about p
MobR translation_along(const Geodesic& g, double t);  // axis g, length t, toward b
Eigen::Matrix2d reflection_matrix(const Geodesic& g); // det -1; acts as z -> A(conj z)
cplx anti_apply(const Eigen::Matrix2d& A, cplx z);    // z -> A(conj z)
BndR anti_apply_bnd(const Eigen::Matrix2d& A, const BndR& x);

}  // namespace tri
