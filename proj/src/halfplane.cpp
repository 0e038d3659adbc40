#include "tripods/halfplane.hpp"

namespace tri {

// matrix sending a -> 0, b -> infinity, with positive determinant
MobR to_standard(const BndR& a, const BndR& b) {
  Eigen::Matrix2d w;
  w << a.v(1), -a.v(0), b.v(1), -b.v(0);
  if (w.determinant() < 0) w.row(0) *= -1;
  return MobR(w);
}

PlaneTripod::PlaneTripod(const BndR& m, const BndR& p, const BndR& z) : tm(m), tp(p), tz(z) {
  if (proj_dist(tm, tp) <= 1e-10 || proj_dist(tm, tz) <= 1e-10 || proj_dist(tp, tz) <= 1e-10)
    throw DegenerateConfiguration("plane tripod: vertices not pairwise distinct");
  MobR w = to_standard(tm, tp);
  BndR u = moebius_apply(w, tz);
  s = moebius_apply(w.inverse(), cplx(0, std::abs(u.value())));
}

double h2_distance(cplx p, cplx q) {
  if (!(p.imag() > 0) || !(q.imag() > 0)) throw NotInteriorPoint("h2_distance: point not in H^2");
  double r = 1 + std::norm(p - q) / (2 * p.imag() * q.imag());
  return std::acosh(std::max(1.0, r));
}

cplx geo_project(const Geodesic& g, cplx p) {
  MobR w = to_standard(g.a, g.b);
  cplx z = moebius_apply(w, p);
  return moebius_apply(w.inverse(), cplx(0, std::abs(z)));
}

cplx geo_project_bnd(const Geodesic& g, const BndR& x) {
  if (proj_dist(x, g.a) <= 1e-13 || proj_dist(x, g.b) <= 1e-13)
    throw DegenerateConfiguration("geo_project_bnd: point is an endpoint of the geodesic");
  MobR w = to_standard(g.a, g.b);
  double t = moebius_apply(w, x).value();
  return moebius_apply(w.inverse(), cplx(0, std::abs(t)));
}

bool geo_cross(const Geodesic& g, const Geodesic& h) {
  if (proj_dist(g.a, h.a) <= 1e-13 || proj_dist(g.a, h.b) <= 1e-13 ||
      proj_dist(g.b, h.a) <= 1e-13 || proj_dist(g.b, h.b) <= 1e-13)
    return false;  // asymptotic, not transverse
  return cross_ratio(g.a, g.b, h.a, h.b) < 0;
}

double geo_distance(const Geodesic& g, const Geodesic& h) {
  if (proj_dist(g.a, h.a) <= 1e-13 || proj_dist(g.a, h.b) <= 1e-13 ||
      proj_dist(g.b, h.a) <= 1e-13 || proj_dist(g.b, h.b) <= 1e-13)
    return 0;
  double lam = cross_ratio(g.a, g.b, h.a, h.b);
  if (lam < 0) return 0;  // crossing
  if (lam > 1) lam = 1 / lam;
  return std::acosh(std::max(1.0, (1 + lam) / (1 - lam)));
}

double geo_signed_dist(const Geodesic& g, cplx from, cplx to) {
  MobR w = to_standard(g.a, g.b);
  return std::log(std::abs(moebius_apply(w, to)) / std::abs(moebius_apply(w, from)));
}

cplx geo_walk(const Geodesic& g, cplx from, double t) {
  MobR w = to_standard(g.a, g.b);
  return moebius_apply(w.inverse(), std::exp(t) * moebius_apply(w, from));
}

double visual_distance(const PlaneTripod& T, const BndR& x, const BndR& y) {
  cplx cx = (x.v(0) - T.s * x.v(1)) / (x.v(0) - std::conj(T.s) * x.v(1));
  cplx cy = (y.v(0) - T.s * y.v(1)) / (y.v(0) - std::conj(T.s) * y.v(1));
  return std::abs(std::arg(cx / cy));
}

PlaneTripod shear_flow(const PlaneTripod& T, double s) {
  MobR w = to_standard(T.tm, T.tp);
  MobR d(std::exp(s), 0, 0, std::exp(-s));
  return PlaneTripod(T.tm, T.tp, moebius_apply(w.inverse() * d * w, T.tz));
}

PlaneTripod symmetry(const PlaneTripod& T, Sym which) {
  switch (which) {
    case Sym::omega:
      return PlaneTripod(T.tp, T.tz, T.tm);
    case Sym::sigma:
      return PlaneTripod(T.tp, T.tm, harmonic_conjugate(T.tm, T.tp, T.tz));
    default:  // K = omega after sigma: fixes t_minus
      return PlaneTripod(T.tm, harmonic_conjugate(T.tm, T.tp, T.tz), T.tp);
  }
}

MobR frame_at(cplx p, double theta) {
  if (!(p.imag() > 0)) throw NotInteriorPoint("frame_at: point not in H^2");
  double ry = std::sqrt(p.imag());
  MobR t(ry, p.real() / ry, 0, 1 / ry);
  double c = std::cos(theta / 2), sn = std::sin(theta / 2);
  return t * MobR(c, sn, -sn, c);
}

MobR half_turn(cplx p) {
  MobR f = frame_at(p);
  return f * MobR(0, 1, -1, 0) * f.inverse();
}

MobR translation_along(const Geodesic& g, double t) {
  MobR w = to_standard(g.a, g.b);
  return w.inverse() * MobR(std::exp(t / 2), 0, 0, std::exp(-t / 2)) * w;
}

Eigen::Matrix2d reflection_matrix(const Geodesic& g) {
  MobR w = to_standard(g.a, g.b);
  Eigen::Matrix2d a0;
  a0 << -1, 0, 0, 1;
  return w.inverse().m * a0 * w.m;
}

cplx anti_apply(const Eigen::Matrix2d& A, cplx z) {
  cplx zc = std::conj(z);
  return (A(0, 0) * zc + A(0, 1)) / (A(1, 0) * zc + A(1, 1));
}

BndR anti_apply_bnd(const Eigen::Matrix2d& A, const BndR& x) {
  return BndR(Eigen::Vector2d(A * x.v));
}

}  // namespace tri
