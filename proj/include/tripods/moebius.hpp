#pragma once
// Projective line arithmetic: Moebius maps as det-normalized 2x2 matrices up
// to sign, boundary points as normalized projective pairs (no affine special
// case for infinity).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace tri {

using cplx = std::complex<double>;

inline constexpr double kTol = 1e-10;  // default comparison tolerance
inline constexpr double kPi = 3.14159265358979323846;

struct DegenerateConfiguration : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotInteriorPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double conj_s(double x) { return x; }
inline cplx conj_s(const cplx& z) { return std::conj(z); }

template <class S>
struct BoundaryPoint {
  Eigen::Matrix<S, 2, 1> v;  // canonical: unit norm, leading component made positive (real part)

  BoundaryPoint() : v(S(0), S(1)) {}
  BoundaryPoint(S u, S w) : v(u, w) { canonicalize(); }
  explicit BoundaryPoint(const Eigen::Matrix<S, 2, 1>& h) : v(h) { canonicalize(); }

  static BoundaryPoint of(S value) { return BoundaryPoint(value, S(1)); }
  static BoundaryPoint infinity() { return BoundaryPoint(S(1), S(0)); }

  void canonicalize() {
    double n = v.norm();
    if (!(n > 0)) throw DegenerateConfiguration("boundary point: zero vector");
    v /= n;
    // rotate/sign so the component of largest modulus is positive real
    S lead = std::abs(v(0)) >= std::abs(v(1)) ? v(0) : v(1);
    v *= conj_s(lead) / std::abs(lead);
  }

  bool is_infinity(double tol = 1e-12) const { return std::abs(v(1)) <= tol; }
  S value() const { return v(0) / v(1); }  // affine coordinate; huge near infinity
};

// 2x2 "determinant" pairing; vanishes iff projectively equal
template <class S>
S det2(const BoundaryPoint<S>& p, const BoundaryPoint<S>& q) {
  return p.v(0) * q.v(1) - p.v(1) * q.v(0);
}

template <class S>
double proj_dist(const BoundaryPoint<S>& p, const BoundaryPoint<S>& q) {
  return std::abs(det2(p, q));  // sine of the angle between the lines
}

template <class S>
bool approx_equal(const BoundaryPoint<S>& p, const BoundaryPoint<S>& q, double tol = 1e-12) {
  return proj_dist(p, q) <= tol;
}

template <class S>
struct MoebiusMap {
  Eigen::Matrix<S, 2, 2> m;  // det == 1 after normalization; m and -m identified

  MoebiusMap() { m.setIdentity(); }
  explicit MoebiusMap(const Eigen::Matrix<S, 2, 2>& a) : m(a) { normalize(); }
  MoebiusMap(S a, S b, S c, S d) {
    m << a, b, c, d;
    normalize();
  }

  static MoebiusMap id() { return MoebiusMap(); }

  void normalize() {
    S det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (std::abs(det) < 1e-300) throw DegenerateConfiguration("moebius map: singular matrix");
    if constexpr (std::is_floating_point_v<S>) {
      if (det < 0) throw DegenerateConfiguration("moebius map: negative determinant");
    }
    m /= std::sqrt(det);  // complex sqrt picks a branch; both branches identified anyway
  }

  MoebiusMap inverse() const {
    Eigen::Matrix<S, 2, 2> inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    MoebiusMap r;
    r.m = inv;  // already det 1
    return r;
  }
};

template <class S>
MoebiusMap<S> operator*(const MoebiusMap<S>& g, const MoebiusMap<S>& h) {
  MoebiusMap<S> r;
  r.m = g.m * h.m;
  return r;
}

template <class S>
bool approx_equal(const MoebiusMap<S>& g, const MoebiusMap<S>& h, double tol = kTol) {
  return std::min((g.m - h.m).norm(), (g.m + h.m).norm()) <= tol;
}

template <class S>
BoundaryPoint<S> moebius_apply(const MoebiusMap<S>& g, const BoundaryPoint<S>& x) {
  return BoundaryPoint<S>(Eigen::Matrix<S, 2, 1>(g.m * x.v));
}

// action on interior points of the upper half plane (real coefficients act on C)
inline cplx moebius_apply(const MoebiusMap<double>& g, cplx z) {
  return (g.m(0, 0) * z + g.m(0, 1)) / (g.m(1, 0) * z + g.m(1, 1));
}

// Convention: cross_ratio(0, infinity, 1, t) = t, harmonic quadruples map to -1.
template <class S>
S cross_ratio(const BoundaryPoint<S>& x, const BoundaryPoint<S>& y, const BoundaryPoint<S>& z,
              const BoundaryPoint<S>& t) {
  int coincident = 0;
  const BoundaryPoint<S>* pts[4] = {&x, &y, &z, &t};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (proj_dist(*pts[i], *pts[j]) <= 1e-14) ++coincident;
  if (coincident > 1) throw DegenerateConfiguration("cross_ratio: more than one coincidence");
  return (det2(x, t) * det2(y, z)) / (det2(x, z) * det2(y, t));
}

// harmonic conjugate h of z with respect to (x, y): cross_ratio(x, y, z, h) = -1
template <class S>
BoundaryPoint<S> harmonic_conjugate(const BoundaryPoint<S>& x, const BoundaryPoint<S>& y,
                                    const BoundaryPoint<S>& z) {
  if (proj_dist(x, y) <= 1e-14 || proj_dist(x, z) <= 1e-14 || proj_dist(y, z) <= 1e-14)
    throw DegenerateConfiguration("harmonic_conjugate: coincident points");
  S dyz = det2(y, z), dxz = det2(x, z);
  return BoundaryPoint<S>(Eigen::Matrix<S, 2, 1>(x.v(0) * dyz + y.v(0) * dxz,
                                                 x.v(1) * dyz + y.v(1) * dxz));
}

}  // namespace tri
