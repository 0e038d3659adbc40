#pragma once
// The three hard-coded target groups: PSL(2,R), PSL(2,C), and SL(3,R) acting
// through the principal (symmetric-square) embedding. Flags, tripods as group
// elements, circle maps, and the tripod-anchored metrics d_tau on flags.

#include <algorithm>
#include <array>
#include <optional>
#include <string>

#include "tripods/halfplane.hpp"

namespace tri {

enum class ModelKind { PSL2R, PSL2C, SL3R };

struct EmptyGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Psl2r {
  using S = double;
  static constexpr int N = 2;
  static constexpr ModelKind kind = ModelKind::PSL2R;
  static constexpr const char* name = "psl2r";
};
struct Psl2c {
  using S = cplx;
  static constexpr int N = 2;
  static constexpr ModelKind kind = ModelKind::PSL2C;
  static constexpr const char* name = "psl2c";
};
struct Sl3r {
  using S = double;
  static constexpr int N = 3;
  static constexpr ModelKind kind = ModelKind::SL3R;
  static constexpr const char* name = "sl3r";
};

template <class M>
using GMat = Eigen::Matrix<typename M::S, M::N, M::N>;
template <class M>
using GVec = Eigen::Matrix<typename M::S, M::N, 1>;

// embedding of SL2(R): identity, complexification, or symmetric square
template <class M>
GMat<M> xi(const Eigen::Matrix2d& h) {
  if constexpr (M::kind == ModelKind::SL3R) {
    double p = h(0, 0), q = h(0, 1), r = h(1, 0), s = h(1, 1);
    GMat<M> m;
    m << p * p, p * q, q * q,            //
        2 * p * r, p * s + q * r, 2 * q * s,  //
        r * r, r * s, s * s;
    return m;
  } else {
    return h.cast<typename M::S>();
  }
}

// the principal sl2 triple: [a,x] = 2x, [a,y] = -2y, [x,y] = a
template <class M>
GMat<M> model_a0() {
  GMat<M> m;
  if constexpr (M::N == 2)
    m << 1, 0, 0, -1;
  else
    m = Eigen::Vector3d(2, 0, -2).asDiagonal();
  return m;
}
template <class M>
GMat<M> model_x0() {
  GMat<M> m;
  if constexpr (M::N == 2)
    m << 0, 1, 0, 0;
  else
    m << 0, 1, 0, 0, 0, 2, 0, 0, 0;
  return m;
}
template <class M>
GMat<M> model_y0() {
  GMat<M> m;
  if constexpr (M::N == 2)
    m << 0, 0, 1, 0;
  else
    m << 0, 0, 0, 2, 0, 0, 0, 1, 0;
  return m;
}

// reflexion: an involution conjugating (a, x, y) to (a, -x, -y); only the
// complex model carries one that commutes with the compact part
template <class M>
std::optional<GMat<M>> reflexion() {
  if constexpr (M::kind == ModelKind::PSL2C) {
    GMat<M> m;
    m << cplx(0, 1), cplx(0, 0), cplx(0, 0), cplx(0, -1);
    return m;
  } else {
    return std::nullopt;
  }
}

template <class M>
struct Flag {
  static constexpr int C = (M::N == 3) ? 2 : 1;
  Eigen::Matrix<typename M::S, M::N, C> f;  // col 0 spans the line; cols span the plane

  Flag() {
    f.setZero();
    f(0, 0) = 1;
    if constexpr (C == 2) f(1, 1) = 1;
  }
  explicit Flag(const Eigen::Matrix<typename M::S, M::N, C>& m) : f(m) { orthonormalize(); }

  void orthonormalize() {
    using S = typename M::S;
    auto phase_fix = [](Eigen::Matrix<S, M::N, 1>& c) {
      int lead = 0;
      for (int i = 1; i < M::N; ++i)
        if (std::abs(c(i)) > std::abs(c(lead))) lead = i;
      c *= conj_s(c(lead)) / std::abs(c(lead));
    };
    Eigen::Matrix<S, M::N, 1> c0 = f.col(0);
    double n0 = c0.norm();
    if (!(n0 > 1e-300)) throw DegenerateConfiguration("flag: zero line");
    c0 /= n0;
    phase_fix(c0);
    f.col(0) = c0;
    if constexpr (C == 2) {
      Eigen::Matrix<S, M::N, 1> c1 = f.col(1);
      c1 -= c0 * (c0.adjoint() * c1)(0);
      double n1 = c1.norm();
      if (!(n1 > 1e-10)) throw DegenerateConfiguration("flag: line not inside plane");
      c1 /= n1;
      phase_fix(c1);
      f.col(1) = c1;
    }
  }
};

// sine of the projective angle between unit vectors, via the rejection norm
// (stable near zero, where 1 - |<a,b>|^2 loses all precision)
template <class V>
double sin_angle(const V& a, const V& b) {
  auto c = (a.adjoint() * b)(0);
  return std::min(1.0, (b - a * c).norm());
}

// coordinate-frame distance between flags (used for equality, not for d_tau)
template <class M>
double flag_dist(const Flag<M>& u, const Flag<M>& v) {
  double line = sin_angle(u.f.col(0), v.f.col(0));
  if constexpr (M::N == 3) {
    Eigen::Vector3d nu = u.f.col(0).cross(u.f.col(1)), nv = v.f.col(0).cross(v.f.col(1));
    nu.normalize();
    nv.normalize();
    return std::max(line, sin_angle(nu, nv));
  }
  return line;
}

template <class M>
struct GTripod {
  GMat<M> g;  // det-normalized; for N = 2 the sign is quotiented out

  GTripod() { g.setIdentity(); }
  explicit GTripod(const GMat<M>& m) : g(m) { normalize(); }

  void normalize() {
    typename M::S det = g.determinant();
    if (std::abs(det) < 1e-300) throw DegenerateConfiguration("tripod: singular matrix");
    if constexpr (M::N == 2) {
      if constexpr (std::is_floating_point_v<typename M::S>) {
        if (det < 0) throw DegenerateConfiguration("tripod: negative determinant");
        g /= std::sqrt(det);
      } else {
        g /= std::sqrt(det);
      }
    } else {
      g /= std::cbrt(det);
    }
  }
};

template <class M>
bool approx_equal(const GTripod<M>& a, const GTripod<M>& b, double tol = kTol) {
  if constexpr (M::N == 2)
    return std::min((a.g - b.g).norm(), (a.g + b.g).norm()) <= tol;
  else
    return (a.g - b.g).norm() <= tol;
}

// flag of the base tripod at a boundary point (Veronese data for SL3)
template <class M>
Flag<M> base_flag(const BndR& x) {
  using S = typename M::S;
  Flag<M> out;
  if constexpr (M::N == 2) {
    out.f = x.v.cast<S>();
    out.orthonormalize();
  } else {
    double u = x.v(0), w = x.v(1);
    Eigen::Matrix<double, 3, 2> m;
    m.col(0) = Eigen::Vector3d(u * u, 2 * u * w, w * w);
    m.col(1) = (std::abs(w) <= std::abs(u)) ? Eigen::Vector3d(0, u, w) : Eigen::Vector3d(u, w, 0);
    out = Flag<M>(m);
  }
  return out;
}

template <class M>
Flag<M> act(const GMat<M>& g, const Flag<M>& u) {
  return Flag<M>(Eigen::Matrix<typename M::S, M::N, Flag<M>::C>(g * u.f));
}

template <class M>
GTripod<M> act(const GMat<M>& g, const GTripod<M>& t) {
  return GTripod<M>(GMat<M>(g * t.g));
}

// the unique equivariant extension of (0, inf, 1) -> vertices of tau
template <class M>
Flag<M> circle_map(const GTripod<M>& t, const BndR& x) {
  return act<M>(t.g, base_flag<M>(x));
}

template <class M>
Flag<M> vminus(const GTripod<M>& t) {
  return circle_map(t, BndR::of(0));
}
template <class M>
Flag<M> vplus(const GTripod<M>& t) {
  return circle_map(t, BndR::infinity());
}
template <class M>
Flag<M> vzero(const GTripod<M>& t) {
  return circle_map(t, BndR::of(1));
}

// boundary point x with circle_map(tau, x) = u, if u lies on tau's circle
template <class M>
std::optional<BndR> circle_preimage(const GTripod<M>& t, const Flag<M>& u, double tol = 1e-8) {
  GMat<M> gi = t.g.inverse();
  GVec<M> w = gi * u.f.col(0);
  std::optional<BndR> cand;
  if constexpr (M::N == 2) {
    int lead = std::abs(w(0)) >= std::abs(w(1)) ? 0 : 1;
    w *= conj_s(w(lead)) / std::abs(w(lead));
    if constexpr (M::kind == ModelKind::PSL2C) {
      if (std::abs(w(0).imag()) > tol || std::abs(w(1).imag()) > tol) return std::nullopt;
      cand = BndR(w(0).real(), w(1).real());
    } else {
      cand = BndR(w(0), w(1));
    }
  } else {
    w /= w.norm();
    // Veronese line (u^2, 2uv, v^2): recover [u : v] from consecutive entries
    double A = w(0), B = w(1) / 2, Cc = w(2);
    if (std::abs(B * B - A * Cc) > tol) return std::nullopt;
    cand = (std::abs(A) >= std::abs(Cc)) ? BndR(A, B) : BndR(B, Cc);
  }
  if (flag_dist(circle_map(t, *cand), u) > tol) return std::nullopt;
  return cand;
}

// d_tau: metric on flags anchored at the symmetric-space point of tau
template <class M>
double tripod_metric(const GTripod<M>& t, const Flag<M>& u, const Flag<M>& v) {
  using S = typename M::S;
  if ((u.f - v.f).squaredNorm() == 0) return 0;
  GMat<M> gi = t.g.inverse();
  if constexpr (M::N == 2) {
    Eigen::Matrix<S, 2, 1> a = gi * u.f.col(0), b = gi * v.f.col(0);
    a /= a.norm();
    b /= b.norm();
    double c = std::abs((a.adjoint() * b)(0));
    return 2 * std::atan2(sin_angle(a, b), std::min(c, 1.0));
  } else {
    const Eigen::Vector3d q(1, 0.5, 1), qi(1, 2, 1);
    auto ang = [](Eigen::Vector3d x, Eigen::Vector3d y, const Eigen::Vector3d& w) {
      Eigen::Vector3d wx = w.asDiagonal() * x, wy = w.asDiagonal() * y;
      x /= std::sqrt(x.dot(wx));
      y /= std::sqrt(y.dot(wy));
      double c = x.dot(w.asDiagonal() * y);
      Eigen::Vector3d r = y - x * c;  // rejection in the w-weighted inner product
      double s = std::min(1.0, std::sqrt(r.dot(w.asDiagonal() * r)));
      return std::atan2(s, std::min(std::abs(c), 1.0));
    };
    Eigen::Vector3d a = gi * u.f.col(0), b = gi * v.f.col(0);
    double line = ang(a, b, q);
    // planes compare through their normals in the dual metric
    Eigen::Matrix<double, 3, 2> uf = gi * u.f, vf = gi * v.f;
    Eigen::Vector3d nu = uf.col(0).cross(uf.col(1)), nv = vf.col(0).cross(vf.col(1));
    double plane = ang(nu, nv, qi);
    return 2 * std::max(line, plane);  // factor calibrated so the base pair (0, inf) is at pi
  }
}

// attracting flag of exp(t Z) as t -> +infinity: dominant eigenvector chain
template <class M>
Flag<M> attracting_flag(const GMat<M>& z) {
  using S = typename M::S;
  Eigen::Matrix<cplx, M::N, M::N> zc = z.template cast<cplx>();
  Eigen::ComplexEigenSolver<Eigen::Matrix<cplx, M::N, M::N>> es(zc);
  std::array<int, M::N> idx;
  for (int i = 0; i < M::N; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    return es.eigenvalues()(i).real() > es.eigenvalues()(j).real();
  });
  Eigen::Matrix<S, M::N, Flag<M>::C> m;
  for (int c = 0; c < Flag<M>::C; ++c) {
    Eigen::Matrix<cplx, M::N, 1> v = es.eigenvectors().col(idx[c]);
    int lead = 0;
    for (int i = 1; i < M::N; ++i)
      if (std::abs(v(i)) > std::abs(v(lead))) lead = i;
    v *= std::conj(v(lead)) / std::abs(v(lead));
    if constexpr (std::is_floating_point_v<S>)
      m.col(c) = v.real();
    else
      m.col(c) = v;
  }
  return Flag<M>(m);
}

// vertices must be the attracting points of -a, a, a + 2y of the conjugated triple
template <class M>
bool tripod_valid(const GTripod<M>& t, double tol = 1e-8) {
  GMat<M> gi = t.g.inverse();
  GMat<M> a = t.g * model_a0<M>() * gi, y = t.g * model_y0<M>() * gi;
  return flag_dist(attracting_flag<M>(GMat<M>(-a)), vminus(t)) <= tol &&
         flag_dist(attracting_flag<M>(a), vplus(t)) <= tol &&
         flag_dist(attracting_flag<M>(GMat<M>(a + 2 * y)), vzero(t)) <= tol;
}

// right multiplications: shear flow and the tripod symmetries
inline Eigen::Matrix2d sl2_shear(double s) {
  Eigen::Matrix2d m;
  m << std::exp(s), 0, 0, std::exp(-s);
  return m;
}
inline Eigen::Matrix2d sl2_omega() {
  Eigen::Matrix2d m;
  m << 1, -1, 1, 0;
  return m;
}
inline Eigen::Matrix2d sl2_sigma() {
  Eigen::Matrix2d m;
  m << 0, -1, 1, 0;
  return m;
}

template <class M>
GTripod<M> shear(const GTripod<M>& t, double s) {
  return GTripod<M>(GMat<M>(t.g * xi<M>(sl2_shear(s))));
}
template <class M>
GTripod<M> omega_map(const GTripod<M>& t) {
  return GTripod<M>(GMat<M>(t.g * xi<M>(sl2_omega())));
}
template <class M>
GTripod<M> bar(const GTripod<M>& t) {  // sigma: reverses the circle orientation
  return GTripod<M>(GMat<M>(t.g * xi<M>(sl2_sigma())));
}
template <class M>
GTripod<M> k_map(const GTripod<M>& t) {  // omega after bar; fixes the repelling vertex
  return GTripod<M>(GMat<M>(t.g * xi<M>(Eigen::Matrix2d(sl2_sigma() * sl2_omega()))));
}

// plane tripod -> the SL2(R) element carrying (0, inf, 1) to it
Eigen::Matrix2d sl2_of_plane_tripod(const PlaneTripod& T);

template <class M>
GTripod<M> embed_tripod(const GTripod<M>& frame, const PlaneTripod& T) {
  return GTripod<M>(GMat<M>(frame.g * xi<M>(sl2_of_plane_tripod(T))));
}

ModelKind model_kind_of(const std::string& name);  // "psl2r" / "psl2c" / "sl3r"

// run a generic callable with the tag type of the named model
template <class F>
decltype(auto) with_model(ModelKind kind, F&& f) {
  switch (kind) {
    case ModelKind::PSL2R:
      return f(Psl2r{});
    case ModelKind::PSL2C:
      return f(Psl2c{});
    default:
      return f(Sl3r{});
  }
}

}  // namespace tri
