#include "tripods/tripod_space.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace tri {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

template <class M>
double tripod_space_dist(const GTripod<M>& a, const GTripod<M>& b) {
  constexpr int N = M::N;
  GMat<M> n = a.g.inverse() * b.g;
  if constexpr (N == 2) {
    // pick the lift closer to the identity so the log stays principal
    if (std::real(n.trace()) < 0) n = -n;
  }
  Eigen::Matrix<cplx, N, N> L = n.template cast<cplx>().log();
  static const double a0_norm = model_a0<M>().norm();
  return L.norm() / a0_norm;
}

template double tripod_space_dist<Psl2r>(const GTripod<Psl2r>&, const GTripod<Psl2r>&);
template double tripod_space_dist<Psl2c>(const GTripod<Psl2c>&, const GTripod<Psl2c>&);
template double tripod_space_dist<Sl3r>(const GTripod<Sl3r>&, const GTripod<Sl3r>&);

template <>
std::vector<Flag<Psl2r>> flag_grid<Psl2r>(int n) {
  std::vector<Flag<Psl2r>> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    double th = kPi * (k + 0.5) / n;  // projective line: angles mod pi
    Eigen::Vector2d v(std::cos(th), std::sin(th));
    out.emplace_back((Eigen::Matrix<double, 2, 1>(v)));
  }
  return out;
}

template <>
std::vector<Flag<Psl2c>> flag_grid<Psl2c>(int n) {
  // Fibonacci lattice on the round sphere, pulled back through the Hopf chart
  // (x, y, z) -> [x + iy : 1 - z]
  std::vector<Flag<Psl2c>> out;
  out.reserve(n);
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double ph = ga * k;
    Eigen::Vector2cd v(cplx(r * std::cos(ph), r * std::sin(ph)), cplx(1.0 - z, 0.0));
    out.emplace_back((Eigen::Matrix<cplx, 2, 1>(v)));
  }
  return out;
}

template <>
std::vector<Flag<Sl3r>> flag_grid<Sl3r>(int n) {
  // Halton-driven uniform rotations (Shoemake's subgroup method); each
  // rotation moves the base frame to a full flag (line inside plane).
  std::vector<Flag<Sl3r>> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    double u1 = halton(k + 1, 2), u2 = halton(k + 1, 3), u3 = halton(k + 1, 5);
    double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    double a = 2.0 * kPi * u2, b = 2.0 * kPi * u3;
    double qx = s1 * std::sin(a), qy = s1 * std::cos(a), qz = s2 * std::sin(b), qw = s2 * std::cos(b);
    Eigen::Quaterniond q(qw, qx, qy, qz);
    Eigen::Matrix3d R = q.normalized().toRotationMatrix();
    Eigen::Matrix<double, 3, 2> cols;
    cols.col(0) = R.col(0);
    cols.col(1) = R.col(1);
    out.emplace_back(cols);
  }
  return out;
}

}  // namespace tri
