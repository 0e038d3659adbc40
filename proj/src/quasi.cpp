#include "tripods/quasi.hpp"

#include <json.hpp>

namespace tri {

namespace {

// disk angle at z of the initial direction of the geodesic toward a boundary
// point: 0 points straight up, angles grow counterclockwise
double dir_angle(cplx z, const BndR& u) {
  if (u.is_infinity()) return 0;
  double uh = (u.value() - z.real()) / z.imag();
  return std::arg((uh - cplx(0, 1)) / (uh + cplx(0, 1)));
}

// same, toward an interior target
double dir_angle_pt(cplx z, cplx q) {
  cplx qh = (q - z.real()) / z.imag();
  return std::arg((qh - cplx(0, 1)) / (qh + cplx(0, 1)));
}

// boundary point reached from z in disk-angle direction ang
BndR bnd_at(cplx z, double ang) {
  double s = std::sin(ang / 2);
  if (std::abs(s) < 1e-13) return BndR::infinity();
  return BndR::of(z.real() - z.imag() * std::cos(ang / 2) / s);
}

// geodesic through two interior points, oriented from p toward q
Geodesic through(cplx p, cplx q) {
  double dx = q.real() - p.real();
  if (std::abs(dx) <= 1e-13 * (1 + std::abs(p) + std::abs(q))) {
    BndR lo = BndR::of(p.real()), hi = BndR::infinity();
    return q.imag() > p.imag() ? Geodesic(lo, hi) : Geodesic(hi, lo);
  }
  double c = (std::norm(q) - std::norm(p)) / (2 * dx);
  double r = std::abs(p - c);
  return dx > 0 ? Geodesic(BndR::of(c - r), BndR::of(c + r))
                : Geodesic(BndR::of(c + r), BndR::of(c - r));
}

// perpendicular geodesic at a point of an arc with forward direction phi,
// oriented by the left turn
Geodesic rung_at(cplx p, double phi) {
  return Geodesic(bnd_at(p, phi - kPi / 2), bnd_at(p, phi + kPi / 2));
}

// meeting point of the three arcs: the unit directions toward the basepoint
// and the two targets sum to zero there (pairwise angles of 2 pi / 3)
cplx fermat_point(cplx z0, const BndR& x1, const BndR& x2) {
  auto residual = [&](cplx Z) {
    return std::polar(1.0, dir_angle_pt(Z, z0)) + std::polar(1.0, dir_angle(Z, x1)) +
           std::polar(1.0, dir_angle(Z, x2));
  };
  cplx p = geo_project(Geodesic(x1, x2), z0);
  cplx Z = geo_walk(through(z0, p), z0, 0.6 * h2_distance(z0, p));
  for (int it = 0; it < 80; ++it) {
    cplx s = residual(Z);
    double r2 = std::norm(s);
    if (r2 < 1e-26) break;
    double hx = 1e-7 * Z.imag(), hb = 1e-7;
    cplx sa = (residual(Z + hx) - s) / hx;
    cplx sb = (residual(cplx(Z.real(), Z.imag() * std::exp(hb))) - s) / hb;
    Eigen::Matrix2d J;
    J << sa.real(), sb.real(), sa.imag(), sb.imag();
    Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(-s.real(), -s.imag()));
    double lam = 1;
    for (; lam > 1e-4; lam /= 2) {
      cplx Zn(Z.real() + lam * step(0), Z.imag() * std::exp(lam * step(1)));
      if (std::norm(residual(Zn)) < r2) {
        Z = Zn;
        break;
      }
    }
    if (lam <= 1e-4) break;
  }
  if (std::abs(residual(Z)) > 1e-9)
    throw std::runtime_error("fermat_point: direction balance did not converge");
  return Z;
}

// the two tripods of a consecutive crossing pair
void push_block(std::vector<PlaneTripod>& out, const Geodesic& gi, const Geodesic& gn) {
  out.emplace_back(gi.a, gi.b, gn.b);
  out.emplace_back(gi.a, gn.b, gn.a);
}

TripodPath<Psl2r> path_of(const std::vector<PlaneTripod>& ts) {
  TripodPath<Psl2r> out;
  GTripod<Psl2r> frame;
  for (const auto& T : ts) out.model.push_back(embed_tripod<Psl2r>(frame, T));
  std::tie(out.comb, out.shears) = path_combinatorics(out.model);
  for (const auto& t : out.model) out.qt.emplace_back(t);
  return out;
}

}  // namespace

double visual_from_point(cplx z, const BndR& x, const BndR& y) {
  double d = std::fmod(std::abs(dir_angle(z, x) - dir_angle(z, y)), 2 * kPi);
  return std::min(d, 2 * kPi - d);
}

ForkedPaths build_forked_paths(cplx z0, const BndR& x1, const BndR& x2, int rungs) {
  if (!(z0.imag() > 0))
    throw NotInteriorPoint("build_forked_paths: basepoint not in the upper half plane");
  rungs = std::max(rungs, 1);
  const double rho = 0.5 * std::log(3.0);  // meeting point to each side of its triangle
  ForkedPaths out;
  if (proj_dist(x1, x2) <= 1e-12) {
    // coincident targets: one straight ladder, returned twice
    Geodesic G(bnd_at(z0, dir_angle(z0, x1) + kPi), x1);
    std::vector<Geodesic> seq;
    for (int j = 0; j <= rungs; ++j) {
      cplx p = geo_walk(G, z0, 1.5 * j);
      seq.push_back(rung_at(p, dir_angle(p, x1)));
    }
    std::vector<PlaneTripod> ts;
    for (size_t i = 0; i + 1 < seq.size(); ++i) push_block(ts, seq[i], seq[i + 1]);
    out.toward_first = path_of(ts);
    out.toward_second = out.toward_first;
    out.shared_prefix = int(ts.size());
    return out;
  }
  if (visual_from_point(z0, x1, x2) > 0.35)
    throw ForkTooWide("build_forked_paths: targets too far apart seen from the basepoint");
  cplx Z = fermat_point(z0, x1, x2);
  Geodesic G0 = through(z0, Z);
  double L0 = h2_distance(z0, Z) - rho;
  if (L0 < 1) throw ForkTooWide("build_forked_paths: fork too close to the basepoint");
  // crossings along the shared arc: equal spacing that stays within [1, 2]
  int k = std::max<int>(std::max<int>(1, std::ceil(L0 / 2)),
                        std::min<int>(std::floor(L0), std::lround(L0 / 1.5)));
  std::vector<Geodesic> lead;
  for (int j = 0; j < k; ++j) {
    cplx p = geo_walk(G0, z0, L0 * j / k);
    lead.push_back(rung_at(p, dir_angle_pt(p, Z)));
  }
  cplx y0 = geo_walk(G0, z0, L0);
  lead.push_back(rung_at(y0, dir_angle_pt(y0, Z)));  // side of the fork facing z0
  BndR v0 = bnd_at(Z, dir_angle_pt(Z, z0) + kPi);    // far vertex of the fork
  auto ray_seq = [&](const BndR& x) {
    Geodesic G(bnd_at(Z, dir_angle(Z, x) + kPi), x);
    cplx y = geo_walk(G, Z, rho);
    std::vector<Geodesic> seq{rung_at(y, dir_angle(y, x))};
    for (int j = 1; j <= rungs; ++j) {
      cplx q = geo_walk(G, y, 1.5 * j);
      seq.push_back(rung_at(q, dir_angle(q, x)));
    }
    return seq;
  };
  auto assemble = [&](const std::vector<Geodesic>& post) {
    std::vector<PlaneTripod> ts;
    for (size_t i = 0; i + 1 < lead.size(); ++i) push_block(ts, lead[i], lead[i + 1]);
    ts.emplace_back(lead.back().a, lead.back().b, v0);  // the forking tripod
    for (size_t i = 0; i + 1 < post.size(); ++i) push_block(ts, post[i], post[i + 1]);
    return ts;
  };
  out.toward_first = path_of(assemble(ray_seq(x1)));
  out.toward_second = path_of(assemble(ray_seq(x2)));
  out.shared_prefix = 2 * k + 1;
  return out;
}

namespace {

template <class S>
nlohmann::json num_json(const S& x) {
  if constexpr (std::is_same_v<S, cplx>)
    return nlohmann::json::array({x.real(), x.imag()});
  else
    return x;
}

}  // namespace

template <class M>
std::string path_to_json(const TripodPath<M>& path) {
  nlohmann::json j;
  j["group"] = std::string(M::name);
  j["combinatorics"] = path.comb;
  j["shears"] = path.shears;
  j["epsilon"] = path.epsilon;
  std::vector<double> eps;
  for (const auto& q : path.qt) eps.push_back(measure_quasiness(q));
  j["epsilons"] = eps;
  nlohmann::json defs = nlohmann::json::array();
  for (const auto& g : path.deform) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < M::N; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < M::N; ++c) row.push_back(num_json(g(r, c)));
      rows.push_back(row);
    }
    defs.push_back(rows);
  }
  j["deformation"] = defs;
  return j.dump(2);
}

template std::string path_to_json<Psl2r>(const TripodPath<Psl2r>&);
template std::string path_to_json<Psl2c>(const TripodPath<Psl2c>&);
template std::string path_to_json<Sl3r>(const TripodPath<Sl3r>&);

}  // namespace tri
