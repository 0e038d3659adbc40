#pragma once
// Quasi-tripods (tripods with perturbed vertices), the foot projection onto
// prescribed endpoints, sheared paths of quasi-tripods with their coplanar
// models and pivot-supported deformations, the confinement classification of
// a path's first and last chords, and iterated limit points with a fitted
// geometric decay certificate.

#include <limits>
#include <string>

#include "tripods/cones.hpp"

namespace tri {

struct NotTransverse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfFootDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EndpointMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PivotNotFixed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ForkTooWide : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Right-multiply by a unimodular factor without renormalizing.  Stage
// matrices of long paths are badly scaled (column norms run like e^{+d} and
// e^{-d}); recomputing their determinant cancels catastrophically and the
// usual constructor would scale every entry by that noise.  The product of a
// normalized tripod with an exactly unimodular factor only drifts by rounding,
// so we keep it as is.
template <class M>
GTripod<M> rmul(const GTripod<M>& t, const Eigen::Matrix2d& h) {
  GTripod<M> out;
  out.g = t.g * xi<M>(h);
  return out;
}

template <class M>
GTripod<M> lmul(const GMat<M>& g, const GTripod<M>& t) {
  GTripod<M> out;
  out.g = g * t.g;
  return out;
}

// det-normalize a well-scaled group element in place (near-identity inputs;
// never use this on accumulated stage matrices)
template <class M>
void unit_det(GMat<M>& g) {
  typename M::S det = g.determinant();
  if (std::abs(det) < 1e-300) throw DegenerateConfiguration("unit_det: singular matrix");
  if constexpr (M::N == 2) {
    if constexpr (std::is_floating_point_v<typename M::S>)
      if (det < 0) throw DegenerateConfiguration("unit_det: negative determinant");
    g /= std::sqrt(det);
  } else {
    g /= std::cbrt(det);
  }
}

// a tripod whose three vertices are allowed to drift away from the vertices
// of its interior; an exact tripod is the special case where they coincide
template <class M>
struct QuasiTripod {
  GTripod<M> interior;
  Flag<M> vm, vp, vz;  // the stored (possibly perturbed) vertices

  QuasiTripod() : QuasiTripod(GTripod<M>()) {}
  explicit QuasiTripod(const GTripod<M>& t)
      : interior(t), vm(vminus(t)), vp(vplus(t)), vz(vzero(t)) {}
  QuasiTripod(const GTripod<M>& t, const Flag<M>& m, const Flag<M>& p, const Flag<M>& z)
      : interior(t), vm(m), vp(p), vz(z) {}
};

// worst drift of a stored vertex from the interior's own vertex, measured at
// the interior
template <class M>
double measure_quasiness(const QuasiTripod<M>& q) {
  double a = tripod_metric(q.interior, vminus(q.interior), q.vm);
  double b = tripod_metric(q.interior, vplus(q.interior), q.vp);
  double c = tripod_metric(q.interior, vzero(q.interior), q.vz);
  return std::max(a, std::max(b, c));
}

// cyclic rotation: the interior rotates and the stored vertices follow suit
template <class M>
QuasiTripod<M> omega_qt(const QuasiTripod<M>& q) {
  return QuasiTripod<M>(rmul(q.interior, sl2_omega()), q.vp, q.vz, q.vm);
}

template <class M>
QuasiTripod<M> omega_qt(const QuasiTripod<M>& q, int n) {
  QuasiTripod<M> out = q;
  for (int i = 0; i < n; ++i) out = omega_qt(out);
  return out;
}

template <class M>
bool reduced(const QuasiTripod<M>& q, double tol = 1e-10) {
  return flag_dist(vminus(q.interior), q.vm) <= tol && flag_dist(vplus(q.interior), q.vp) <= tol;
}

// ---------------------------------------------------------------------------
// foot projection: the closest-in-construction tripod with the prescribed
// endpoint flags.  The targets are pulled back through the tripod's frame,
// where they sit near the base flags; the correction is the unique group
// element with unit diagonal (no residual shear in the tripod's own frame)
// carrying the base flags onto the pulled-back targets.  The construction is
// equivariant and restricts to the identity when the endpoints already match.

template <class M>
GTripod<M> foot_map(const GTripod<M>& t, const Flag<M>& a_plus, const Flag<M>& a_minus,
                    double beta = 0.1) {
  if constexpr (M::N == 2) {
    if (sin_angle(a_plus.f.col(0), a_minus.f.col(0)) < 1e-10)
      throw NotTransverse("foot_map: endpoint flags coincide");
  } else {
    Eigen::Vector3d np = a_plus.f.col(0).cross(a_plus.f.col(1)).normalized();
    Eigen::Vector3d nm = a_minus.f.col(0).cross(a_minus.f.col(1)).normalized();
    if (std::abs(np.dot(a_minus.f.col(0))) < 1e-10 || std::abs(nm.dot(a_plus.f.col(0))) < 1e-10)
      throw NotTransverse("foot_map: flags are incident");
  }
  double dp = tripod_metric(t, vplus(t), a_plus);
  double dm = tripod_metric(t, vminus(t), a_minus);
  if (std::max(dp, dm) > beta) throw OutOfFootDomain("foot_map: endpoint drift exceeds beta");
  // pull the targets back through the frame by solving, not inverting: deep
  // frames are badly conditioned and an explicit inverse wastes precision
  auto lu = t.g.fullPivLu();
  using FMat = Eigen::Matrix<typename M::S, M::N, Flag<M>::C>;
  Flag<M> bp(FMat(lu.solve(a_plus.f))), bm(FMat(lu.solve(a_minus.f)));
  GMat<M> u;
  if constexpr (M::N == 2) {
    u.col(0) = bp.f.col(0) / bp.f(0, 0);
    u.col(1) = bm.f.col(0) / bm.f(1, 0);
  } else {
    // middle column: the intersection line of the two pulled-back planes
    Eigen::Vector3d np = bp.f.col(0).cross(bp.f.col(1));
    Eigen::Vector3d nm = bm.f.col(0).cross(bm.f.col(1));
    Eigen::Vector3d mid = nm.cross(np);
    u.col(0) = bp.f.col(0) / bp.f(0, 0);
    u.col(1) = mid / mid(1);
    u.col(2) = bm.f.col(0) / bm.f(2, 0);
  }
  // normalize the correction on its own: it is well scaled, the frame is not
  unit_det<M>(u);
  return lmul<M>(t.g, GTripod<M>(u));
}

template <class M>
GTripod<M> foot1(const QuasiTripod<M>& q, double beta = 0.1) {
  // the foot of an exact tripod is the tripod itself; when the stored
  // endpoints coincide with the interior's, skip the pullback (which would
  // only add conditioning noise through a deep frame)
  if (flag_dist(vminus(q.interior), q.vm) <= 1e-13 && flag_dist(vplus(q.interior), q.vp) <= 1e-13)
    return q.interior;
  return foot_map(q.interior, q.vp, q.vm, beta);
}

// the three feet: projections of the interior (rotated 0, 1, 2 times) onto
// the corresponding pair of stored vertices
template <class M>
std::array<GTripod<M>, 3> feet(const QuasiTripod<M>& q, double beta = 0.1) {
  QuasiTripod<M> r1 = omega_qt(q), r2 = omega_qt(r1);
  return {foot1(q, beta), foot1(r1, beta), foot1(r2, beta)};
}

// ---------------------------------------------------------------------------
// sheared pairs and coplanar steps

// the coplanar successor: rotate n times, flow R along the axis, reverse.
// The whole step is one unimodular right factor, collapsed before applying.
template <class M>
GTripod<M> sheared_step(const GTripod<M>& t, int n, double R) {
  Eigen::Matrix2d w = Eigen::Matrix2d::Identity();
  for (int i = 0; i < n; ++i) w = w * sl2_omega();
  w = w * sl2_shear(R) * sl2_sigma();
  return rmul(t, w);
}

// how far qn is from being the exact R-sheared successor of q (both feet
// taken, so vertex drift is projected out first)
template <class M>
double sheared_deviation(const QuasiTripod<M>& q, const QuasiTripod<M>& qn, double R,
                         double beta = 0.1) {
  return tripod_space_dist(foot1(qn, beta), sheared_step(foot1(q, beta), 0, R));
}

// q and qn must have swapped endpoint vertices; true when the feet are within
// alpha of the exact sheared relation
template <class M>
bool sheared_check(const QuasiTripod<M>& q, const QuasiTripod<M>& qn, double R, double alpha,
                   double tol = 1e-8) {
  if (flag_dist(q.vp, qn.vm) > tol || flag_dist(q.vm, qn.vp) > tol)
    throw EndpointMismatch("sheared_check: endpoint vertices do not swap");
  return sheared_deviation(q, qn, R) <= alpha;
}

// ---------------------------------------------------------------------------
// paths

template <class M>
struct TripodPath {
  std::vector<QuasiTripod<M>> qt;
  std::vector<int> comb;            // rotation count per step, 1 or 2
  std::vector<double> shears;       // flow length per step
  std::vector<GTripod<M>> model;    // optional coplanar model, same length as qt
  std::vector<GMat<M>> deform;      // optional per-pivot deformation, one per step
  double epsilon = 0;               // worst measured drift along the path
};

template <class M>
std::vector<GTripod<M>> coplanar_path(const GTripod<M>& t0, const std::vector<int>& comb,
                                      const std::vector<double>& shears) {
  if (comb.size() != shears.size()) throw std::invalid_argument("coplanar_path: size mismatch");
  std::vector<GTripod<M>> out{t0};
  for (size_t i = 0; i < comb.size(); ++i)
    out.push_back(sheared_step(out.back(), comb[i], shears[i]));
  return out;
}

// recover the rotation counts and flow lengths of a coplanar model; fails if
// some consecutive pair is not a sheared step.  Flow lengths may be negative:
// ladder-style paths legitimately flow against the axis orientation on every
// other step.  Everything is read off scale free: the flow length from the
// ratio of two column-norm ratios (the flow factor is diagonal, so each
// column picks up one exponential) and the validation residual after
// projecting out the overall scalar, which absorbs both sign ambiguity and
// normalization drift of the stage matrices.
template <class M>
std::pair<std::vector<int>, std::vector<double>> path_combinatorics(
    const std::vector<GTripod<M>>& model, double tol = 1e-6) {
  std::pair<std::vector<int>, std::vector<double>> out;
  const GMat<M> om = xi<M>(sl2_omega());
  const GMat<M> sg = xi<M>(sl2_sigma());
  for (size_t i = 0; i + 1 < model.size(); ++i) {
    const GMat<M>& B = model[i + 1].g;
    GMat<M> bs = B * sg;  // reversal squares to a scalar, absorbed below
    // both rotation counts can come close on long converging paths, so score
    // the two candidates and keep the better fit instead of the first one
    // under tolerance.
    int best_n = 0;
    double best_R = 0, best_res = std::numeric_limits<double>::infinity();
    GMat<M> A = model[i].g;
    for (int n = 1; n <= 2; ++n) {
      A = A * om;
      double r0 = bs.col(0).norm() / A.col(0).norm();
      double rl = bs.col(M::N - 1).norm() / A.col(M::N - 1).norm();
      double R = std::log(r0 / rl) / (2 * (M::N - 1));
      if (!std::isfinite(R)) continue;
      GMat<M> P = A * xi<M>(Eigen::Matrix2d(sl2_shear(R) * sl2_sigma()));
      typename M::S s = P.conjugate().cwiseProduct(B).sum() / P.squaredNorm();
      double res = (B - s * P).norm() / B.norm();
      if (res < best_res) { best_n = n; best_R = R; best_res = res; }
    }
    if (!(best_res <= tol))
      throw std::invalid_argument("path_combinatorics: pair is not a sheared step");
    out.first.push_back(best_n);
    out.second.push_back(best_R);
  }
  return out;
}

// the pivot of step i: the chord endpoint shared with the next tripod
template <class M>
Flag<M> pivot_flag(const GTripod<M>& t, int n) {
  return n == 1 ? vplus(t) : vminus(t);
}

template <class M>
Flag<M> pivot_flag(const QuasiTripod<M>& q, int n) {
  return n == 1 ? q.vp : q.vm;
}

// deform a coplanar model by pivot-stabilizing group elements: tripod i keeps
// its endpoints at stage i while its middle vertex is dragged one stage ahead
template <class M>
TripodPath<M> deform_path(const std::vector<GTripod<M>>& model, const std::vector<GMat<M>>& v) {
  if (model.size() < 2 || v.size() + 1 != model.size())
    throw std::invalid_argument("deform_path: need N+1 model tripods and N deformations");
  TripodPath<M> out;
  out.model = model;
  out.deform = v;
  for (auto& g : out.deform) unit_det<M>(g);
  std::tie(out.comb, out.shears) = path_combinatorics(model);
  for (size_t i = 0; i < out.deform.size(); ++i) {
    Flag<M> x = pivot_flag(model[i], out.comb[i]);
    if (flag_dist(act<M>(out.deform[i], x), x) > 1e-8)
      throw PivotNotFixed("deform_path: deformation moves its pivot");
  }
  GMat<M> b = GMat<M>::Identity();
  for (size_t i = 0; i + 1 < model.size(); ++i) {
    GMat<M> bn = b * out.deform[i];
    out.qt.emplace_back(lmul(b, model[i]), act<M>(b, vminus(model[i])),
                        act<M>(b, vplus(model[i])), act<M>(bn, vzero(model[i])));
    b = bn;
  }
  out.qt.emplace_back(lmul(b, model.back()));
  // only deformed stages are measured: where the factor is the identity the
  // successor is assembled as the exact sheared step of its predecessor, so
  // the drift is zero by construction and remeasuring it through a deep frame
  // would only report conditioning noise
  for (size_t i = 0; i + 1 < out.qt.size(); ++i) {
    if (out.deform[i].isIdentity(0)) continue;
    out.epsilon = std::max(out.epsilon, measure_quasiness(out.qt[i]));
    out.epsilon = std::max(out.epsilon, sheared_deviation(omega_qt(out.qt[i], out.comb[i]),
                                                          out.qt[i + 1], out.shears[i]));
  }
  return out;
}

// invert deform_path: read the per-step deformation off the feet of the path.
// The step factor is unique because the group acts simply transitively on
// tripods; conjugating back through the accumulated product expresses it
// against the undeformed model's pivots.
template <class M>
std::vector<GMat<M>> extract_deformation(const TripodPath<M>& path, double beta = 0.1) {
  if (path.qt.size() < 2 || path.comb.size() + 1 != path.qt.size())
    throw std::invalid_argument("extract_deformation: malformed path");
  std::vector<GMat<M>> out;
  GMat<M> b = GMat<M>::Identity();
  GTripod<M> f = foot1(path.qt[0], beta);
  for (size_t i = 0; i + 1 < path.qt.size(); ++i) {
    GTripod<M> fn = foot1(path.qt[i + 1], beta);
    GTripod<M> a = f;
    for (int k = 0; k < path.comb[i]; ++k) a = rmul(a, sl2_omega());
    GMat<M> w = xi<M>(Eigen::Matrix2d(sl2_shear(path.shears[i]) * sl2_sigma()));
    GMat<M> t = fn.g * w.inverse();
    // the step carrying stage i onto stage i+1: solve step * a = t columnwise
    GMat<M> step = a.g.transpose().fullPivLu().solve(t.transpose()).transpose();
    out.push_back(b.inverse() * step * b);
    unit_det<M>(out.back());
    b = b * out.back();
    f = fn;
  }
  return out;
}

template <class M>
std::vector<ChordG<M>> path_chords(const TripodPath<M>& path) {
  std::vector<ChordG<M>> out;
  out.reserve(path.qt.size());
  for (const auto& q : path.qt) out.emplace_back(q.interior);
  return out;
}

template <class M>
std::vector<ChordG<M>> model_chords(const TripodPath<M>& path) {
  if (path.model.empty()) throw NoModel("model_chords: path carries no model");
  std::vector<ChordG<M>> out;
  out.reserve(path.model.size());
  for (const auto& t : path.model) out.emplace_back(t);
  return out;
}

// index gaps are controlled by chord shifts: |m - p| <= Q shift + Q.  Two
// kinds of pairs are skipped as unmeasurable rather than failed: chords whose
// own endpoints have numerically merged (they only arise from fast
// convergence, which cannot stall, and their position is below any chart's
// resolution), and far pairs that collapse in the shared chart (their shift
// only grows with the gap, so they cannot violate the bound).
template <class M>
bool q_sequence_check(const std::vector<ChordG<M>>& chords, double Q) {
  std::vector<char> resolvable(chords.size());
  for (size_t i = 0; i < chords.size(); ++i)
    resolvable[i] = flag_dist(chords[i].minus, chords[i].plus) > 1e-11;
  for (size_t m = 0; m < chords.size(); ++m)
    for (size_t p = m + 1; p < chords.size(); ++p) {
      if (!resolvable[m] || !resolvable[p]) continue;
      double s;
      try {
        s = chord_shift(chords[m], chords[p]);
      } catch (const DegenerateConfiguration&) {
        continue;
      } catch (const NotCoplanar&) {
        if (p - m <= 2) throw;  // neighbours must share a circle; far pairs
        continue;               // merely ran out of chart resolution
      }
      if (double(p - m) > Q * s + Q) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// confinement: classify the (first, last) chord pair of a deformed path

enum class Confinement { squeezed, controlled, fail };

template <class M>
struct ConfinementResult {
  Confinement kind = Confinement::fail;
  std::optional<GTripod<M>> commanding;  // witness on the first chord when squeezed
  double alpha = 0;                      // cone radius the verdict was checked at
  double k = 0;                          // contraction / expansion factor used
};

// measured metric-comparison envelope of the model: ratios of anchored
// metrics are bounded by (k_hat / 4) exp(-c_hat d) at tripod distance d
template <class M>
const ContractionEstimate& model_contraction() {
  static const ContractionEstimate ce =
      contraction_estimate<M>({0.75, 1.5, 2.25, 3.0, 3.75, 4.5});
  return ce;
}

// flags spread across the cone of radius alpha around the middle vertex
template <class M>
std::vector<Flag<M>> cone_samples(const GTripod<M>& t, double alpha, int n) {
  std::vector<Flag<M>> out;
  for (int j = 0; j < n; ++j) {
    double th = alpha * (-0.999 + 1.998 * j / (n - 1.0));
    out.push_back(circle_map(t, BndR::of(-1.0 / std::tan((th - kPi / 2) / 2))));
  }
  return out;
}

template <class M>
ConfinementResult<M> confinement_check(const TripodPath<M>& path, double alpha, double ell0,
                                       int param_samples = 5) {
  if (path.model.empty()) throw NoModel("confinement_check: path carries no model");
  std::vector<ChordG<M>> mc = model_chords(path);
  const size_t N = mc.size() - 1;
  ConfinementResult<M> r;
  for (size_t i = 1; i < N; ++i)
    if (chord_shift(mc[0], mc[i]) > ell0) return r;  // not even a weak path
  double dN = chord_shift(mc[0], mc[N]);
  ChordG<M> H0(path.qt.front().interior), HN(path.qt.back().interior);
  auto [c0, c1] = orbit_centers(common_plane_coords(mc[0], mc[N]));
  double K = model_contraction<M>().k_hat, kap = 1 / K;
  auto inner_ok = [&](const GTripod<M>& t0, double a, double k) {
    for (int j = 0; j < param_samples; ++j) {
      GTripod<M> t1 = rmul(HN.tau, sl2_shear(c1 + 0.25 * (j - (param_samples - 1) / 2.0)));
      std::vector<Flag<M>> grid = cone_samples(t1, a, 9);
      if (!nested_check(t0, t1, a, k, grid)) return false;
    }
    return true;
  };
  if (dN >= ell0) {
    // strong path: the projection of the last model chord on the first is the
    // commanding candidate, for the deformed pair as well
    r.alpha = alpha;
    r.k = std::pow(kap, 7);
    GTripod<M> cmd = rmul(H0.tau, sl2_shear(c0));
    if (inner_ok(cmd, r.alpha, r.k)) {
      r.kind = Confinement::squeezed;
      r.commanding = cmd;
    }
  } else {
    r.alpha = kap * kap * alpha;
    r.k = K * K;
    bool all = true;
    for (int j = 0; j < param_samples && all; ++j) {
      GTripod<M> t1 = rmul(HN.tau, sl2_shear(c1 + 0.25 * (j - (param_samples - 1) / 2.0)));
      std::vector<Flag<M>> grid = cone_samples(t1, r.alpha, 9);
      bool found = false;
      for (int i = 0; i < param_samples && !found; ++i)
        found = nested_check(rmul(H0.tau, sl2_shear(c0 + 0.25 * (i - (param_samples - 1) / 2.0))),
                             t1, r.alpha, r.k, grid);
      all = found;
    }
    if (all) r.kind = Confinement::controlled;
  }
  return r;
}

// ---------------------------------------------------------------------------
// limit points

template <class M>
struct LimitCertificate {
  Flag<M> limit;
  double delta = 0;
  double q_hat = 0;   // fitted decay rate, below 1
  double beta_hat = 0;  // envelope prefactor dominating every residual
  std::vector<double> residuals;  // per stage, anchored at the first tripod
  int burn_in = 0;
};

// sample points of the delta-sliver of a chord: cone arcs along the orbit
// plus the endpoint flags
template <class M>
std::vector<Flag<M>> sliver_samples(const ChordG<M>& H, double delta) {
  std::vector<Flag<M>> out{H.minus, H.plus};
  for (int s = 0; s < 12; ++s) {
    GTripod<M> t = rmul(H.tau, sl2_shear(-2.75 + 5.5 * s / 11.0));
    out.push_back(vzero(t));
    for (double off : {-1.0, -0.5, 0.5, 1.0})
      out.push_back(circle_map(t, BndR::of(-1.0 / std::tan((off * 0.999 * delta - kPi / 2) / 2))));
  }
  out.push_back(vzero(rmul(H.tau, sl2_shear(-6))));
  out.push_back(vzero(rmul(H.tau, sl2_shear(6))));
  return out;
}

// iterate the path's chords until their slivers, watched from the first
// tripod, stay below 1e-8 across three consecutive visited stages; then fit
// the decay of the vertex residuals past the burn-in stage.  A stride larger
// than one watches only every stride-th stage; the limit does not depend on
// the subsequence, only the cost does.
template <class M>
LimitCertificate<M> limit_point(const TripodPath<M>& path, double delta, double ell0 = 1,
                                double R = 1, int max_iter = 10000, int stride = 1) {
  if (stride < 1) throw std::invalid_argument("limit_point: stride must be positive");
  if (path.qt.size() < 2) throw NoConvergence("limit_point: path too short");
  if (!path.model.empty() && !q_sequence_check(model_chords(path), ell0 * R))
    throw NoConvergence("limit_point: model violates the declared chord control");
  GTripod<M> ref = path.qt.front().interior;
  int last = std::min<int>(path.qt.size() - 1, max_iter);
  std::vector<int> stages;
  for (int m = 0; m <= last; m += stride) stages.push_back(m);
  int streak = 0, found_slot = -1;
  for (size_t s = 0; s < stages.size(); ++s) {
    std::vector<Flag<M>> pts = sliver_samples(ChordG<M>(path.qt[stages[s]].interior), delta);
    double diam = 0;
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i + 1; j < pts.size(); ++j)
        diam = std::max(diam, tripod_metric(ref, pts[i], pts[j]));
    streak = diam < 1e-8 ? streak + 1 : 0;
    if (streak == 3) {
      found_slot = int(s);
      break;
    }
  }
  if (found_slot < 0) throw NoConvergence("limit_point: slivers never settled");
  LimitCertificate<M> out;
  out.delta = delta;
  out.burn_in = int((ell0 + 1) * (ell0 + 1) * R);
  out.limit = path.qt[stages[found_slot]].vz;
  for (int s = 0; s <= found_slot; ++s) {
    const QuasiTripod<M>& q = path.qt[stages[s]];
    double r = std::max(tripod_metric(ref, out.limit, q.vm),
                        std::max(tripod_metric(ref, out.limit, q.vp),
                                 tripod_metric(ref, out.limit, q.vz)));
    out.residuals.push_back(r);
  }
  // the fit runs against the true stage index, so the rate means the same
  // thing whatever the stride
  auto window = [&](int lo) {
    std::vector<std::pair<int, double>> w;
    for (size_t s = 0; s < out.residuals.size(); ++s)
      if (stages[s] >= lo && out.residuals[s] > 1e-13)
        w.emplace_back(stages[s], std::log(out.residuals[s]));
    return w;
  };
  auto w = window(out.burn_in + 1);
  if (w.size() < 3) w = window(1);
  if (w.size() < 2) throw NoConvergence("limit_point: not enough residuals to fit a rate");
  double sm = 0, sy = 0, smm = 0, smy = 0;
  for (auto& [m, y] : w) {
    sm += m;
    sy += y;
    smm += double(m) * m;
    smy += m * y;
  }
  double n = w.size();
  double slope = (n * smy - sm * sy) / (n * smm - sm * sm);
  out.q_hat = std::exp(slope);
  if (!(out.q_hat < 1)) throw NoConvergence("limit_point: residuals do not decay");
  for (auto& [m, y] : w)
    out.beta_hat = std::max(out.beta_hat, std::exp(y - slope * m));
  return out;
}

// ---------------------------------------------------------------------------
// forked pairs of model paths in the hyperbolic plane

struct ForkedPaths {
  TripodPath<Psl2r> toward_first, toward_second;
  int shared_prefix = 0;
};

// visual separation of two boundary points watched from an interior point
double visual_from_point(cplx z, const BndR& x, const BndR& y);

// two model paths issued from z0 that run to x1 and x2 respectively, agreeing
// until the fork tripod where the targets separate; rungs caps the ladder
// length past the fork
ForkedPaths build_forked_paths(cplx z0, const BndR& x1, const BndR& x2, int rungs = 24);

// JSON document: group name, combinatorics, shears, deformation matrices,
// measured drifts
template <class M>
std::string path_to_json(const TripodPath<M>& path);

}  // namespace tri
