#include "tripods/models.hpp"

namespace tri {

ModelKind model_kind_of(const std::string& name) {
  if (name == "psl2r") return ModelKind::PSL2R;
  if (name == "psl2c") return ModelKind::PSL2C;
  if (name == "sl3r") return ModelKind::SL3R;
  throw std::invalid_argument("unknown model group: " + name);
}

Eigen::Matrix2d sl2_of_plane_tripod(const PlaneTripod& T) {
  MobR w = to_standard(T.tm, T.tp);
  BndR img = moebius_apply(w, T.tz);
  double val = img.value();
  if (!(val > 0)) throw DegenerateConfiguration("plane tripod is negatively oriented");
  Eigen::Matrix2d d;
  d << std::sqrt(val), 0, 0, 1.0 / std::sqrt(val);
  return w.inverse().m * d;
}

}  // namespace tri
