#include "fasd/config.hpp"

#include <stdexcept>

namespace fasd {

Variant parse_variant(std::string_view name)
{
  if (name == "sso") return Variant::SSO;
  if (name == "fasd") return Variant::FASD;
  if (name == "fasd-als" || name == "fasd_als") return Variant::FASD_ALS;
  if (name == "fas") return Variant::FAS;
  if (name == "fasq1") return Variant::FASQ1;
  if (name == "fasq2") return Variant::FASQ2;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (sso | fasd | fasd-als | fas | fasq1 | fasq2)");
}

std::string to_string(Variant v)
{
  switch (v) {
  case Variant::SSO: return "sso";
  case Variant::FASD: return "fasd";
  case Variant::FASD_ALS: return "fasd-als";
  case Variant::FAS: return "fas";
  case Variant::FASQ1: return "fasq1";
  case Variant::FASQ2: return "fasq2";
  }
  return "?";
}

LocalEnergy parse_local_energy(std::string_view name)
{
  if (name == "restricted") return LocalEnergy::Restricted;
  if (name == "quadratic_identity") return LocalEnergy::QuadraticIdentity;
  if (name == "quadratic_hessian") return LocalEnergy::QuadraticHessian;
  if (name == "quadratic_scaled") return LocalEnergy::QuadraticScaled;
  throw std::invalid_argument("unknown local energy '" + std::string(name) +
                              "' (restricted | quadratic_identity | quadratic_hessian | quadratic_scaled)");
}

std::string to_string(LocalEnergy e)
{
  switch (e) {
  case LocalEnergy::Restricted: return "restricted";
  case LocalEnergy::QuadraticIdentity: return "quadratic_identity";
  case LocalEnergy::QuadraticHessian: return "quadratic_hessian";
  case LocalEnergy::QuadraticScaled: return "quadratic_scaled";
  }
  return "?";
}

Decomposition parse_decomposition(std::string_view name)
{
  if (name == "multilevel_nodal") return Decomposition::MultilevelNodal;
  if (name == "level_spaces") return Decomposition::LevelSpaces;
  if (name == "finest_nodal") return Decomposition::FinestNodal;
  throw std::invalid_argument("unknown decomposition '" + std::string(name) +
                              "' (multilevel_nodal | level_spaces | finest_nodal)");
}

std::string to_string(Decomposition d)
{
  switch (d) {
  case Decomposition::MultilevelNodal: return "multilevel_nodal";
  case Decomposition::LevelSpaces: return "level_spaces";
  case Decomposition::FinestNodal: return "finest_nodal";
  }
  return "?";
}

SweepOrder parse_sweep_order(std::string_view name)
{
  if (name == "fine_to_coarse") return SweepOrder::FineToCoarse;
  if (name == "coarse_to_fine") return SweepOrder::CoarseToFine;
  if (name == "symmetric") return SweepOrder::Symmetric;
  throw std::invalid_argument("unknown sweep order '" + std::string(name) +
                              "' (symmetric | fine_to_coarse | coarse_to_fine)");
}

std::string to_string(SweepOrder o)
{
  switch (o) {
  case SweepOrder::Symmetric: return "symmetric";
  case SweepOrder::FineToCoarse: return "fine_to_coarse";
  case SweepOrder::CoarseToFine: return "coarse_to_fine";
  }
  return "?";
}

DualNormKind parse_dual_norm(std::string_view name)
{
  if (name == "stiffness") return DualNormKind::Stiffness;
  if (name == "euclidean") return DualNormKind::Euclidean;
  throw std::invalid_argument("unknown dual norm '" + std::string(name) + "' (stiffness | euclidean)");
}

std::string to_string(DualNormKind k)
{
  return k == DualNormKind::Stiffness ? "stiffness" : "euclidean";
}

SolverConfig SolverConfig::defaults(Variant v)
{
  SolverConfig c;
  c.variant = v;
  switch (v) {
  case Variant::SSO:
    c.decomposition = Decomposition::FinestNodal;
    c.local_energy = LocalEnergy::Restricted;
    c.step = StepMode::Unit;
    break;
  case Variant::FASD:
    c.step = StepMode::Exact;
    break;
  case Variant::FASD_ALS:
    c.step = StepMode::Quadratic;
    c.lipschitz = LipschitzMode::Local;
    break;
  case Variant::FAS:
    break;
  case Variant::FASQ1:
    c.local_energy = LocalEnergy::QuadraticIdentity;
    break;
  case Variant::FASQ2:
    c.local_energy = LocalEnergy::QuadraticIdentity;
    c.decomposition = Decomposition::LevelSpaces;
    break;
  }
  return c;
}

void SolverConfig::validate() const
{
  if (variant == Variant::FASQ2 && decomposition != Decomposition::LevelSpaces) {
    throw std::invalid_argument("fasq2 requires the level_spaces decomposition");
  }
  if (variant == Variant::SSO &&
      (decomposition != Decomposition::FinestNodal || local_energy != LocalEnergy::Restricted)) {
    throw std::invalid_argument("sso uses the finest nodal decomposition with the restricted energy");
  }
  if (step == StepMode::Unit && (variant == Variant::FASD || variant == Variant::FASD_ALS) &&
      !unit_step_forced) {
    throw std::invalid_argument("unit step with " + to_string(variant) +
                                " must be requested explicitly");
  }
  if (!(outer_tol >= 0.0) || outer_max_iter < 0 || !(coarse_tol > 0.0) || coarse_max_iter < 1 ||
      !(local_tol > 0.0) || local_max_iter < 1 || !(line_search_tol > 0.0) ||
      line_search_max_iter < 1) {
    throw std::invalid_argument("solver tolerances must be positive and iteration limits >= 1");
  }
}

} // namespace fasd
