/** @file

    @brief Solver variants and their configuration.
*/

#ifndef FASD_CONFIG_HPP
#define FASD_CONFIG_HPP

#include "fasd/fem.hpp"
#include "fasd/linesearch.hpp"
#include "fasd/transfer.hpp"

#include <string>
#include <string_view>

namespace fasd {

enum class Variant { SSO, FASD, FASD_ALS, FAS, FASQ1, FASQ2 };

/// Energy posed on each subspace around the full approximation xi = Q v:
/// the level discretization itself, 1/2 ||w - xi||_A^2,
/// 1/2 <E''(xi)(w - xi), w - xi>, or (eps2/2) ||w - xi||_A^2.
enum class LocalEnergy { Restricted, QuadraticIdentity, QuadraticHessian, QuadraticScaled };

enum class Decomposition { MultilevelNodal, LevelSpaces, FinestNodal };

/// Symmetric: fine to coarse, then back up with each level's nodes in
/// reverse order (a V-cycle). The other two visit every subspace once.
enum class SweepOrder { Symmetric, FineToCoarse, CoarseToFine };

Variant parse_variant(std::string_view name);
std::string to_string(Variant v);
LocalEnergy parse_local_energy(std::string_view name);
std::string to_string(LocalEnergy e);
Decomposition parse_decomposition(std::string_view name);
std::string to_string(Decomposition d);
SweepOrder parse_sweep_order(std::string_view name);
std::string to_string(SweepOrder o);
DualNormKind parse_dual_norm(std::string_view name);
std::string to_string(DualNormKind k);

struct SolverConfig {
  Variant variant = Variant::FAS;
  LocalEnergy local_energy = LocalEnergy::Restricted;
  Decomposition decomposition = Decomposition::MultilevelNodal;
  SweepOrder sweep_order = SweepOrder::Symmetric;
  ProjectionMode projection = ProjectionMode::Injection;
  StepMode step = StepMode::Unit;
  LipschitzMode lipschitz = LipschitzMode::Local;
  DualNormKind stopping_norm = DualNormKind::Stiffness;

  double outer_tol = 1e-10;
  int outer_max_iter = 200;
  double coarse_tol = 1e-10;
  int coarse_max_iter = 100;
  double local_tol = 1e-10;
  int local_max_iter = 100;
  double line_search_tol = 1e-12;
  int line_search_max_iter = 50;
  /// Energy increase per outer iteration that is reported as divergence.
  double divergence_tol = 1e-8;
  /// Set when a unit step was requested explicitly for a line-search variant.
  bool unit_step_forced = false;

  static SolverConfig defaults(Variant v);

  /// Throws std::invalid_argument on inconsistent combinations.
  void validate() const;
};

} // namespace fasd

#endif // FASD_CONFIG_HPP
