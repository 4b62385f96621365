/** @file

    @brief One subspace correction of the multilevel scheme, evaluated against
    the fine iterate.

    For a descriptor V_i the engine forms the full approximation xi = Q_i v
    and the restricted residual r = R_i E'(v), solves the local problem
      E_i'(eta) = E_i'(xi) - r
    (or its quadratic surrogate), and turns s = eta - xi into a fine-level
    direction d = I_i s together with a step size.

    The fine iterate v and the product A v are kept current as corrections
    are applied, so a nodal correction costs only the size of the support of
    the basis function on the finest level.
*/

#ifndef FASD_ENGINE_HPP
#define FASD_ENGINE_HPP

#include "fasd/config.hpp"
#include "fasd/linesearch.hpp"
#include "fasd/plan.hpp"
#include "fasd/problem.hpp"

#include <functional>
#include <vector>

namespace fasd {

struct Correction {
  SubspaceDescriptor where;
  /// Fine indices touched by the direction, increasing.
  std::vector<int> support;
  /// d = I_i s on `support`.
  Vector direction;
  /// s in level coordinates (one entry for a nodal subspace).
  Vector local;
  double residual = 0.0;   ///< r_i for a nodal subspace, ||r||_2 for a level
  double slope0 = 0.0;     ///< <E'(v), d>
  double curvature0 = 0.0; ///< <E''(v) d, d>
  double s_normsq = 0.0;   ///< ||d||_A^2
  int local_iterations = 0;
  StepResult step;
  /// E(v + alpha d) - E(v)
  double energy_change = 0.0;
};

class SubspaceEngine {
public:
  SubspaceEngine(const Problem& problem, const SolverConfig& config, Vector v);

  const Problem& problem() const { return problem_; }
  const SolverConfig& config() const { return config_; }
  const Vector& iterate() const { return v_; }
  void set_iterate(Vector v);

  /// Used by the quadratic step in global mode; refreshed once per outer iteration.
  void set_global_lipschitz(double value) { global_lipschitz_ = value; }
  double global_lipschitz() const { return global_lipschitz_; }

  /// Local solve and step size for `where`; the iterate is not touched.
  Correction compute(const SubspaceDescriptor& where);
  /// v += alpha d.
  void apply(const Correction& c);
  /// compute() followed by apply().
  Correction correct(const SubspaceDescriptor& where);

  /// Fine gradient component j at the current iterate.
  double gradient_component(int j) const;
  Vector gradient() const;
  /// The section alpha -> E(v + alpha d) of a computed correction.
  Section1D section(const Correction& c) const;

private:
  Correction compute_nodal(const SubspaceDescriptor& where);
  Correction compute_level(const SubspaceDescriptor& where);
  void choose_step(Correction& c) const;
  const Vector& xi(int level);
  void invalidate_xi();

  const Problem& problem_;
  const EnergyModel& model_;
  SolverConfig config_;
  Vector v_;
  Vector av_; ///< stiffness(finest) * v
  double global_lipschitz_ = 0.0;

  int xi_level_ = -1;
  Vector xi_;
};

/// Called after each applied correction.
using CorrectionObserver = std::function<void(const Correction&, const SubspaceEngine&)>;

} // namespace fasd

#endif // FASD_ENGINE_HPP
