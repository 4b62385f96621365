#ifndef FASD_PROBLEM_HPP
#define FASD_PROBLEM_HPP

#include "fasd/fem.hpp"
#include "fasd/mesh.hpp"
#include "fasd/transfer.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace fasd {

/**
   @brief A mesh hierarchy with its assembled energy and transfer operators.

   Immutable after construction apart from the lazily built composite
   restrictions, which are guarded; a Problem can be shared by concurrent
   solves.
*/
class Problem {
public:
  Problem(Hierarchy mesh, const ModelParams& params);

  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  const Hierarchy& mesh() const { return mesh_; }
  const EnergyModel& model() const { return model_; }
  const std::vector<TransferPair>& transfers() const { return transfers_; }
  int num_levels() const { return model_.num_levels(); }
  int finest() const { return model_.finest(); }

  /// Rows are level-`level` nodes; row i holds the finest nodal values of
  /// the level basis function phi_i.
  const SparseMatrix& restriction_from_finest(int level) const;

  /// Sequential maps between `level` and the finest level.
  Vector prolongate_to_finest(int level, std::span<const double> v) const;
  Vector restrict_from_finest(int level, std::span<const double> g) const;
  Vector project_from_finest(int level, std::span<const double> v, ProjectionMode mode) const;

  /// One V-cycle for the stiffness matrix of `level` (forward Gauss-Seidel
  /// going down, backward coming up): z ~ A^{-1} r.
  void stiffness_vcycle(int level, std::span<const double> r, std::span<double> z) const;

  /// grad_dual_norm on the finest level, with CG preconditioned by stiffness_vcycle.
  DualNormResult dual_norm(std::span<const double> g,
                           DualNormKind kind = DualNormKind::Stiffness) const;

private:
  Hierarchy mesh_;
  EnergyModel model_;
  std::vector<TransferPair> transfers_;
  mutable std::mutex composite_mutex_;
  mutable std::vector<std::unique_ptr<SparseMatrix>> composite_;
};

/// Hierarchy of `num_levels` levels over a coarse_n x coarse_n grid.
std::unique_ptr<Problem> make_problem(const ModelParams& params, int coarse_n, int num_levels);

} // namespace fasd

#endif // FASD_PROBLEM_HPP
