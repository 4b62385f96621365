/** @file

    @brief Inter-level operators between nested P1 spaces: prolongation
    (the natural inclusion), its transpose acting on dual vectors, and
    projections of primal vectors onto the coarse space.
*/

#ifndef FASD_TRANSFER_HPP
#define FASD_TRANSFER_HPP

#include "fasd/fem.hpp"
#include "fasd/linalg.hpp"
#include "fasd/mesh.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fasd {

enum class ProjectionMode { Injection, L2 };

ProjectionMode parse_projection(std::string_view name);
std::string to_string(ProjectionMode m);

struct TransferPair {
  int level_fine = 1;
  int level_coarse = 0;
  SparseMatrix prolongation;   ///< fine x coarse, interior dofs
  SparseMatrix restriction;    ///< transpose of prolongation
  Vector fine_mass;            ///< lumped, fine interior
  SparseMatrix galerkin_mass;  ///< I^T M_fine I
};

TransferPair make_transfer(const MeshLevel& coarse, const MeshLevel& fine,
                           std::span<const double> fine_mass);

/// transfers[l] connects level l (coarse) to level l+1.
std::vector<TransferPair> build_transfers(const Hierarchy& hierarchy, const EnergyModel& model);

Vector prolongate(const TransferPair& t, std::span<const double> vc);
Vector restrict_dual(const TransferPair& t, std::span<const double> gf);

/// Injection takes nodal values at coarse nodes (a prefix copy, given the
/// coarse-first numbering); l2 is the projection in the fine lumped inner
/// product. Both leave prolongated coarse vectors unchanged.
Vector project_primal(const TransferPair& t, std::span<const double> vf, ProjectionMode mode);

/// Product of prolongations from level `from` up to level `to` (to > from).
SparseMatrix composite_prolongation(const std::vector<TransferPair>& transfers, int from, int to);

} // namespace fasd

#endif // FASD_TRANSFER_HPP
