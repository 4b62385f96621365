#include "fasd/transfer.hpp"

#include "fasd/errors.hpp"

#include <stdexcept>

namespace fasd {

ProjectionMode parse_projection(std::string_view name)
{
  if (name == "injection") {
    return ProjectionMode::Injection;
  }
  if (name == "l2") {
    return ProjectionMode::L2;
  }
  throw std::invalid_argument("unknown projection '" + std::string(name) + "' (injection | l2)");
}

std::string to_string(ProjectionMode m)
{
  return m == ProjectionMode::Injection ? "injection" : "l2";
}

TransferPair make_transfer(const MeshLevel& coarse, const MeshLevel& fine,
                           std::span<const double> fine_mass)
{
  if (fine.parents.size() != fine.vertices.size() ||
      fine.level_index != coarse.level_index + 1) {
    throw std::invalid_argument("make_transfer: fine level is not a refinement of coarse");
  }
  if (fine_mass.size() != static_cast<std::size_t>(fine.num_interior())) {
    throw std::invalid_argument("make_transfer: fine mass size mismatch");
  }
  std::vector<Triplet> t;
  t.reserve(2 * static_cast<std::size_t>(fine.num_interior()));
  for (int i = 0; i < fine.num_interior(); ++i) {
    const VertexParents& par = fine.parents[fine.interior_vertices[i]];
    if (par.is_copy()) {
      const auto ic = coarse.interior_index[par.first];
      if (!ic) {
        throw std::logic_error("make_transfer: interior fine vertex copies a boundary vertex");
      }
      t.push_back({i, *ic, 1.0});
      continue;
    }
    for (int v : {par.first, par.second}) {
      if (const auto ic = coarse.interior_index[v]) {
        t.push_back({i, *ic, 0.5});
      }
    }
  }
  TransferPair pair;
  pair.level_coarse = coarse.level_index;
  pair.level_fine = fine.level_index;
  pair.prolongation =
      SparseMatrix::from_triplets(fine.num_interior(), coarse.num_interior(), std::move(t));
  pair.restriction = pair.prolongation.transpose();
  pair.fine_mass.assign(fine_mass.begin(), fine_mass.end());
  const SparseMatrix mi = multiply(SparseMatrix::diagonal(fine_mass), pair.prolongation);
  pair.galerkin_mass = multiply(pair.restriction, mi);
  return pair;
}

std::vector<TransferPair> build_transfers(const Hierarchy& hierarchy, const EnergyModel& model)
{
  if (static_cast<int>(hierarchy.size()) != model.num_levels()) {
    throw std::invalid_argument("build_transfers: hierarchy and model disagree on level count");
  }
  std::vector<TransferPair> out;
  for (std::size_t l = 0; l + 1 < hierarchy.size(); ++l) {
    out.push_back(make_transfer(hierarchy[l], hierarchy[l + 1],
                                model.level(static_cast<int>(l) + 1).mass));
  }
  return out;
}

Vector prolongate(const TransferPair& t, std::span<const double> vc)
{
  return spmv(t.prolongation, vc);
}

Vector restrict_dual(const TransferPair& t, std::span<const double> gf)
{
  return spmv(t.restriction, gf);
}

Vector project_primal(const TransferPair& t, std::span<const double> vf, ProjectionMode mode)
{
  if (vf.size() != static_cast<std::size_t>(t.prolongation.rows())) {
    throw std::invalid_argument("project_primal: size mismatch");
  }
  const auto nc = static_cast<std::size_t>(t.prolongation.cols());
  if (mode == ProjectionMode::Injection) {
    return Vector(vf.begin(), vf.begin() + static_cast<std::ptrdiff_t>(nc));
  }
  Vector weighted(vf.size());
  for (std::size_t i = 0; i < vf.size(); ++i) {
    weighted[i] = t.fine_mass[i] * vf[i];
  }
  const Vector rhs = spmv(t.restriction, weighted);
  const CgResult cg = cg_solve(t.galerkin_mass, rhs, 1e-10, std::max(100, 10 * static_cast<int>(nc)));
  if (!cg.converged) {
    throw NonConvergenceError("project_primal: CG did not converge for the l2 projection");
  }
  return cg.x;
}

SparseMatrix composite_prolongation(const std::vector<TransferPair>& transfers, int from, int to)
{
  if (from < 0 || to <= from || to > static_cast<int>(transfers.size())) {
    throw std::invalid_argument("composite_prolongation: bad level range");
  }
  SparseMatrix p = transfers[from].prolongation;
  for (int l = from + 1; l < to; ++l) {
    p = multiply(transfers[l].prolongation, p);
  }
  return p;
}

} // namespace fasd
