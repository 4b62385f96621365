#include "fasd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fasd {

Problem::Problem(Hierarchy mesh, const ModelParams& params)
  : mesh_(std::move(mesh)), model_(assemble(params, mesh_)),
    transfers_(build_transfers(mesh_, model_))
{
  for (const auto& level : mesh_) {
    if (level.num_interior() == 0) {
      throw std::invalid_argument("a " + std::to_string(level.cells_per_side) + "x" +
                                  std::to_string(level.cells_per_side) +
                                  " mesh has no interior nodes and cannot be a compute level");
    }
  }
  composite_.resize(mesh_.size());
}

const SparseMatrix& Problem::restriction_from_finest(int level) const
{
  if (level < 0 || level >= finest()) {
    throw std::out_of_range("restriction_from_finest: level must be below the finest");
  }
  std::lock_guard lock(composite_mutex_);
  auto& slot = composite_[level];
  if (!slot) {
    slot = std::make_unique<SparseMatrix>(
        composite_prolongation(transfers_, level, finest()).transpose());
  }
  return *slot;
}

Vector Problem::prolongate_to_finest(int level, std::span<const double> v) const
{
  Vector out(v.begin(), v.end());
  for (int l = level; l < finest(); ++l) {
    out = prolongate(transfers_[l], out);
  }
  return out;
}

Vector Problem::restrict_from_finest(int level, std::span<const double> g) const
{
  Vector out(g.begin(), g.end());
  for (int l = finest() - 1; l >= level; --l) {
    out = restrict_dual(transfers_[l], out);
  }
  return out;
}

Vector Problem::project_from_finest(int level, std::span<const double> v, ProjectionMode mode) const
{
  Vector out(v.begin(), v.end());
  for (int l = finest() - 1; l >= level; --l) {
    out = project_primal(transfers_[l], out, mode);
  }
  return out;
}

void Problem::stiffness_vcycle(int level, std::span<const double> r, std::span<double> z) const
{
  const SparseMatrix& a = model_.level(level).stiffness;
  if (level == 0) {
    const CgResult cg = cg_solve(a, r, 1e-14, 10 * a.rows() + 100);
    std::copy(cg.x.begin(), cg.x.end(), z.begin());
    return;
  }
  const TransferPair& t = transfers_[level - 1];
  std::fill(z.begin(), z.end(), 0.0);
  gs_sweep(a, r, z, false);
  Vector res(r.begin(), r.end());
  spmv_add(a, z, -1.0, res);
  const Vector rc = restrict_dual(t, res);
  Vector zc(rc.size(), 0.0);
  stiffness_vcycle(level - 1, rc, zc);
  spmv_add(t.prolongation, zc, 1.0, z);
  gs_sweep(a, r, z, true);
}

DualNormResult Problem::dual_norm(std::span<const double> g, DualNormKind kind) const
{
  if (kind == DualNormKind::Euclidean) {
    return {norm2(g), 0, true};
  }
  const int level = finest();
  const SparseMatrix& a = model_.level(level).stiffness;
  const CgResult cg = pcg_solve(
      a, g, [&](std::span<const double> r, std::span<double> z) { stiffness_vcycle(level, r, z); },
      1e-10, std::max(100, a.rows()));
  return {std::sqrt(std::max(0.0, dot(g, cg.x))), cg.iterations, cg.converged};
}

std::unique_ptr<Problem> make_problem(const ModelParams& params, int coarse_n, int num_levels)
{
  return std::make_unique<Problem>(build_hierarchy(coarse_n, num_levels), params);
}

} // namespace fasd
