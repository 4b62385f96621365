#include "fasd/fem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fasd {

Forcing parse_forcing(std::string_view name)
{
  if (name == "one") {
    return Forcing::One;
  }
  if (name == "sinsin") {
    return Forcing::SinSin;
  }
  if (name == "zero") {
    return Forcing::Zero;
  }
  throw std::invalid_argument("unknown forcing '" + std::string(name) + "' (one | sinsin | zero)");
}

std::string to_string(Forcing f)
{
  switch (f) {
  case Forcing::One:
    return "one";
  case Forcing::SinSin:
    return "sinsin";
  case Forcing::Zero:
    return "zero";
  }
  return "?";
}

double forcing_value(Forcing f, const Point& x)
{
  switch (f) {
  case Forcing::One:
    return 1.0;
  case Forcing::SinSin:
    return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y);
  case Forcing::Zero:
    return 0.0;
  }
  return 0.0;
}

PowerLaw::PowerLaw(double p) : p_(p), ip_(-1)
{
  if (p == std::floor(p) && p <= 64.0) {
    ip_ = static_cast<int>(p);
  }
}

double PowerLaw::pow_abs(double a, double e, int ie) const
{
  if (ie >= 0) {
    double r = 1.0;
    double base = a;
    for (int n = ie; n > 0; n >>= 1) {
      if (n & 1) {
        r *= base;
      }
      base *= base;
    }
    return r;
  }
  return std::pow(a, e);
}

double PowerLaw::abs_pow(double t) const
{
  return pow_abs(std::abs(t), p_, ip_);
}

double PowerLaw::curvature(double t) const
{
  return pow_abs(std::abs(t), p_ - 2.0, ip_ >= 0 ? ip_ - 2 : -1);
}

double PowerLaw::flux(double t) const
{
  return curvature(t) * t;
}

EnergyModel::EnergyModel(ModelParams params, std::vector<LevelOperators> levels)
  : params_(params), power_(params.p), levels_(std::move(levels))
{
  if (!(params_.p >= 2.0) || !std::isfinite(params_.p)) {
    throw std::invalid_argument("EnergyModel: p must be >= 2");
  }
  if (!(params_.eps2 > 0.0) || !std::isfinite(params_.eps2)) {
    throw std::invalid_argument("EnergyModel: eps2 must be > 0");
  }
}

void EnergyModel::check_size(int level, std::size_t n) const
{
  if (level < 0 || level >= num_levels()) {
    throw std::out_of_range("EnergyModel: level " + std::to_string(level) + " out of range");
  }
  if (n != levels_[level].mass.size()) {
    throw std::invalid_argument("EnergyModel: vector of size " + std::to_string(n) +
                                " on level " + std::to_string(level) + " with " +
                                std::to_string(levels_[level].mass.size()) + " unknowns");
  }
}

double EnergyModel::energy(int level, std::span<const double> u) const
{
  check_size(level, u.size());
  const auto& ops = levels_[level];
  const Vector au = spmv(ops.stiffness, u);
  double lp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lp += ops.mass[i] * power_.abs_pow(u[i]);
  }
  return lp / params_.p + 0.5 * params_.eps2 * dot(u, au) - dot(ops.load, u);
}

double EnergyModel::energy_difference(int level, std::span<const double> u,
                                      std::span<const double> w) const
{
  check_size(level, u.size());
  check_size(level, w.size());
  const auto& ops = levels_[level];
  const std::size_t n = u.size();
  Vector diff(n), sum(n);
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = w[i] - u[i];
    sum[i] = w[i] + u[i];
    lp += ops.mass[i] * (power_.abs_pow(w[i]) - power_.abs_pow(u[i]));
  }
  const Vector asum = spmv(ops.stiffness, sum);
  return lp / params_.p + 0.5 * params_.eps2 * dot(diff, asum) - dot(ops.load, diff);
}

Vector EnergyModel::gradient(int level, std::span<const double> u) const
{
  check_size(level, u.size());
  const auto& ops = levels_[level];
  Vector g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = ops.mass[i] * power_.flux(u[i]) - ops.load[i];
  }
  spmv_add(ops.stiffness, u, params_.eps2, g);
  return g;
}

Vector EnergyModel::hessian_diagonal(int level, std::span<const double> u) const
{
  check_size(level, u.size());
  const auto& ops = levels_[level];
  Vector d = ops.stiffness.diagonal_entries();
  for (std::size_t i = 0; i < u.size(); ++i) {
    d[i] = (params_.p - 1.0) * ops.mass[i] * power_.curvature(u[i]) + params_.eps2 * d[i];
  }
  return d;
}

Vector EnergyModel::hessian_apply(int level, std::span<const double> u,
                                  std::span<const double> w) const
{
  check_size(level, u.size());
  check_size(level, w.size());
  const auto& ops = levels_[level];
  Vector y(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    y[i] = (params_.p - 1.0) * ops.mass[i] * power_.curvature(u[i]) * w[i];
  }
  spmv_add(ops.stiffness, w, params_.eps2, y);
  return y;
}

SparseMatrix EnergyModel::hessian_matrix(int level, std::span<const double> u) const
{
  check_size(level, u.size());
  const auto& ops = levels_[level];
  Vector d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d[i] = (params_.p - 1.0) * ops.mass[i] * power_.curvature(u[i]);
  }
  return add_diagonal(ops.stiffness, d, params_.eps2);
}

DualNormResult EnergyModel::grad_dual_norm(int level, std::span<const double> g,
                                           DualNormKind kind) const
{
  check_size(level, g.size());
  if (kind == DualNormKind::Euclidean) {
    return {norm2(g), 0, true};
  }
  const auto& a = levels_[level].stiffness;
  const int max_iter = std::max(100, 10 * a.rows());
  const CgResult cg = cg_solve(a, g, 1e-10, max_iter);
  return {std::sqrt(std::max(0.0, dot(g, cg.x))), cg.iterations, cg.converged};
}

LevelOperators assemble_level(const MeshLevel& mesh, Forcing forcing)
{
  const int n = mesh.num_interior();
  LevelOperators ops;
  ops.mass.assign(n, 0.0);
  ops.load.assign(n, 0.0);
  ops.vertex_mass.assign(mesh.num_vertices(), 0.0);

  std::vector<Triplet> triplets;
  triplets.reserve(9 * static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    double gx[3], gy[3];
    for (int k = 0; k < 3; ++k) {
      const Point& b = mesh.vertices[tri[(k + 1) % 3]];
      const Point& c = mesh.vertices[tri[(k + 2) % 3]];
      gx[k] = (b.y - c.y) / (2.0 * area);
      gy[k] = (c.x - b.x) / (2.0 * area);
    }
    for (int a = 0; a < 3; ++a) {
      ops.vertex_mass[tri[a]] += area / 3.0;
      const auto ia = mesh.interior_index[tri[a]];
      if (!ia) {
        continue;
      }
      for (int b = 0; b < 3; ++b) {
        const auto ib = mesh.interior_index[tri[b]];
        if (ib) {
          triplets.push_back({*ia, *ib, area * (gx[a] * gx[b] + gy[a] * gy[b])});
        }
      }
    }
  }
  ops.stiffness = SparseMatrix::from_triplets(n, n, std::move(triplets));
  for (int i = 0; i < n; ++i) {
    const int v = mesh.interior_vertices[i];
    ops.mass[i] = ops.vertex_mass[v];
    ops.load[i] = ops.mass[i] * forcing_value(forcing, mesh.vertices[v]);
  }
  return ops;
}

EnergyModel assemble(const ModelParams& params, const Hierarchy& hierarchy)
{
  if (!(params.p >= 2.0)) {
    throw std::invalid_argument("assemble: p must be >= 2");
  }
  if (!(params.eps2 > 0.0)) {
    throw std::invalid_argument("assemble: eps2 must be > 0");
  }
  if (hierarchy.empty()) {
    throw std::invalid_argument("assemble: empty hierarchy");
  }
  std::vector<LevelOperators> levels;
  levels.reserve(hierarchy.size());
  for (const auto& mesh : hierarchy) {
    levels.push_back(assemble_level(mesh, params.forcing));
  }
  return EnergyModel(params, std::move(levels));
}

} // namespace fasd
