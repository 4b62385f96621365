#include "fasd/engine.hpp"

#include "fasd/errors.hpp"
#include "fasd/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fasd {

SubspaceEngine::SubspaceEngine(const Problem& problem, const SolverConfig& config, Vector v)
  : problem_(problem), model_(problem.model()), config_(config)
{
  set_iterate(std::move(v));
}

void SubspaceEngine::set_iterate(Vector v)
{
  const int finest = model_.finest();
  if (static_cast<int>(v.size()) != model_.size(finest)) {
    throw std::invalid_argument("SubspaceEngine: iterate has " + std::to_string(v.size()) +
                                " entries, the finest level has " +
                                std::to_string(model_.size(finest)));
  }
  v_ = std::move(v);
  av_ = spmv(model_.level(finest).stiffness, v_);
  invalidate_xi();
}

void SubspaceEngine::invalidate_xi()
{
  xi_level_ = -1;
  xi_.clear();
}

const Vector& SubspaceEngine::xi(int level)
{
  if (xi_level_ != level) {
    xi_ = level == model_.finest() ? v_ : problem_.project_from_finest(level, v_, config_.projection);
    xi_level_ = level;
  }
  return xi_;
}

double SubspaceEngine::gradient_component(int j) const
{
  const auto& op = model_.level(model_.finest());
  return op.mass[j] * model_.power().flux(v_[j]) + model_.eps2() * av_[j] - op.load[j];
}

Vector SubspaceEngine::gradient() const
{
  Vector g(v_.size());
  for (std::size_t j = 0; j < v_.size(); ++j) {
    g[j] = gradient_component(static_cast<int>(j));
  }
  return g;
}

Section1D SubspaceEngine::section(const Correction& c) const
{
  const auto& mass = model_.level(model_.finest()).mass;
  const PowerLaw& pw = model_.power();
  const double eps2 = model_.eps2();
  const double p = model_.p();
  // <E'(v), d> minus the part carried by the nonlinear term, so the sections
  // below are differences that stay accurate for small alpha
  double nonlinear0 = 0.0;
  for (std::size_t k = 0; k < c.support.size(); ++k) {
    const int j = c.support[k];
    nonlinear0 += c.direction[k] * mass[j] * pw.flux(v_[j]);
  }
  const double linear = c.slope0 - nonlinear0;
  const double quad = eps2 * c.s_normsq;

  Section1D s;
  s.value = [this, &c, &mass, &pw, p, linear, quad](double alpha) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      const int j = c.support[k];
      sum += mass[j] * (pw.abs_pow(v_[j] + alpha * c.direction[k]) - pw.abs_pow(v_[j]));
    }
    return sum / p + alpha * linear + 0.5 * alpha * alpha * quad;
  };
  s.slope = [this, &c, &mass, &pw, linear, quad](double alpha) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      const int j = c.support[k];
      sum += c.direction[k] * mass[j] * pw.flux(v_[j] + alpha * c.direction[k]);
    }
    return sum + linear + alpha * quad;
  };
  s.curvature = [this, &c, &mass, &pw, p, quad](double alpha) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      const int j = c.support[k];
      const double d = c.direction[k];
      sum += d * d * mass[j] * pw.curvature(v_[j] + alpha * d);
    }
    return (p - 1.0) * sum + quad;
  };
  return s;
}

Correction SubspaceEngine::compute(const SubspaceDescriptor& where)
{
  if (where.level < 0 || where.level > model_.finest()) {
    throw std::invalid_argument("SubspaceEngine: no level " + std::to_string(where.level));
  }
  Correction c = where.is_nodal() && !where.exact ? compute_nodal(where) : compute_level(where);
  choose_step(c);
  return c;
}

Correction SubspaceEngine::compute_nodal(const SubspaceDescriptor& where)
{
  const int level = where.level;
  const int i = where.node;
  const auto& op = model_.level(level);
  if (i < 0 || i >= model_.size(level)) {
    throw std::invalid_argument("SubspaceEngine: no node " + std::to_string(i) + " on level " +
                                std::to_string(level));
  }
  const PowerLaw& pw = model_.power();
  const double eps2 = model_.eps2();

  Correction c;
  c.where = where;
  Vector weights;
  if (level == model_.finest()) {
    c.support = {i};
    weights = {1.0};
  } else {
    const SparseMatrix& r = problem_.restriction_from_finest(level);
    const auto begin = r.row_offsets()[i];
    const auto end = r.row_offsets()[i + 1];
    c.support.assign(r.col_indices().begin() + begin, r.col_indices().begin() + end);
    weights.assign(r.values().begin() + begin, r.values().begin() + end);
  }

  double residual = 0.0;
  for (std::size_t k = 0; k < c.support.size(); ++k) {
    residual += weights[k] * gradient_component(c.support[k]);
  }
  c.residual = residual;

  const double aii = op.stiffness.at(i, i);
  if (!(aii > 0.0)) {
    throw SingularOperatorError("zero stiffness diagonal at node " + std::to_string(i) +
                                " of level " + std::to_string(level));
  }
  const double m = op.mass[i];
  const double xi_i = config_.projection == ProjectionMode::Injection ? v_[i] : xi(level)[i];

  double s = 0.0;
  switch (config_.local_energy) {
  case LocalEnergy::Restricted: {
    const double c1 = eps2 * aii;
    const double c0 = m * pw.flux(xi_i) + c1 * xi_i - residual;
    auto f = [&](double t) { return m * pw.flux(t) + c1 * t - c0; };
    auto df = [&](double t) { return (model_.p() - 1.0) * m * pw.curvature(t) + c1; };
    const double root = c0 / c1;
    const ScalarRoot eta = scalar_newton(f, df, xi_i, config_.local_tol, config_.local_max_iter,
                                         std::make_pair(std::min(0.0, root), std::max(0.0, root)));
    if (!eta.converged) {
      throw NonConvergenceError("local Newton failed at node " + std::to_string(i) +
                                " of level " + std::to_string(level) + " (residual " +
                                std::to_string(eta.residual) + ")");
    }
    s = eta.x - xi_i;
    c.local_iterations = eta.iterations;
    break;
  }
  case LocalEnergy::QuadraticIdentity:
    s = -residual / aii;
    break;
  case LocalEnergy::QuadraticHessian:
    s = -residual / ((model_.p() - 1.0) * m * pw.curvature(xi_i) + eps2 * aii);
    break;
  case LocalEnergy::QuadraticScaled:
    s = -residual / (eps2 * aii);
    break;
  }

  c.local = {s};
  c.direction.resize(weights.size());
  const auto& mass = model_.level(model_.finest()).mass;
  double hess = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    c.direction[k] = s * weights[k];
    const int j = c.support[k];
    hess += c.direction[k] * c.direction[k] * mass[j] * pw.curvature(v_[j]);
  }
  c.s_normsq = s * s * aii;
  c.slope0 = s * residual;
  c.curvature0 = (model_.p() - 1.0) * hess + eps2 * c.s_normsq;
  return c;
}

Correction SubspaceEngine::compute_level(const SubspaceDescriptor& where)
{
  const int level = where.level;
  const int finest = model_.finest();
  const auto& op = model_.level(level);

  Correction c;
  c.where = where;
  const Vector g = gradient();
  const Vector r = level == finest ? g : problem_.restrict_from_finest(level, g);
  c.residual = norm2(r);
  const Vector& x = xi(level);

  Vector s(r.size(), 0.0);
  if (where.exact || config_.local_energy == LocalEnergy::Restricted) {
    Vector rhs = model_.gradient(level, x);
    axpy(-1.0, r, rhs);
    const NewtonSolve eta =
        coarse_newton_solve(model_, level, rhs, x, config_.coarse_tol, config_.coarse_max_iter);
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = eta.x[k] - x[k];
    }
    c.local_iterations = eta.iterations;
  } else {
    Vector minus_r(r.size());
    std::transform(r.begin(), r.end(), minus_r.begin(), [](double t) { return -t; });
    if (config_.local_energy == LocalEnergy::QuadraticIdentity) {
      sgs_sweep(op.stiffness, minus_r, s);
    } else if (config_.local_energy == LocalEnergy::QuadraticScaled) {
      for (double& t : minus_r) {
        t /= model_.eps2();
      }
      sgs_sweep(op.stiffness, minus_r, s);
    } else {
      sgs_sweep(model_.hessian_matrix(level, x), minus_r, s);
    }
    c.local_iterations = 1;
  }

  c.direction = level == finest ? s : problem_.prolongate_to_finest(level, s);
  c.local = std::move(s);
  c.support.resize(c.direction.size());
  std::iota(c.support.begin(), c.support.end(), 0);
  const auto& fine = model_.level(finest);
  c.s_normsq = dot(c.direction, spmv(fine.stiffness, c.direction));
  c.slope0 = dot(c.direction, g);
  double hess = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) {
    hess += c.direction[j] * c.direction[j] * fine.mass[j] * model_.power().curvature(v_[j]);
  }
  c.curvature0 = (model_.p() - 1.0) * hess + model_.eps2() * c.s_normsq;
  return c;
}

void SubspaceEngine::choose_step(Correction& c) const
{
  const StepMode mode = config_.step;
  const bool zero = !(c.s_normsq > 0.0);
  if (mode == StepMode::Unit) {
    c.step = unit_step();
  } else if (zero || !(c.slope0 < 0.0)) {
    // the local solve already sits at a stationary point along d
    c.step.alpha = 0.0;
    c.step.mode = mode;
  } else if (mode == StepMode::Exact) {
    c.step = exact_line_search(section(c), config_.line_search_tol, config_.line_search_max_iter);
  } else {
    const double lipschitz = config_.lipschitz == LipschitzMode::Local || !(global_lipschitz_ > 0.0)
                                 ? c.curvature0 / c.s_normsq
                                 : global_lipschitz_;
    c.step = quadratic_step(c.slope0, lipschitz, c.s_normsq);
  }
  c.energy_change = zero || c.step.alpha == 0.0 ? 0.0 : section(c).value(c.step.alpha);
}

void SubspaceEngine::apply(const Correction& c)
{
  const double alpha = c.step.alpha;
  if (alpha == 0.0 || !(c.s_normsq > 0.0)) {
    return;
  }
  const SparseMatrix& a = model_.level(model_.finest()).stiffness;
  if (c.support.size() == v_.size()) {
    axpy(alpha, c.direction, v_);
    spmv_add(a, c.direction, alpha, av_);
  } else {
    const auto& rows = a.row_offsets();
    const auto& cols = a.col_indices();
    const auto& vals = a.values();
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      const int j = c.support[k];
      const double dj = alpha * c.direction[k];
      v_[j] += dj;
      // stiffness is symmetric: column j equals row j
      for (int q = rows[j]; q < rows[j + 1]; ++q) {
        av_[cols[q]] += vals[q] * dj;
      }
    }
  }
  if (c.where.is_nodal() && !c.where.exact && xi_level_ == c.where.level) {
    xi_[c.where.node] += alpha * c.local[0];
  } else {
    invalidate_xi();
  }
}

Correction SubspaceEngine::correct(const SubspaceDescriptor& where)
{
  Correction c = compute(where);
  apply(c);
  return c;
}

} // namespace fasd
