#include "fasd/linesearch.hpp"

#include "fasd/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace fasd {

StepMode parse_step_mode(std::string_view name)
{
  if (name == "exact") {
    return StepMode::Exact;
  }
  if (name == "quadratic") {
    return StepMode::Quadratic;
  }
  if (name == "unit") {
    return StepMode::Unit;
  }
  throw std::invalid_argument("unknown step '" + std::string(name) + "' (exact | quadratic | unit)");
}

std::string to_string(StepMode m)
{
  switch (m) {
  case StepMode::Exact:
    return "exact";
  case StepMode::Quadratic:
    return "quadratic";
  case StepMode::Unit:
    return "unit";
  }
  return "?";
}

LipschitzMode parse_lipschitz_mode(std::string_view name)
{
  if (name == "local") {
    return LipschitzMode::Local;
  }
  if (name == "global") {
    return LipschitzMode::Global;
  }
  throw std::invalid_argument("unknown lipschitz mode '" + std::string(name) + "' (local | global)");
}

std::string to_string(LipschitzMode m)
{
  return m == LipschitzMode::Local ? "local" : "global";
}

StepResult exact_line_search(const Section1D& section, double tol, int max_iter)
{
  if (!section.slope || !section.curvature) {
    throw std::invalid_argument("exact_line_search: slope and curvature are required");
  }
  const double slope0 = section.slope(0.0);
  if (!(slope0 < 0.0)) {
    throw NotDescentError("exact_line_search: f'(0) = " + std::to_string(slope0) +
                          " is not negative");
  }
  constexpr double max_hi = 1152921504606846976.0; // 2^60
  double hi = 1.0;
  double slope_hi = section.slope(hi);
  while (slope_hi <= 0.0) {
    if (slope_hi == 0.0) {
      break;
    }
    hi *= 2.0;
    if (hi > max_hi) {
      throw NonConvergenceError("exact_line_search: no bracket below 2^60, section unbounded");
    }
    slope_hi = section.slope(hi);
  }

  StepResult out;
  out.mode = StepMode::Exact;
  if (slope_hi == 0.0) {
    out.alpha = hi;
  } else {
    const double abs_tol = tol * std::max(1.0, std::abs(slope0));
    const ScalarRoot root = scalar_newton(section.slope, section.curvature, std::min(1.0, hi),
                                          abs_tol, max_iter, std::make_pair(0.0, hi));
    if (!root.converged) {
      throw NonConvergenceError("exact_line_search: |f'(alpha)| = " +
                                std::to_string(std::abs(root.residual)) + " after " +
                                std::to_string(root.iterations) + " iterations");
    }
    out.alpha = root.x;
    out.inner_iterations = root.iterations;
  }
  if (section.value) {
    out.f0 = section.value(0.0);
    out.f_alpha = section.value(out.alpha);
  }
  return out;
}

StepResult quadratic_step(double slope0, double lipschitz, double s_normsq)
{
  if (!(slope0 < 0.0) || !(lipschitz > 0.0) || !(s_normsq > 0.0) || !std::isfinite(slope0) ||
      !std::isfinite(lipschitz) || !std::isfinite(s_normsq)) {
    throw std::invalid_argument("quadratic_step: need slope0 < 0, L > 0, ||s||^2 > 0");
  }
  StepResult out;
  out.mode = StepMode::Quadratic;
  out.alpha = -slope0 / (lipschitz * s_normsq);
  return out;
}

StepResult unit_step()
{
  return StepResult{};
}

LipschitzEstimate estimate_lipschitz(const EnergyModel& model, int level,
                                     std::span<const double> u, LipschitzMode mode,
                                     std::span<const double> direction)
{
  const auto& a = model.level(level).stiffness;
  if (mode == LipschitzMode::Local) {
    if (direction.size() != u.size()) {
      throw std::invalid_argument("estimate_lipschitz: local mode needs a direction");
    }
    const double s_as = dot(direction, spmv(a, direction));
    if (!(s_as > 0.0)) {
      throw std::invalid_argument("estimate_lipschitz: zero direction");
    }
    const Vector hs = model.hessian_apply(level, u, direction);
    return {dot(direction, hs) / s_as, 0, true};
  }

  constexpr int steps = 20;
  const int cg_iter = std::max(100, 10 * a.rows());
  Vector x(u.size(), 1.0);
  LipschitzEstimate out;
  out.converged = false;
  double previous = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Vector hx = model.hessian_apply(level, u, x);
    const double rq = dot(x, hx) / dot(x, spmv(a, x));
    out.value = rq;
    out.iterations = k + 1;
    if (k > 0 && std::abs(rq - previous) <= 1e-8 * std::abs(rq)) {
      out.converged = true;
      break;
    }
    previous = rq;
    const CgResult cg = cg_solve(a, hx, 1e-12, cg_iter);
    x = cg.x;
    const double xnorm = std::sqrt(dot(x, spmv(a, x)));
    if (!(xnorm > 0.0)) {
      break;
    }
    for (double& xi : x) {
      xi /= xnorm;
    }
  }
  return out;
}

} // namespace fasd
