#include "fasd/solvers.hpp"

#include "fasd/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fasd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool all_finite(std::span<const double> x)
{
  return std::all_of(x.begin(), x.end(), [](double t) { return std::isfinite(t); });
}

double residual_norm(const EnergyModel& model, int level, std::span<const double> x,
                     std::span<const double> rhs, Vector& grad)
{
  grad = model.gradient(level, x);
  axpy(-1.0, rhs, grad);
  return norm2(grad);
}

} // namespace

NewtonSolve coarse_newton_solve(const EnergyModel& model, int level, std::span<const double> rhs,
                                std::span<const double> init, double tol, int max_iter)
{
  const int n = model.size(level);
  if (static_cast<int>(rhs.size()) != n || static_cast<int>(init.size()) != n) {
    throw std::invalid_argument("coarse_newton_solve: vectors do not match level " +
                                std::to_string(level));
  }
  NewtonSolve out;
  out.x.assign(init.begin(), init.end());
  Vector grad;
  double res = residual_norm(model, level, out.x, rhs, grad);
  const int cg_iter = std::max(200, 10 * n);
  for (int it = 0;; ++it) {
    out.iterations = it;
    out.residual = res;
    if (!std::isfinite(res)) {
      throw NonConvergenceError("Newton on level " + std::to_string(level) +
                                ": non-finite residual");
    }
    if (res == 0.0 || (res <= tol && it > 0)) {
      return out;
    }
    if (it >= max_iter) {
      throw NonConvergenceError("Newton on level " + std::to_string(level) + ": residual " +
                                std::to_string(res) + " after " + std::to_string(max_iter) +
                                " iterations");
    }
    Vector minus_grad(grad.size());
    std::transform(grad.begin(), grad.end(), minus_grad.begin(), [](double t) { return -t; });
    const CgResult cg = cg_solve(model.hessian_matrix(level, out.x), minus_grad, 1e-13, cg_iter);
    const Vector& delta = cg.x;

    // full step when it lowers the merit or the residual, otherwise halve
    // until the merit E(eta) - rhs . eta decreases
    Vector trial(n);
    Vector trial_grad;
    double trial_res = 0.0;
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving <= 40 && !accepted; ++halving, t *= 0.5) {
      for (int i = 0; i < n; ++i) {
        trial[i] = out.x[i] + t * delta[i];
      }
      const double change = model.energy_difference(level, out.x, trial) - t * dot(rhs, delta);
      if (change <= 0.0 || halving == 0) {
        trial_res = residual_norm(model, level, trial, rhs, trial_grad);
        accepted = change <= 0.0 || trial_res < res;
      }
    }
    if (!accepted) {
      throw NonConvergenceError("Newton on level " + std::to_string(level) +
                                ": no decrease along the Newton direction (residual " +
                                std::to_string(res) + ")");
    }
    out.x = std::move(trial);
    grad = std::move(trial_grad);
    res = trial_res;
  }
}

void sso_step(SubspaceEngine& engine, const CorrectionObserver& observer)
{
  const int finest = engine.problem().finest();
  const int n = engine.problem().model().size(finest);
  for (int i = 0; i < n; ++i) {
    const Correction c = engine.correct({finest, i, false});
    if (observer) {
      observer(c, engine);
    }
  }
}

void outer_iterate(SubspaceEngine& engine, const SubspacePlan& plan,
                   const CorrectionObserver& observer)
{
  for (const auto& where : plan.entries) {
    const Correction c = engine.correct(where);
    if (observer) {
      observer(c, engine);
    }
  }
}

Vector reference_minimizer(const Problem& problem, double tol, int max_iter)
{
  const EnergyModel& model = problem.model();
  const int finest = model.finest();
  const Vector zero(model.size(finest), 0.0);
  return coarse_newton_solve(model, finest, zero, zero, tol, max_iter).x;
}

std::string to_string(SolveStatus s)
{
  switch (s) {
  case SolveStatus::Converged: return "converged";
  case SolveStatus::MaxIter: return "maxiter";
  case SolveStatus::Diverged: return "diverged";
  }
  return "?";
}

namespace {

void finish(IterationTrace& trace)
{
  const auto& rec = trace.records;
  const int k = static_cast<int>(rec.size()) - 1;
  trace.iterations = k;
  trace.initial_residual = rec.front().residual;
  trace.final_residual = rec.back().residual;
  if (k >= 2 && rec[1].residual > 0.0) {
    trace.rate = std::pow(rec[k].residual / rec[1].residual, 1.0 / (k - 1));
  } else if (k == 1 && rec[0].residual > 0.0) {
    trace.rate = rec[1].residual / rec[0].residual;
  } else {
    trace.rate = 0.0;
  }
  if (!std::isnan(rec.front().gap)) {
    double worst = 0.0;
    for (int i = 1; i < k; ++i) {
      if (rec[i].gap > 1e-12) {
        worst = std::max(worst, rec[i + 1].gap / rec[i].gap);
      }
    }
    trace.gap_rate = worst;
  }
}

} // namespace

IterationTrace solve(const Problem& problem, const SolverConfig& config,
                     const SolveOptions& options)
{
  const auto wall0 = Clock::now();
  config.validate();
  const EnergyModel& model = problem.model();
  const int finest = model.finest();
  const int n = model.size(finest);
  const SubspacePlan plan = build_plan(problem, config.decomposition, config.sweep_order);

  Vector u = options.initial ? *options.initial : Vector(n, 0.0);
  if (static_cast<int>(u.size()) != n) {
    throw std::invalid_argument("solve: initial iterate has the wrong size");
  }
  const Vector* ref = options.reference ? &*options.reference : nullptr;
  if (ref && static_cast<int>(ref->size()) != n) {
    throw std::invalid_argument("solve: reference minimizer has the wrong size");
  }

  IterationTrace trace;
  trace.variant = config.variant;
  SubspaceEngine engine(problem, config, u);

  auto dual_norm = [&](const Vector& g) {
    return problem.dual_norm(g, config.stopping_norm).value;
  };
  auto fill_record = [&](IterationRecord& r, const Vector& x) {
    r.energy = model.energy(finest, x);
    r.residual = dual_norm(engine.gradient());
    if (ref) {
      r.gap = model.energy_difference(finest, *ref, x);
    }
  };

  IterationRecord first;
  fill_record(first, u);
  trace.records.push_back(first);
  const double threshold = config.outer_tol * std::max(1.0, first.residual);

  double cycle_seconds = 0.0;
  auto diverged = [&](const std::string& why) {
    trace.cycle_seconds = cycle_seconds;
    trace.status = SolveStatus::Diverged;
    trace.solution = engine.iterate();
    finish(trace);
    trace.wall_seconds = seconds_since(wall0);
    trace.message = to_string(config.variant) + " diverged: " + why;
    return DivergenceError(trace.message, trace);
  };

  double residual = first.residual;
  const bool need_global = config.step == StepMode::Quadratic &&
                           config.lipschitz == LipschitzMode::Global;
  for (int k = 1; residual > threshold && k <= config.outer_max_iter; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    auto observer = [&](const Correction& c, const SubspaceEngine& e) {
      rec.correction_normsq += c.s_normsq;
      if (options.record_steps) {
        rec.steps.push_back(c.step.alpha);
      }
      if (options.observer) {
        options.observer(c, e);
      }
    };

    const auto t0 = Clock::now();
    try {
      if (need_global) {
        engine.set_global_lipschitz(
            estimate_lipschitz(model, finest, engine.iterate(), LipschitzMode::Global).value);
      }
      if (config.variant == Variant::SSO) {
        sso_step(engine, observer);
      } else {
        outer_iterate(engine, plan, observer);
      }
    } catch (const NonConvergenceError& e) {
      cycle_seconds += seconds_since(t0);
      const double rise = model.energy_difference(finest, u, engine.iterate());
      if (!all_finite(engine.iterate()) || !(rise <= config.divergence_tol)) {
        throw diverged(std::string("local solve failed after the energy rose (") + e.what() + ")");
      }
      throw;
    }
    cycle_seconds += seconds_since(t0);
    rec.seconds = cycle_seconds;

    const Vector& next = engine.iterate();
    if (!all_finite(next)) {
      throw diverged("non-finite iterate in cycle " + std::to_string(k));
    }
    const double change = model.energy_difference(finest, u, next);
    if (!std::isfinite(change) || change > config.divergence_tol) {
      throw diverged("energy rose by " + std::to_string(change) + " in cycle " +
                     std::to_string(k));
    }
    fill_record(rec, next);
    auto& prev = trace.records.back();
    prev.decrease = ref ? prev.gap - rec.gap : -change;
    residual = rec.residual;
    if (!std::isfinite(residual)) {
      throw diverged("non-finite residual in cycle " + std::to_string(k));
    }
    trace.records.push_back(std::move(rec));
    u = next;
  }

  trace.status = residual <= threshold ? SolveStatus::Converged : SolveStatus::MaxIter;
  trace.solution = std::move(u);
  trace.cycle_seconds = cycle_seconds;
  finish(trace);
  trace.wall_seconds = seconds_since(wall0);
  return trace;
}

} // namespace fasd
