/** @file

    @brief Outer iterations of the subspace correction methods and their
    traces.
*/

#ifndef FASD_SOLVERS_HPP
#define FASD_SOLVERS_HPP

#include "fasd/config.hpp"
#include "fasd/engine.hpp"
#include "fasd/plan.hpp"
#include "fasd/problem.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fasd {

struct NewtonSolve {
  Vector x;
  int iterations = 0;
  double residual = 0.0; ///< ||E'(x) - rhs||_2
};

/**
   Damped Newton for E_level'(eta) = rhs from `init`: the step is halved
   while the merit E_level(eta) - rhs . eta increases. Stops when the
   Euclidean residual is at most `tol`, after at least one update unless the
   start is an exact root. Throws NonConvergenceError after `max_iter` steps.
*/
NewtonSolve coarse_newton_solve(const EnergyModel& model, int level, std::span<const double> rhs,
                                std::span<const double> init, double tol = 1e-10,
                                int max_iter = 100);

/// One sweep of exact nodal minimizations over the finest level.
void sso_step(SubspaceEngine& engine, const CorrectionObserver& observer = {});

/// Every entry of the plan once, in order.
void outer_iterate(SubspaceEngine& engine, const SubspacePlan& plan,
                   const CorrectionObserver& observer = {});

/// Minimizer of the finest-level energy by damped Newton with CG inner
/// solves, to a Euclidean gradient norm of `tol`.
Vector reference_minimizer(const Problem& problem, double tol = 1e-12, int max_iter = 100);

enum class SolveStatus { Converged, MaxIter, Diverged };

std::string to_string(SolveStatus s);

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0; ///< dual norm of E'(u^k)
  /// E(u^k) - E(u*), NaN without a reference.
  double gap = std::numeric_limits<double>::quiet_NaN();
  /// E(u^k) - E(u^{k+1}), NaN on the last record.
  double decrease = std::numeric_limits<double>::quiet_NaN();
  /// Sum of ||d||_A^2 over the corrections of the cycle that produced u^k.
  double correction_normsq = 0.0;
  /// Cumulative time spent in cycles up to u^k.
  double seconds = 0.0;
  std::vector<double> steps;
};

struct IterationTrace {
  Variant variant = Variant::FAS;
  SolveStatus status = SolveStatus::MaxIter;
  std::vector<IterationRecord> records;
  int iterations = 0;
  double rate = 0.0;
  /// Largest d_{k+1}/d_k over k >= 1 with d_k > 1e-12, NaN without a reference.
  double gap_rate = std::numeric_limits<double>::quiet_NaN();
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double cycle_seconds = 0.0;
  double wall_seconds = 0.0;
  Vector solution;
  std::string message;
};

struct SolveOptions {
  std::optional<Vector> initial;
  /// Minimizer used for the gaps d_k.
  std::optional<Vector> reference;
  CorrectionObserver observer;
  bool record_steps = false;
};

/// An energy increase or a non-finite iterate; carries the trace so far.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, IterationTrace trace)
    : std::runtime_error(what), trace_(std::move(trace))
  {
  }
  const IterationTrace& trace() const { return trace_; }

private:
  IterationTrace trace_;
};

/**
   Iterates from u^0 = 0 (or options.initial) until the dual gradient norm
   drops to outer_tol * max(1, q_0) or outer_max_iter cycles have run.
   The observed rate is (q_K / q_1)^{1/(K-1)}, or q_1 / q_0 when K = 1.
*/
IterationTrace solve(const Problem& problem, const SolverConfig& config,
                     const SolveOptions& options = {});

} // namespace fasd

#endif // FASD_SOLVERS_HPP
