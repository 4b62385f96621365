/** @file

    @brief Step-size rules for a subspace search direction s at iterate v,
    acting on the section f(alpha) = E(v + alpha s): exact minimization,
    the quadratic model step -f'(0) / (L ||s||^2), and the unit step.
*/

#ifndef FASD_LINESEARCH_HPP
#define FASD_LINESEARCH_HPP

#include "fasd/fem.hpp"

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace fasd {

enum class StepMode { Exact, Quadratic, Unit };
enum class LipschitzMode { Local, Global };

StepMode parse_step_mode(std::string_view name);
std::string to_string(StepMode m);
LipschitzMode parse_lipschitz_mode(std::string_view name);
std::string to_string(LipschitzMode m);

struct StepResult {
  double alpha = 1.0;
  StepMode mode = StepMode::Unit;
  int inner_iterations = 0;
  double f0 = std::numeric_limits<double>::quiet_NaN();
  double f_alpha = std::numeric_limits<double>::quiet_NaN();
};

/// A one-dimensional energy section and its first two derivatives.
/// `value` may be left empty when only the step is wanted.
struct Section1D {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> curvature;
};

/// Newton on f' inside [0, a_hi], a_hi doubling from 1 until f'(a_hi) > 0.
/// Stops at |f'(alpha)| <= tol * max(1, |f'(0)|).
StepResult exact_line_search(const Section1D& section, double tol = 1e-12, int max_iter = 50);

StepResult quadratic_step(double slope0, double lipschitz, double s_normsq);

StepResult unit_step();

struct LipschitzEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

/**
   Global: largest eigenvalue of E''(u) relative to the stiffness matrix, by 20
   steps of power iteration in the A-inner product. Local: the curvature of
   the section along `direction`, <E''(u) s, s> / (s . A s).
*/
LipschitzEstimate estimate_lipschitz(const EnergyModel& model, int level,
                                     std::span<const double> u, LipschitzMode mode,
                                     std::span<const double> direction = {});

} // namespace fasd

#endif // FASD_LINESEARCH_HPP
