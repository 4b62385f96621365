#ifndef FASD_ERRORS_HPP
#define FASD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fasd {

/// A diagonal entry needed by a relaxation or a local solve is zero.
class SingularOperatorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations or could not bracket a root.
class NonConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Conjugate gradients met a direction of non-positive curvature.
class BreakdownError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A line search was asked to move along a direction that does not descend.
class NotDescentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fasd

#endif // FASD_ERRORS_HPP
