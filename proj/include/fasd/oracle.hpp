/** @file

    @brief Brute-force references for the test suites: finite differences,
    golden-section search, dense elimination and eigenvalues, a damped
    fixed-point nonlinear solve and a dense linear two-grid iteration.

    Nothing here calls the sparse kernels or solvers it is used to check.
*/

#ifndef FASD_ORACLE_HPP
#define FASD_ORACLE_HPP

#include "fasd/fem.hpp"
#include "fasd/linalg.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fasd::oracle {

/// Row-major dense matrix.
using Dense = std::vector<Vector>;

struct OracleReport {
  std::string name;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  int samples = 0;
  double tolerance = 0.0;
  bool pass = false;
};

Dense to_dense(const SparseMatrix& a);
Dense dense_multiply(const Dense& a, const Dense& b);
Dense dense_transpose(const Dense& a);
Vector dense_apply(const Dense& a, const Vector& x);

/// Gaussian elimination with partial pivoting.
Vector dense_solve(Dense a, Vector b);

/// Eigenvalues of K x = lambda B x (K symmetric, B SPD), ascending, by a
/// Cholesky reduction and cyclic Jacobi rotations.
Vector generalized_eigenvalues(const Dense& k, const Dense& b);

/**
   Central differences of model.energy against model.gradient at u. The
   relative error is taken against max(1e-12, ||gradient||_inf).
*/
OracleReport fd_gradient_check(const EnergyModel& model, int level, const Vector& u,
                               double step = 1e-6, double tol = 1e-6);

double golden_section(const std::function<double(double)>& phi, double lo, double hi,
                      double tol = 1e-10);

double bisection(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/**
   Minimizer of (1/p) sum m_i |u_i|^p + (eps2/2) u.A u - b.u by the damped
   Picard iteration u <- (1 - w) u + w (diag(m |u|^{p-2}) + eps2 A)^{-1} b with
   dense solves, until successive iterates differ by at most tol.
*/
Vector fixed_point_minimizer(const Dense& a, const Vector& mass, const Vector& load, double p,
                             double eps2, double damping = 0.5, double tol = 1e-14,
                             int max_iter = 10000);

/**
   Linear two-grid iteration for A_f x = b from x0: `pre` forward Gauss-Seidel
   sweeps, the coarse correction x += I A_c^{-1} I^T (b - A_f x), then `post`
   backward sweeps. Returns x_1 .. x_iterations.
*/
std::vector<Vector> linear_twogrid_reference(const Dense& a_fine, const Dense& a_coarse,
                                             const Dense& prolongation, const Vector& b,
                                             const Vector& x0, int pre, int post,
                                             int iterations);

} // namespace fasd::oracle

#endif // FASD_ORACLE_HPP
