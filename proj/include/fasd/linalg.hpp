/** @file

    @brief Sparse kernels: CSR storage, symmetric Gauss-Seidel, conjugate
    gradients, and a safeguarded scalar Newton iteration.
*/

#ifndef FASD_LINALG_HPP
#define FASD_LINALG_HPP

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fasd {

using Vector = std::vector<double>;

struct Triplet {
  int row;
  int col;
  double value;
};

/**
   @brief Compressed sparse row matrix.

   Column indices are strictly increasing within each row and no explicit
   zeros are stored.
*/
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
               std::vector<int> col_indices, std::vector<double> values);

  /// Duplicates are summed; entries that sum to exactly zero are dropped.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(std::span<const double> d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nonzeros() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  double at(int i, int j) const;
  Vector diagonal_entries() const;

  SparseMatrix transpose() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);
/// y += alpha * A x
void spmv_add(const SparseMatrix& a, std::span<const double> x, double alpha,
              std::span<double> y);
/// y = A^T x
Vector spmv_transpose(const SparseMatrix& a, std::span<const double> x);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// A + diag(d)
SparseMatrix add_diagonal(const SparseMatrix& a, std::span<const double> d, double scale = 1.0);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// One Gauss-Seidel sweep for A x = b in index order (or reverse), in place.
void gs_sweep(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
              bool reverse = false);

/// One forward then one backward Gauss-Seidel sweep for A x = b, in place.
void sgs_sweep(const SparseMatrix& a, std::span<const double> b, std::span<double> x);

struct CgResult {
  Vector x;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
};

/// Unpreconditioned CG from x = 0; stops at ||b - A x|| <= tol * ||b||.
CgResult cg_solve(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter);

/// z = B r for a symmetric positive definite B; z arrives zeroed.
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

/// Preconditioned CG from x = 0; stops at ||b - A x|| <= tol * ||b||.
CgResult pcg_solve(const SparseMatrix& a, std::span<const double> b, const Preconditioner& apply,
                   double tol, int max_iter);

struct ScalarRoot {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/**
   @brief Newton's method for f(x) = 0 with a bisection safeguard.

   A sign-change bracket is tracked from every evaluation (or supplied by the
   caller); Newton steps that leave it, or a vanishing derivative, fall back to
   bisection. At least one update is made unless f(x0) is exactly zero, so a
   starting point that already meets the tolerance is still polished.
*/
ScalarRoot scalar_newton(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double x0, double tol,
                         int max_iter,
                         std::optional<std::pair<double, double>> bracket = std::nullopt);

} // namespace fasd

#endif // FASD_LINALG_HPP
