#include "fasd/linalg.hpp"

#include "fasd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fasd {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what)
{
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(got) + " vs " + std::to_string(want) + ")");
  }
}

} // namespace

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
                           std::vector<int> col_indices, std::vector<double> values)
  : rows_(rows), cols_(cols), row_offsets_(std::move(row_offsets)),
    col_indices_(std::move(col_indices)), values_(std::move(values))
{
  if (rows < 0 || cols < 0 || row_offsets_.size() != static_cast<std::size_t>(rows) + 1 ||
      col_indices_.size() != values_.size() ||
      row_offsets_.back() != static_cast<int>(values_.size()) || row_offsets_.front() != 0) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
  for (int i = 0; i < rows; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) {
      throw std::invalid_argument("SparseMatrix: row offsets must be nondecreasing");
    }
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= cols ||
          (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])) {
        throw std::invalid_argument("SparseMatrix: column indices must be strictly increasing");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<int> cols_out;
  std::vector<double> vals_out;
  cols_out.reserve(triplets.size());
  vals_out.reserve(triplets.size());

  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    while (k < triplets.size() && triplets[k].row == i) {
      const int j = triplets[k].col;
      if (j < 0 || j >= cols) {
        throw std::invalid_argument("SparseMatrix::from_triplets: column out of range");
      }
      double sum = 0.0;
      while (k < triplets.size() && triplets[k].row == i && triplets[k].col == j) {
        sum += triplets[k].value;
        ++k;
      }
      if (sum != 0.0) {
        cols_out.push_back(j);
        vals_out.push_back(sum);
      }
    }
    offsets[i + 1] = static_cast<int>(vals_out.size());
  }
  if (k != triplets.size()) {
    throw std::invalid_argument("SparseMatrix::from_triplets: row out of range");
  }
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::identity(int n)
{
  return diagonal(Vector(static_cast<std::size_t>(n), 1.0));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d)
{
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    t.push_back({static_cast<int>(i), static_cast<int>(i), d[i]});
  }
  const int n = static_cast<int>(d.size());
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::at(int i, int j) const
{
  const auto first = col_indices_.begin() + row_offsets_[i];
  const auto last = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[it - col_indices_.begin()] : 0.0;
}

Vector SparseMatrix::diagonal_entries() const
{
  Vector d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = at(static_cast<int>(i), static_cast<int>(i));
  }
  return d;
}

SparseMatrix SparseMatrix::transpose() const
{
  std::vector<int> offsets(static_cast<std::size_t>(cols_) + 1, 0);
  for (int j : col_indices_) {
    ++offsets[j + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<int> cols(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  for (int i = 0; i < rows_; ++i) {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const int pos = fill[col_indices_[k]]++;
      cols[pos] = i;
      vals[pos] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

Vector spmv(const SparseMatrix& a, std::span<const double> x)
{
  Vector y(static_cast<std::size_t>(a.rows()), 0.0);
  spmv_add(a, x, 1.0, y);
  return y;
}

void spmv_add(const SparseMatrix& a, std::span<const double> x, double alpha, std::span<double> y)
{
  require_size(x.size(), static_cast<std::size_t>(a.cols()), "spmv");
  require_size(y.size(), static_cast<std::size_t>(a.rows()), "spmv");
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (int k = off[i]; k < off[i + 1]; ++k) {
      sum += val[k] * x[col[k]];
    }
    y[i] += alpha * sum;
  }
}

Vector spmv_transpose(const SparseMatrix& a, std::span<const double> x)
{
  require_size(x.size(), static_cast<std::size_t>(a.rows()), "spmv_transpose");
  Vector y(static_cast<std::size_t>(a.cols()), 0.0);
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = off[i]; k < off[i + 1]; ++k) {
      y[col[k]] += val[k] * x[i];
    }
  }
  return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b)
{
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("multiply: inner dimensions differ");
  }
  std::vector<int> offsets(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  Vector accum(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<int> marker(static_cast<std::size_t>(b.cols()), -1);
  std::vector<int> row_cols;
  for (int i = 0; i < a.rows(); ++i) {
    row_cols.clear();
    for (int ka = a.row_offsets()[i]; ka < a.row_offsets()[i + 1]; ++ka) {
      const int k = a.col_indices()[ka];
      const double av = a.values()[ka];
      for (int kb = b.row_offsets()[k]; kb < b.row_offsets()[k + 1]; ++kb) {
        const int j = b.col_indices()[kb];
        if (marker[j] != i) {
          marker[j] = i;
          accum[j] = 0.0;
          row_cols.push_back(j);
        }
        accum[j] += av * b.values()[kb];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (int j : row_cols) {
      if (accum[j] != 0.0) {
        cols.push_back(j);
        vals.push_back(accum[j]);
      }
    }
    offsets[i + 1] = static_cast<int>(vals.size());
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix add_diagonal(const SparseMatrix& a, std::span<const double> d, double scale)
{
  require_size(d.size(), static_cast<std::size_t>(a.rows()), "add_diagonal");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonzeros()) + d.size());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      t.push_back({i, a.col_indices()[k], scale * a.values()[k]});
    }
    t.push_back({i, i, d[i]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

double dot(std::span<const double> x, std::span<const double> y)
{
  require_size(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * y[i];
  }
  return s;
}

double norm2(std::span<const double> x)
{
  return std::sqrt(dot(x, x));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  require_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] += alpha * x[i];
  }
}

void gs_sweep(const SparseMatrix& a, std::span<const double> b, std::span<double> x, bool reverse)
{
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("gs_sweep: matrix must be square");
  }
  require_size(b.size(), static_cast<std::size_t>(a.rows()), "gs_sweep");
  require_size(x.size(), static_cast<std::size_t>(a.rows()), "gs_sweep");
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();

  auto relax = [&](int i) {
    double diag = 0.0;
    double sum = b[i];
    for (int k = off[i]; k < off[i + 1]; ++k) {
      if (col[k] == i) {
        diag = val[k];
      } else {
        sum -= val[k] * x[col[k]];
      }
    }
    if (diag == 0.0) {
      throw SingularOperatorError("gs_sweep: zero diagonal entry in row " + std::to_string(i));
    }
    x[i] = sum / diag;
  };

  const int n = a.rows();
  if (reverse) {
    for (int i = n - 1; i >= 0; --i) {
      relax(i);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      relax(i);
    }
  }
}

void sgs_sweep(const SparseMatrix& a, std::span<const double> b, std::span<double> x)
{
  gs_sweep(a, b, x, false);
  gs_sweep(a, b, x, true);
}

CgResult cg_solve(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter)
{
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("cg_solve: matrix must be square");
  }
  require_size(b.size(), static_cast<std::size_t>(a.rows()), "cg_solve");
  const std::size_t n = b.size();
  CgResult result;
  result.x.assign(n, 0.0);

  Vector r(b.begin(), b.end());
  const double bnorm = norm2(b);
  double rr = dot(r, r);
  result.residual_norm = std::sqrt(rr);
  if (bnorm == 0.0) {
    result.converged = true;
    return result;
  }
  const double target = tol * bnorm;
  Vector p = r;
  Vector ap(n);
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= target) {
      result.converged = true;
      return result;
    }
    std::fill(ap.begin(), ap.end(), 0.0);
    spmv_add(a, p, 1.0, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw BreakdownError("cg_solve: non-positive curvature p^T A p = " + std::to_string(pap) +
                           " at iteration " + std::to_string(it));
    }
    const double alpha = rr / pap;
    axpy(alpha, p, result.x);
    axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = r[i] + beta * p[i];
    }
    result.iterations = it + 1;
    result.residual_norm = std::sqrt(rr);
    if (rr == 0.0) {
      break;
    }
  }
  result.converged = result.residual_norm <= target;
  return result;
}

CgResult pcg_solve(const SparseMatrix& a, std::span<const double> b, const Preconditioner& apply,
                   double tol, int max_iter)
{
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("pcg_solve: matrix must be square");
  }
  require_size(b.size(), static_cast<std::size_t>(a.rows()), "pcg_solve");
  const std::size_t n = b.size();
  CgResult result;
  result.x.assign(n, 0.0);
  Vector r(b.begin(), b.end());
  const double bnorm = norm2(b);
  result.residual_norm = bnorm;
  if (bnorm == 0.0) {
    result.converged = true;
    return result;
  }
  const double target = tol * bnorm;
  Vector z(n, 0.0);
  apply(r, z);
  Vector p = z;
  double rz = dot(r, z);
  Vector ap(n);
  for (int it = 0; it < max_iter && result.residual_norm > target; ++it) {
    std::fill(ap.begin(), ap.end(), 0.0);
    spmv_add(a, p, 1.0, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw BreakdownError("pcg_solve: non-positive curvature p^T A p = " + std::to_string(pap) +
                           " at iteration " + std::to_string(it));
    }
    const double alpha = rz / pap;
    axpy(alpha, p, result.x);
    axpy(-alpha, ap, r);
    result.iterations = it + 1;
    result.residual_norm = norm2(r);
    std::fill(z.begin(), z.end(), 0.0);
    apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = z[i] + beta * p[i];
    }
  }
  result.converged = result.residual_norm <= target;
  return result;
}

ScalarRoot scalar_newton(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double x0, double tol,
                         int max_iter, std::optional<std::pair<double, double>> bracket)
{
  // neg/pos: points with f < 0 and f > 0 seen so far
  double neg = std::numeric_limits<double>::quiet_NaN();
  double pos = std::numeric_limits<double>::quiet_NaN();
  if (bracket) {
    const double fa = f(bracket->first);
    const double fb = f(bracket->second);
    if (fa == 0.0) {
      return {bracket->first, 0.0, 0, true};
    }
    if (fb == 0.0) {
      return {bracket->second, 0.0, 0, true};
    }
    if ((fa < 0.0) == (fb < 0.0)) {
      throw std::invalid_argument("scalar_newton: supplied interval does not bracket a root");
    }
    neg = fa < 0.0 ? bracket->first : bracket->second;
    pos = fa < 0.0 ? bracket->second : bracket->first;
  }
  auto have_bracket = [&] { return !std::isnan(neg) && !std::isnan(pos); };

  ScalarRoot out;
  double x = x0;
  for (int it = 0;; ++it) {
    const double fx = f(x);
    if (!std::isfinite(fx)) {
      out.x = x;
      out.residual = fx;
      out.iterations = it;
      out.converged = false;
      return out;
    }
    if (fx < 0.0) {
      neg = x;
    } else if (fx > 0.0) {
      pos = x;
    }
    out.x = x;
    out.residual = fx;
    out.iterations = it;
    if (fx == 0.0 || (std::abs(fx) <= tol && it > 0)) {
      out.converged = true;
      return out;
    }
    if (it >= max_iter) {
      out.converged = std::abs(fx) <= tol;
      return out;
    }
    if (have_bracket() &&
        std::abs(pos - neg) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::abs(pos), std::abs(neg))) {
      out.converged = std::abs(fx) <= tol;
      return out;
    }

    const double d = df(x);
    double next = x - fx / d;
    const bool newton_ok = d != 0.0 && std::isfinite(next);
    if (have_bracket()) {
      const double lo = std::min(neg, pos);
      const double hi = std::max(neg, pos);
      if (!newton_ok || !(next > lo && next < hi)) {
        next = 0.5 * (lo + hi);
      }
    } else if (!newton_ok) {
      out.converged = false;
      return out;
    }
    x = next;
  }
}

} // namespace fasd
