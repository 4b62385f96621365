#include "fasd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fasd::oracle {

Dense to_dense(const SparseMatrix& a)
{
  Dense out(a.rows(), Vector(a.cols(), 0.0));
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      out[i][a.col_indices()[k]] = a.values()[k];
    }
  }
  return out;
}

Dense dense_multiply(const Dense& a, const Dense& b)
{
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  Dense c(n, Vector(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] != 0.0) {
        for (std::size_t j = 0; j < m; ++j) {
          c[i][j] += a[i][k] * b[k][j];
        }
      }
    }
  }
  return c;
}

Dense dense_transpose(const Dense& a)
{
  if (a.empty()) {
    return {};
  }
  Dense t(a[0].size(), Vector(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      t[j][i] = a[i][j];
    }
  }
  return t;
}

Vector dense_apply(const Dense& a, const Vector& x)
{
  Vector y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      s += a[i][j] * x[j];
    }
    y[i] = s;
  }
  return y;
}

Vector dense_solve(Dense a, Vector b)
{
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
        piv = r;
      }
    }
    if (a[piv][col] == 0.0) {
      throw std::runtime_error("dense_solve: singular matrix");
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) {
        continue;
      }
      for (std::size_t c = col; c < n; ++c) {
        a[r][c] -= f * a[col][c];
      }
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      s -= a[i][j] * x[j];
    }
    x[i] = s / a[i][i];
  }
  return x;
}

Vector generalized_eigenvalues(const Dense& k, const Dense& b)
{
  const std::size_t n = k.size();
  // B = L L^T
  Dense l(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = b[i][j];
      for (std::size_t q = 0; q < j; ++q) {
        s -= l[i][q] * l[j][q];
      }
      if (i == j) {
        if (!(s > 0.0)) {
          throw std::runtime_error("generalized_eigenvalues: B is not positive definite");
        }
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  // C = L^{-1} K L^{-T}: solve column by column
  auto lower_solve = [&](const Vector& rhs) {
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[i];
      for (std::size_t q = 0; q < i; ++q) {
        s -= l[i][q] * x[q];
      }
      x[i] = s / l[i][i];
    }
    return x;
  };
  Dense y(n); // y = L^{-1} K, stored by columns of K
  Dense kt = dense_transpose(k);
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = lower_solve(kt[j]);
  }
  Dense yt = dense_transpose(y); // L^{-1} K
  Dense c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = lower_solve(yt[i]); // row i of (L^{-1} K) L^{-T}
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (c[i][j] + c[j][i]);
      c[i][j] = c[j][i] = avg;
    }
  }

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        off += c[i][j] * c[i][j];
      }
    }
    if (off < 1e-30) {
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(c[p][q]) < 1e-300) {
          continue;
        }
        const double theta = (c[q][q] - c[p][p]) / (2.0 * c[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (std::size_t r = 0; r < n; ++r) {
          const double crp = c[r][p];
          const double crq = c[r][q];
          c[r][p] = cs * crp - sn * crq;
          c[r][q] = sn * crp + cs * crq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double cpr = c[p][r];
          const double cqr = c[q][r];
          c[p][r] = cs * cpr - sn * cqr;
          c[q][r] = sn * cpr + cs * cqr;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) {
    eig[i] = c[i][i];
  }
  std::sort(eig.begin(), eig.end());
  return eig;
}

OracleReport fd_gradient_check(const EnergyModel& model, int level, const Vector& u, double step,
                               double tol)
{
  OracleReport rep;
  rep.name = "fd_gradient";
  rep.tolerance = tol;
  const Vector g = model.gradient(level, u);
  double gmax = 0.0;
  for (double x : g) {
    gmax = std::max(gmax, std::abs(x));
  }
  Vector w = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    w[i] = u[i] + step;
    const double ep = model.energy(level, w);
    w[i] = u[i] - step;
    const double em = model.energy(level, w);
    w[i] = u[i];
    const double fd = (ep - em) / (2.0 * step);
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(fd - g[i]));
    ++rep.samples;
  }
  rep.max_rel_error = rep.max_abs_error / std::max(1e-12, gmax);
  rep.pass = rep.max_rel_error <= tol;
  return rep;
}

double golden_section(const std::function<double(double)>& phi, double lo, double hi, double tol)
{
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = phi(c);
  double fd = phi(d);
  while (b - a > tol) {
    if (fc == fd) {
      // a unimodal function has its minimizer between two equal values
      a = c;
      b = d;
      c = b - r * (b - a);
      d = a + r * (b - a);
      fc = phi(c);
      fd = phi(d);
    } else if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = phi(d);
    }
  }
  return 0.5 * (a + b);
}

double bisection(const std::function<double(double)>& f, double lo, double hi, double tol)
{
  double flo = f(lo);
  if ((flo < 0.0) == (f(hi) < 0.0)) {
    throw std::invalid_argument("bisection: no sign change");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vector fixed_point_minimizer(const Dense& a, const Vector& mass, const Vector& load, double p,
                             double eps2, double damping, double tol, int max_iter)
{
  const std::size_t n = load.size();
  Vector u(n, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    Dense k(n, Vector(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        k[i][j] = eps2 * a[i][j];
      }
      k[i][i] += mass[i] * std::pow(std::abs(u[i]), p - 2.0);
    }
    const Vector next = dense_solve(k, load);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (1.0 - damping) * u[i] + damping * next[i];
      change = std::max(change, std::abs(v - u[i]));
      u[i] = v;
    }
    if (change <= tol) {
      return u;
    }
  }
  throw std::runtime_error("fixed_point_minimizer: no convergence");
}

std::vector<Vector> linear_twogrid_reference(const Dense& a_fine, const Dense& a_coarse,
                                             const Dense& prolongation, const Vector& b,
                                             const Vector& x0, int pre, int post,
                                             int iterations)
{
  const std::size_t n = b.size();
  auto gauss_seidel = [&](Vector& x, bool backward) {
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = backward ? n - 1 - step : step;
      double s = b[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          s -= a_fine[i][j] * x[j];
        }
      }
      x[i] = s / a_fine[i][i];
    }
  };
  const Dense restriction = dense_transpose(prolongation);
  std::vector<Vector> out;
  Vector x = x0;
  for (int it = 0; it < iterations; ++it) {
    for (int s = 0; s < pre; ++s) {
      gauss_seidel(x, false);
    }
    Vector r = dense_apply(a_fine, x);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = b[i] - r[i];
    }
    const Vector ec = dense_solve(a_coarse, dense_apply(restriction, r));
    const Vector e = dense_apply(prolongation, ec);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += e[i];
    }
    for (int s = 0; s < post; ++s) {
      gauss_seidel(x, true);
    }
    out.push_back(x);
  }
  return out;
}

} // namespace fasd::oracle
