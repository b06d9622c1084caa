#include "gapstress/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace gapstress {

double DMat::symmetry_defect() const {
  if (rows_ != cols_) return 1.0;
  double defect = 0.0;
  double scale = max_abs();
  if (scale == 0.0) return 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      defect = std::max(defect, std::fabs((*this)(i, j) - (*this)(j, i)));
  return defect / scale;
}

double dot(const DVec& a, const DVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const DVec& a) { return std::sqrt(dot(a, a)); }

DVec matvec(const DMat& a, const DVec& x) {
  DVec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

DVec solve_dense(DMat a, DVec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_dense: shape mismatch");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::fabs(a(i, k)) > best) {
        best = std::fabs(a(i, k));
        piv = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      a(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  DVec x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

double det_dense(DMat a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("det_dense: square matrix required");
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::fabs(a(i, k)) > best) {
        best = std::fabs(a(i, k));
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

DVec solve_spd(DMat a, DVec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_spd: shape mismatch");
  // in-place lower Cholesky
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0) throw std::runtime_error("solve_spd: matrix not positive definite");
    a(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / a(j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * b[k];
    b[ii] = s / a(ii, ii);
  }
  return b;
}

double min_eigenvalue_sym(const DMat& a) {
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;
  if (n == 1) return a(0, 0);
  // Gershgorin bracket, then bisection on the sign of det(A - s I) pivots.
  double lo = a(0, 0), hi = a(0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::fabs(a(i, j));
    lo = std::min(lo, a(i, i) - r);
    hi = std::max(hi, a(i, i) + r);
  }
  auto count_below = [&](double s) {
    // number of eigenvalues < s via LDL^T inertia (no pivoting; fall back on tiny shifts)
    DMat m = a;
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= s;
    int neg = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double d = m(k, k);
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++neg;
      for (std::size_t i = k + 1; i < n; ++i) {
        double f = m(i, k) / d;
        for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      }
    }
    return neg;
  };
  double scale = std::max(std::fabs(lo), std::fabs(hi));
  if (scale == 0.0) return 0.0;
  double tol = 1e-14 * scale;
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace gapstress
