#include "gapstress/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapstress {

void CsrMatrix::multiply(const DVec& x, DVec& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

DVec CsrMatrix::residual(const DVec& x, const DVec& b) const {
  DVec r(n, 0.0);
  multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  return r;
}

void CsrBuilder::add(int i, int j, double v) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) throw std::invalid_argument("CsrBuilder: index");
  entries_[i].emplace_back(j, v);
}

CsrMatrix CsrBuilder::finish() const {
  CsrMatrix m;
  m.n = n_;
  m.rowptr.assign(n_ + 1, 0);
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < n_; ++i) {
    row.assign(entries_[i].begin(), entries_[i].end());
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    int last = -1;
    for (const auto& [j, v] : row) {
      if (j == last) {
        m.val.back() += v;
      } else {
        m.col.push_back(j);
        m.val.push_back(v);
        last = j;
      }
    }
    m.rowptr[i + 1] = static_cast<int>(m.col.size());
  }
  return m;
}

BandSchurSolver::BandSchurSolver(const CsrMatrix& a, std::vector<int> order, int n_tail)
    : n_(a.n), order_(std::move(order)) {
  if (static_cast<int>(order_.size()) != n_)
    throw std::invalid_argument("BandSchurSolver: order size mismatch");
  nb_ = n_ - n_tail;
  rank_.assign(n_, -1);
  for (int r = 0; r < n_; ++r) rank_[order_[r]] = r;

  // bandwidth of the permuted leading block
  band_ = 0;
  for (int i = 0; i < n_; ++i) {
    const int pi = rank_[i];
    if (pi >= nb_) continue;
    for (int k = a.rowptr[i]; k < a.rowptr[i + 1]; ++k) {
      const int pj = rank_[a.col[k]];
      if (pj < nb_) band_ = std::max(band_, std::abs(pi - pj));
    }
  }

  // assemble the permuted blocks
  bandL_.assign(static_cast<std::size_t>(nb_) * (band_ + 1), 0.0);
  auto bl = [&](int i, int j) -> double& {  // i >= j, i - j <= band
    return bandL_[static_cast<std::size_t>(i) * (band_ + 1) + (i - j)];
  };
  const int nt = n_ - nb_;
  tail_cols_.assign(nt, {});
  DMat d(nt, nt);
  for (int i = 0; i < n_; ++i) {
    const int pi = rank_[i];
    for (int k = a.rowptr[i]; k < a.rowptr[i + 1]; ++k) {
      const int pj = rank_[a.col[k]];
      if (pi < nb_ && pj < nb_) {
        if (pi >= pj) bl(pi, pj) = a.val[k];
      } else if (pi < nb_ && pj >= nb_) {
        tail_cols_[pj - nb_].emplace_back(pi, a.val[k]);
      } else if (pi >= nb_ && pj >= nb_) {
        d(pi - nb_, pj - nb_) = a.val[k];
      }
    }
  }
  for (auto& c : tail_cols_)
    std::sort(c.begin(), c.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

  // banded Cholesky (lower)
  for (int j = 0; j < nb_; ++j) {
    double diag = bl(j, j);
    const int k0 = std::max(0, j - band_);
    for (int k = k0; k < j; ++k) diag -= bl(j, k) * bl(j, k);
    if (!(diag > 0.0))
      throw std::runtime_error("BandSchurSolver: leading block not positive definite");
    bl(j, j) = std::sqrt(diag);
    const int imax = std::min(nb_ - 1, j + band_);
    for (int i = j + 1; i <= imax; ++i) {
      double s = (i - j <= band_) ? bl(i, j) : 0.0;
      const int kk0 = std::max({0, i - band_, j - band_});
      for (int k = kk0; k < j; ++k) s -= bl(i, k) * bl(j, k);
      bl(i, j) = s / bl(j, j);
    }
  }

  // Schur complement S = D - E^T B^{-1} E, one tail column at a time
  DMat schur = d;
  DVec z(nb_);
  for (int j = 0; j < nt; ++j) {
    std::fill(z.begin(), z.end(), 0.0);
    for (const auto& [row, v] : tail_cols_[j]) z[row] = v;
    band_solve(z);
    for (int i = 0; i < nt; ++i) {
      double s = 0.0;
      for (const auto& [row, v] : tail_cols_[i]) s += v * z[row];
      schur(i, j) -= s;
    }
  }
  // symmetrize against roundoff and factor
  for (int i = 0; i < nt; ++i)
    for (int j = i + 1; j < nt; ++j) {
      const double m = 0.5 * (schur(i, j) + schur(j, i));
      schur(i, j) = schur(j, i) = m;
    }
  schurL_ = DMat(nt, nt);
  for (int j = 0; j < nt; ++j) {
    double diag = schur(j, j);
    for (int k = 0; k < j; ++k) diag -= schurL_(j, k) * schurL_(j, k);
    if (!(diag > 0.0))
      throw std::runtime_error("BandSchurSolver: Schur complement not positive definite");
    schurL_(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < nt; ++i) {
      double s = schur(i, j);
      for (int k = 0; k < j; ++k) s -= schurL_(i, k) * schurL_(j, k);
      schurL_(i, j) = s / schurL_(j, j);
    }
  }
}

void BandSchurSolver::band_solve(DVec& x) const {
  auto bl = [&](int i, int j) -> double {
    return bandL_[static_cast<std::size_t>(i) * (band_ + 1) + (i - j)];
  };
  for (int i = 0; i < nb_; ++i) {
    double s = x[i];
    const int k0 = std::max(0, i - band_);
    for (int k = k0; k < i; ++k) s -= bl(i, k) * x[k];
    x[i] = s / bl(i, i);
  }
  for (int i = nb_ - 1; i >= 0; --i) {
    double s = x[i];
    const int kmax = std::min(nb_ - 1, i + band_);
    for (int k = i + 1; k <= kmax; ++k) s -= bl(k, i) * x[k];
    x[i] = s / bl(i, i);
  }
}

DVec BandSchurSolver::solve(const DVec& rhs) const {
  const int nt = n_ - nb_;
  DVec rb(nb_), rt(nt);
  for (int r = 0; r < n_; ++r) {
    if (r < nb_)
      rb[r] = rhs[order_[r]];
    else
      rt[r - nb_] = rhs[order_[r]];
  }
  DVec y = rb;
  band_solve(y);
  // tail system
  DVec ft(nt);
  for (int i = 0; i < nt; ++i) {
    double s = 0.0;
    for (const auto& [row, v] : tail_cols_[i]) s += v * y[row];
    ft[i] = rt[i] - s;
  }
  // dense forward/back with schurL_
  for (int i = 0; i < nt; ++i) {
    double s = ft[i];
    for (int k = 0; k < i; ++k) s -= schurL_(i, k) * ft[k];
    ft[i] = s / schurL_(i, i);
  }
  for (int i = nt - 1; i >= 0; --i) {
    double s = ft[i];
    for (int k = i + 1; k < nt; ++k) s -= schurL_(k, i) * ft[k];
    ft[i] = s / schurL_(i, i);
  }
  // back-substitute into the leading block
  DVec xb = rb;
  for (int j = 0; j < nt; ++j)
    for (const auto& [row, v] : tail_cols_[j]) xb[row] -= v * ft[j];
  band_solve(xb);

  DVec x(n_);
  for (int r = 0; r < n_; ++r) x[order_[r]] = (r < nb_) ? xb[r] : ft[r - nb_];
  return x;
}

DVec BandSchurSolver::solve_refined(const CsrMatrix& a, const DVec& rhs, int rounds) const {
  DVec x = solve(rhs);
  for (int it = 0; it < rounds; ++it) {
    DVec r = a.residual(x, rhs);
    DVec dx = solve(r);
    for (int i = 0; i < n_; ++i) x[i] += dx[i];
  }
  return x;
}

PcgResult pcg_solve(const CsrMatrix& a, const DVec& b, DVec& x, double rel_tol,
                    int max_iter) {
  const int n = a.n;
  if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);
  // 2x2 nodal block-Jacobi preconditioner (dofs paired as 2i, 2i+1)
  std::vector<double> blocks(2 * n, 0.0);  // per block: inv stored as (a,b;b,d)
  for (int i = 0; i < n; i += 2) {
    double m00 = 1.0, m01 = 0.0, m11 = 1.0;
    for (int k = a.rowptr[i]; k < a.rowptr[i + 1]; ++k) {
      if (a.col[k] == i) m00 = a.val[k];
      if (a.col[k] == i + 1) m01 = a.val[k];
    }
    if (i + 1 < n)
      for (int k = a.rowptr[i + 1]; k < a.rowptr[i + 2]; ++k)
        if (a.col[k] == i + 1) m11 = a.val[k];
    const double det = m00 * m11 - m01 * m01;
    if (det <= 0.0) {
      blocks[i] = 1.0 / std::max(m00, 1e-300);
      blocks[i + 1] = 0.0;
      if (i + 1 < n) blocks[n + i] = 1.0 / std::max(m11, 1e-300);
    } else {
      blocks[i] = m11 / det;
      blocks[i + 1] = -m01 / det;
      if (i + 1 < n) blocks[n + i] = m00 / det;
    }
  }
  auto precond = [&](const DVec& r, DVec& z) {
    for (int i = 0; i < n; i += 2) {
      if (i + 1 < n) {
        z[i] = blocks[i] * r[i] + blocks[i + 1] * r[i + 1];
        z[i + 1] = blocks[i + 1] * r[i] + blocks[n + i] * r[i + 1];
      } else {
        z[i] = blocks[i] * r[i];
      }
    }
  };

  PcgResult out;
  DVec r = a.residual(x, b);
  const double bnorm = std::max(norm2(b), 1e-300);
  DVec z(n), p(n), q(n);
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iter; ++it) {
    a.multiply(p, q);
    const double alpha = rz / dot(p, q);
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rn = norm2(r);
    out.iterations = it + 1;
    out.relative_residual = rn / bnorm;
    if (rn / bnorm < rel_tol) {
      out.converged = true;
      return out;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return out;
}

}  // namespace gapstress
