#ifndef GAPSTRESS_SOLVER_HPP
#define GAPSTRESS_SOLVER_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "gapstress/linalg.hpp"

namespace gapstress {

struct CsrMatrix {
  int n = 0;
  std::vector<int> rowptr;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const DVec& x, DVec& y) const;
  DVec residual(const DVec& x, const DVec& b) const;  // b - A x
};

/// Builds a CSR pattern from (row, col) pairs, then accumulates values.
class CsrBuilder {
 public:
  explicit CsrBuilder(int n) : n_(n), entries_(n) {}
  void reserve_row(int i, std::size_t count) { entries_[i].reserve(count); }
  void add(int i, int j, double v);
  CsrMatrix finish() const;

 private:
  int n_;
  std::vector<std::vector<std::pair<int, double>>> entries_;
};

/// Direct SPD solver for matrices that are banded after a permutation except
/// for a small dense tail block (ring-closure columns, rigid-motion dofs).
/// Factorization: banded Cholesky of the leading block, dense Cholesky of the
/// Schur complement of the tail.
class BandSchurSolver {
 public:
  /// `order` lists old dof indices in the new order; the last `n_tail` entries
  /// form the tail block. The permuted leading block must be banded.
  BandSchurSolver(const CsrMatrix& a, std::vector<int> order, int n_tail);

  DVec solve(const DVec& rhs) const;

  /// solve + iterative refinement against the CSR operator
  DVec solve_refined(const CsrMatrix& a, const DVec& rhs, int rounds = 2) const;

  int bandwidth() const { return band_; }

 private:
  void band_solve(DVec& x) const;  // in-place, leading block only

  int n_ = 0;
  int nb_ = 0;
  int band_ = 0;
  std::vector<int> order_;    // new -> old
  std::vector<int> rank_;     // old -> new
  std::vector<double> bandL_;  // lower band storage, row-major (nb x (band+1))
  std::vector<std::vector<std::pair<int, double>>> tail_cols_;  // E columns (band rows)
  DMat schurL_;               // dense Cholesky factor of the Schur complement
};

struct PcgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients with block-Jacobi (2x2 nodal blocks) preconditioning.
PcgResult pcg_solve(const CsrMatrix& a, const DVec& b, DVec& x, double rel_tol = 1e-10,
                    int max_iter = 200000);

}  // namespace gapstress

#endif
