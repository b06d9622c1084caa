#ifndef GAPSTRESS_LINALG_HPP
#define GAPSTRESS_LINALG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gapstress {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// 2x2 matrix, entry (i,j) = m[i][j]; for displacement gradients (i,j) = d_j u^i.
struct Mat2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static Mat2 zero() { return {}; }
  static Mat2 outer(const Vec2& a, const Vec2& b) {
    Mat2 r;
    r.m[0][0] = a.x * b.x;
    r.m[0][1] = a.x * b.y;
    r.m[1][0] = a.y * b.x;
    r.m[1][1] = a.y * b.y;
    return r;
  }

  Mat2 operator+(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }
  Mat2 operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }
  Mat2 operator*(double s) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }
  Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] += o.m[i][j];
    return *this;
  }

  Mat2 sym() const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = 0.5 * (m[i][j] + m[j][i]);
    return r;
  }
  double trace() const { return m[0][0] + m[1][1]; }
  double frobenius() const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += m[i][j] * m[i][j];
    return std::sqrt(s);
  }
  double max_abs() const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s = std::max(s, std::fabs(m[i][j]));
    return s;
  }
};

inline Mat2 operator*(double s, const Mat2& a) { return a * s; }

/// Small dense row-major matrix. Sizes in this project stay at d(d+1)/2 <= 21.
class DMat {
 public:
  DMat() = default;
  DMat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DMat identity(std::size_t n) {
    DMat a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  DMat transposed() const {
    DMat a(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) a(j, i) = (*this)(i, j);
    return a;
  }

  double max_abs() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::fabs(v));
    return s;
  }

  double symmetry_defect() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using DVec = std::vector<double>;

double dot(const DVec& a, const DVec& b);
double norm2(const DVec& a);
DVec matvec(const DMat& a, const DVec& x);

/// Gaussian elimination with partial pivoting; throws on (near-)singular input.
DVec solve_dense(DMat a, DVec b);

/// Determinant via LU with partial pivoting (0 for singular input).
double det_dense(DMat a);

/// Cholesky solve for SPD systems; throws if a pivot is not strictly positive.
DVec solve_spd(DMat a, DVec b);

/// Smallest eigenvalue estimate of a symmetric matrix (inverse iteration with shifts).
/// Used for positive-definiteness checks of the small concentration matrices.
double min_eigenvalue_sym(const DMat& a);

}  // namespace gapstress

#endif
