#ifndef GAPSTRESS_AUX_FIELDS_HPP
#define GAPSTRESS_AUX_FIELDS_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gapstress/geometry.hpp"
#include "gapstress/linalg.hpp"

namespace gapstress {

/// Basis of the rigid displacements in R^d: first the d translations e_i, then
/// the rotations x_k e_j - x_j e_k ordered by (j,k), j < k lexicographically.
/// In dimension two: psi_1 = (1,0), psi_2 = (0,1), psi_3 = (x_2, -x_1).
class RigidBasis {
 public:
  explicit RigidBasis(int dim);

  int dim() const { return dim_; }
  int size() const { return dim_ * (dim_ + 1) / 2; }

  /// psi_i(x); i is 1-based to match the analysis, x has dim components.
  std::vector<double> value(int i, std::span<const double> x) const;

  /// Constant gradient of psi_i, entry (r,c) = d_c psi^r; antisymmetric.
  DMat gradient(int i) const;

  Vec2 value2(int i, const Vec2& x) const;
  Mat2 gradient2(int i) const;

 private:
  int dim_;
};

/// Dirichlet boundary field phi on the outer boundary, with one analytic
/// derivative. Dimension-generic so the d >= 3 evaluators can reuse it.
struct PhiField {
  int dim = 2;
  std::string name = "custom";
  std::function<void(std::span<const double>, std::span<double>)> value;
  // row-major d x d Jacobian, entry (r,c) = d_c phi^r
  std::function<void(std::span<const double>, std::span<double>)> jacobian;

  Vec2 value2(const Vec2& p) const;
  Mat2 jacobian2(const Vec2& p) const;
  bool is_zero() const { return !static_cast<bool>(value); }
};

struct ScalarWithGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

struct VectorWithGradient {
  std::vector<double> value;
  DMat gradient;  // (r,c) = d_c u^r
};

/// vbar(x) = (x_d - h(x')) / delta(x') in the closed gap; gradient analytic.
/// Throws if x lies outside the closed gap region Omega_{2R}.
ScalarWithGradient vbar(const GapGeometry& g, std::span<const double> x);

/// ubar_i = psi_i * vbar, i = 1..d(d+1)/2.
VectorWithGradient ubar(const GapGeometry& g, int i, std::span<const double> x);

/// ubar_0 = phi(x', h(x')) (1 - vbar); phi must satisfy phi(0) = 0.
VectorWithGradient ubar0(const GapGeometry& g, const PhiField& phi,
                         std::span<const double> x);

// 2-D conveniences used by the FEM comparison path
double vbar2(const GapGeometry& g, const Vec2& x);
Vec2 vbar2_gradient(const GapGeometry& g, const Vec2& x);
Mat2 ubar2_gradient(const GapGeometry& g, int i, const Vec2& x);
Mat2 ubar02_gradient(const GapGeometry& g, const PhiField& phi, const Vec2& x);

}  // namespace gapstress

#endif
