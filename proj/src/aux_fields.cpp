#include "gapstress/aux_fields.hpp"

#include <cmath>
#include <stdexcept>

namespace gapstress {

RigidBasis::RigidBasis(int dim) : dim_(dim) {
  if (dim < 2) throw std::invalid_argument("RigidBasis: dimension must be >= 2");
}

std::vector<double> RigidBasis::value(int i, std::span<const double> x) const {
  if (i < 1 || i > size()) throw std::invalid_argument("RigidBasis: index out of range");
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("RigidBasis: point dimension mismatch");
  std::vector<double> v(dim_, 0.0);
  if (i <= dim_) {
    v[i - 1] = 1.0;
    return v;
  }
  int m = i - dim_ - 1;
  for (int j = 0; j < dim_; ++j) {
    for (int k = j + 1; k < dim_; ++k) {
      if (m == 0) {
        v[j] = x[k];
        v[k] = -x[j];
        return v;
      }
      --m;
    }
  }
  return v;
}

DMat RigidBasis::gradient(int i) const {
  if (i < 1 || i > size()) throw std::invalid_argument("RigidBasis: index out of range");
  DMat grad(dim_, dim_);
  if (i <= dim_) return grad;
  int m = i - dim_ - 1;
  for (int j = 0; j < dim_; ++j) {
    for (int k = j + 1; k < dim_; ++k) {
      if (m == 0) {
        grad(j, k) = 1.0;
        grad(k, j) = -1.0;
        return grad;
      }
      --m;
    }
  }
  return grad;
}

Vec2 RigidBasis::value2(int i, const Vec2& x) const {
  const double p[2] = {x.x, x.y};
  auto v = value(i, p);
  return {v[0], v[1]};
}

Mat2 RigidBasis::gradient2(int i) const {
  DMat g = gradient(i);
  Mat2 m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.m[r][c] = g(r, c);
  return m;
}

Vec2 PhiField::value2(const Vec2& p) const {
  const double x[2] = {p.x, p.y};
  double out[2] = {0.0, 0.0};
  if (value) value(x, out);
  return {out[0], out[1]};
}

Mat2 PhiField::jacobian2(const Vec2& p) const {
  const double x[2] = {p.x, p.y};
  double out[4] = {0.0, 0.0, 0.0, 0.0};
  if (jacobian) jacobian(x, out);
  Mat2 m;
  m.m[0][0] = out[0];
  m.m[0][1] = out[1];
  m.m[1][0] = out[2];
  m.m[1][1] = out[3];
  return m;
}

namespace {

struct GapFrame {
  double s = 0.0;          // |x'|
  std::vector<double> xhat;  // x'/|x'| (zeros at the axis)
  double h = 0.0;          // lower profile height
  double delta = 0.0;
  double dh = 0.0;         // radial slope of lower profile
  double ddelta = 0.0;     // radial slope of delta
  double v = 0.0;          // vbar value
};

GapFrame gap_frame(const GapGeometry& g, std::span<const double> x) {
  const int d = g.dim;
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("auxiliary field: point dimension mismatch");
  GapFrame fr;
  fr.xhat.assign(d - 1, 0.0);
  double s2 = 0.0;
  for (int k = 0; k < d - 1; ++k) s2 += x[k] * x[k];
  fr.s = std::sqrt(s2);
  if (fr.s > 2.0 * g.profile.R * (1.0 + 1e-12))
    throw std::invalid_argument("auxiliary field: point outside Omega_{2R}");
  if (fr.s > 0.0)
    for (int k = 0; k < d - 1; ++k) fr.xhat[k] = x[k] / fr.s;
  fr.h = g.profile.lower.value(fr.s);
  fr.delta = g.epsilon + g.profile.gap(fr.s);
  fr.dh = (fr.s == 0.0) ? 0.0 : g.profile.lower.deriv(fr.s);
  fr.ddelta =
      (fr.s == 0.0) ? 0.0 : g.profile.upper.deriv(fr.s) - g.profile.lower.deriv(fr.s);
  const double xd = x[d - 1];
  const double slack = 1e-9 * fr.delta;
  if (xd < fr.h - slack || xd > fr.h + fr.delta + slack)
    throw std::invalid_argument("auxiliary field: point outside the closed gap");
  fr.v = (xd - fr.h) / fr.delta;
  return fr;
}

}  // namespace

ScalarWithGradient vbar(const GapGeometry& g, std::span<const double> x) {
  const int d = g.dim;
  GapFrame fr = gap_frame(g, x);
  ScalarWithGradient out;
  out.value = fr.v;
  out.gradient.assign(d, 0.0);
  out.gradient[d - 1] = 1.0 / fr.delta;
  for (int k = 0; k < d - 1; ++k)
    out.gradient[k] = -fr.xhat[k] * (fr.dh + fr.v * fr.ddelta) / fr.delta;
  return out;
}

VectorWithGradient ubar(const GapGeometry& g, int i, std::span<const double> x) {
  const int d = g.dim;
  RigidBasis basis(d);
  ScalarWithGradient v = vbar(g, x);
  std::vector<double> psi = basis.value(i, x);
  DMat dpsi = basis.gradient(i);

  VectorWithGradient out;
  out.value.assign(d, 0.0);
  out.gradient = DMat(d, d);
  for (int r = 0; r < d; ++r) {
    out.value[r] = psi[r] * v.value;
    for (int c = 0; c < d; ++c)
      out.gradient(r, c) = psi[r] * v.gradient[c] + v.value * dpsi(r, c);
  }
  return out;
}

VectorWithGradient ubar0(const GapGeometry& g, const PhiField& phi,
                         std::span<const double> x) {
  const int d = g.dim;
  GapFrame fr = gap_frame(g, x);
  ScalarWithGradient v = vbar(g, x);

  VectorWithGradient out;
  out.value.assign(d, 0.0);
  out.gradient = DMat(d, d);
  if (phi.is_zero()) return out;

  // trace point on the lower boundary and phi data there
  std::vector<double> bp(x.begin(), x.end());
  bp[d - 1] = fr.h;
  std::vector<double> pval(d, 0.0);
  std::vector<double> pjac(d * d, 0.0);
  phi.value(bp, pval);
  phi.jacobian(bp, pjac);

  for (int r = 0; r < d; ++r) {
    out.value[r] = pval[r] * (1.0 - v.value);
    // d_k of the composed trace g^r(x') = phi^r(x', h(x'))
    for (int k = 0; k < d - 1; ++k) {
      const double dg = pjac[r * d + k] + pjac[r * d + (d - 1)] * fr.dh * fr.xhat[k];
      out.gradient(r, k) = dg * (1.0 - v.value) - pval[r] * v.gradient[k];
    }
    out.gradient(r, d - 1) = -pval[r] * v.gradient[d - 1];
  }
  return out;
}

double vbar2(const GapGeometry& g, const Vec2& x) {
  const double p[2] = {x.x, x.y};
  return vbar(g, p).value;
}

Vec2 vbar2_gradient(const GapGeometry& g, const Vec2& x) {
  const double p[2] = {x.x, x.y};
  auto v = vbar(g, p);
  return {v.gradient[0], v.gradient[1]};
}

Mat2 ubar2_gradient(const GapGeometry& g, int i, const Vec2& x) {
  const double p[2] = {x.x, x.y};
  auto u = ubar(g, i, p);
  Mat2 m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.m[r][c] = u.gradient(r, c);
  return m;
}

Mat2 ubar02_gradient(const GapGeometry& g, const PhiField& phi, const Vec2& x) {
  const double p[2] = {x.x, x.y};
  auto u = ubar0(g, phi, p);
  Mat2 m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.m[r][c] = u.gradient(r, c);
  return m;
}

}  // namespace gapstress
