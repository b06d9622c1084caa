#ifndef GAPSTRESS_GEOMETRY_HPP
#define GAPSTRESS_GEOMETRY_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gapstress/linalg.hpp"

namespace gapstress {

/// Radial scalar profile s = |x'| -> height, with an analytic first derivative.
struct ProfileFn {
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  double operator()(double s) const { return value(s); }
};

/// Gap profiles near the touching point: `lower` is the matrix-side boundary
/// height h, `upper` the inclusion-side height h1 before the vertical eps
/// shift. Both vanish at the origin and live on |x'| <= 2R.
struct GapProfile {
  double alpha = 0.5;  // interface regularity exponent, in (0,1)
  double beta = 1.0;   // correction exponent in the leading expansion, > 0
  double tau = 1.0;    // leading curvature coefficient of upper - lower
  double R = 0.5;      // analysis half-window; profiles defined on [0, 2R]
  ProfileFn lower;
  ProfileFn upper;

  double gap(double s) const { return upper.value(s) - lower.value(s); }
};

/// Closed star-shaped curve: center plus radius as a function of the angle phi
/// measured from the downward vertical, phi in (-pi, pi].
struct StarCurve {
  Vec2 center;
  std::function<double(double)> radius;
  std::function<double(double)> dradius;

  Vec2 point(double phi) const {
    const double r = radius(phi);
    return {center.x + r * std::sin(phi), center.y - r * std::cos(phi)};
  }
  Vec2 tangent(double phi) const {  // dP/dphi
    const double r = radius(phi);
    const double dr = dradius(phi);
    return {dr * std::sin(phi) + r * std::cos(phi), -dr * std::cos(phi) + r * std::sin(phi)};
  }
};

/// Arc-length parametrization of a phi interval of a StarCurve, built once and
/// inverted by table lookup.
class ArcTable {
 public:
  ArcTable() = default;
  ArcTable(const StarCurve& curve, double phi_begin, double phi_end, int samples = 4096);

  double length() const { return total_; }
  /// phi at normalized arc length sigma in [0,1]
  double phi_at(double sigma) const;

 private:
  std::vector<double> phi_;
  std::vector<double> cum_;
  double total_ = 0.0;
};

struct GapGeometry {
  GapProfile profile;
  double epsilon = 1e-3;
  int dim = 2;

  // closed boundary curves for meshing/plotting (dim == 2 only);
  // `inclusion` is already translated by (0, epsilon)
  StarCurve outer;
  StarCurve inclusion;
  double outer_window_phi = 0.0;      // |phi| <= this is the outer graph zone
  double inclusion_window_phi = 0.0;  // same for the inclusion curve
  std::string kind = "custom";

  // cross-section helpers (d = 2), x1 in [-2R, 2R]
  double lower_height(double x1) const { return profile.lower.value(std::fabs(x1)); }
  double upper_height(double x1) const {
    return epsilon + profile.upper.value(std::fabs(x1));
  }
  double lower_slope(double x1) const {
    const double s = std::fabs(x1);
    return (s == 0.0) ? 0.0 : profile.lower.deriv(s) * (x1 < 0 ? -1.0 : 1.0);
  }
  double upper_slope(double x1) const {
    const double s = std::fabs(x1);
    return (s == 0.0) ? 0.0 : profile.upper.deriv(s) * (x1 < 0 ? -1.0 : 1.0);
  }
};

/// delta(x') = eps + h1(x') - h(x'); xp must satisfy |xp| <= 2R.
double gap_thickness(const GapGeometry& g, std::span<const double> xp);
double gap_thickness(const GapGeometry& g, double radial);

/// Unit outer normal of D at the graph point over xp (points away from Omega).
std::vector<double> outer_normal(const GapGeometry& g, std::span<const double> xp);

/// tau_0 = (1/(1+alpha)) (r1^-alpha - r2^-alpha) for the curvilinear-square pair.
double effective_tau0(double r1, double r2, double alpha);

struct ConditionReport {
  bool s1_pass = false;       // leading expansion with remainder exponent beta
  bool s2_pass = false;       // |grad h|, |grad h1| <= kappa1 |x'|^alpha
  bool s3_pass = false;       // C^{1,alpha} norms bounded
  bool parity_pass = false;   // evenness of h1 - h in each coordinate
  bool inclusion_inside = false;
  double tau_fit = 0.0;
  double s1_constant = 0.0;   // fitted K in |gap - tau s^{1+a}| <= K s^{1+a+b}
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double min_clearance = 0.0; // sampled distance of the inclusion inside D
  std::string notes;
};

/// Sampled verification of conditions (S1)-(S3) on a log-spaced radial grid
/// (points_per_decade samples per decade, denser near the touching point).
ConditionReport validate_conditions(const GapGeometry& g, int points_per_decade = 200);

// ---- geometry factories ----------------------------------------------------

struct PowerGeometryParams {
  double alpha = 0.5;
  double beta = 1.0;
  double tau = 1.0;
  double R = 0.5;
  double epsilon = 1e-3;
  // optional closure overrides; <= 0 means "derive from the profile"
  double inclusion_center_y = 0.0;
  double outer_center_y = 0.0;
  double outer_cap_radius = 0.0;
};

/// Matrix boundary flat (h = 0), inclusion h1 = tau |x'|^{1+alpha}; smooth
/// star-shaped closures away from the gap window.
GapGeometry make_power_geometry(const PowerGeometryParams& p);

struct TwoPowerGeometryParams {
  double tau_upper = 1.0;
  double p_upper = 1.5;   // 1 + alpha
  double tau_lower = 0.0;
  double p_lower = 2.5;   // 1 + alpha + beta
  double R = 0.5;
  double epsilon = 1e-3;
  double inclusion_center_y = 0.0;
  double outer_center_y = 0.0;
  double outer_cap_radius = 0.0;
};

/// h1 = tau_u |x'|^{p_u}, h = tau_l |x'|^{p_l} with p_l > p_u (the remark after
/// condition (S3): boundaries of different convexity are admissible).
GapGeometry make_two_power_geometry(const TwoPowerGeometryParams& p);

struct CurvilinearSquareGeometry {
  double r1 = 1.0;
  double r2 = 2.0;
  double alpha = 0.5;
  double epsilon = 1e-3;
  double r0 = 0.45;  // analysis window, must satisfy r0 < min(r1,r2)/2

  void validate() const;
};

/// Core and shell are curvilinear squares |x1|^{1+a} + |x2 - c|^{1+a} = r^{1+a}.
GapGeometry make_curvilinear_square_geometry(const CurvilinearSquareGeometry& p);

/// Boundary polyline export, rows (s, x1, x2) with s the normalized arc length.
struct Polyline {
  std::vector<double> s;
  std::vector<Vec2> points;
};
Polyline sample_boundary(const StarCurve& curve, int n_points);

}  // namespace gapstress

#endif
