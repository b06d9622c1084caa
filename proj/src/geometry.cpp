#include "gapstress/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "gapstress/numutil.hpp"

namespace gapstress {

namespace {

double norm_span(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

ArcTable::ArcTable(const StarCurve& curve, double phi_begin, double phi_end, int samples) {
  phi_.resize(samples + 1);
  cum_.resize(samples + 1);
  double acc = 0.0;
  Vec2 prev = curve.point(phi_begin);
  phi_[0] = phi_begin;
  cum_[0] = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double phi = phi_begin + (phi_end - phi_begin) * i / samples;
    const Vec2 p = curve.point(phi);
    acc += (p - prev).norm();
    phi_[i] = phi;
    cum_[i] = acc;
    prev = p;
  }
  total_ = acc;
}

double ArcTable::phi_at(double sigma) const {
  const double target = std::clamp(sigma, 0.0, 1.0) * total_;
  auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  if (it == cum_.begin()) return phi_.front();
  if (it == cum_.end()) return phi_.back();
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  const double c0 = cum_[i - 1], c1 = cum_[i];
  const double w = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.0;
  return phi_[i - 1] + w * (phi_[i] - phi_[i - 1]);
}

double gap_thickness(const GapGeometry& g, double radial) {
  const double s = std::fabs(radial);
  if (s > 2.0 * g.profile.R * (1.0 + 1e-12))
    throw std::invalid_argument("gap_thickness: point outside B'_{2R}");
  return g.epsilon + g.profile.gap(s);
}

double gap_thickness(const GapGeometry& g, std::span<const double> xp) {
  if (static_cast<int>(xp.size()) != g.dim - 1)
    throw std::invalid_argument("gap_thickness: xp must have d-1 components");
  return gap_thickness(g, norm_span(xp));
}

std::vector<double> outer_normal(const GapGeometry& g, std::span<const double> xp) {
  if (static_cast<int>(xp.size()) != g.dim - 1)
    throw std::invalid_argument("outer_normal: xp must have d-1 components");
  const double s = norm_span(xp);
  std::vector<double> n(g.dim, 0.0);
  double grad2 = 0.0;
  if (s > 0.0) {
    const double hp = g.profile.lower.deriv(s);
    for (int k = 0; k < g.dim - 1; ++k) {
      n[k] = hp * xp[k] / s;
      grad2 += n[k] * n[k];
    }
  }
  const double scale = 1.0 / std::sqrt(1.0 + grad2);
  for (int k = 0; k < g.dim - 1; ++k) n[k] *= scale;
  n[g.dim - 1] = -scale;
  return n;
}

double effective_tau0(double r1, double r2, double alpha) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw std::invalid_argument("effective_tau0: need 0 < r1 < r2");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("effective_tau0: alpha must lie in (0,1)");
  return (std::pow(r1, -alpha) - std::pow(r2, -alpha)) / (1.0 + alpha);
}

ConditionReport validate_conditions(const GapGeometry& g, int points_per_decade) {
  ConditionReport rep;
  const GapProfile& pr = g.profile;
  const double smax = 2.0 * pr.R;
  const double smin = smax * 1e-6;
  const int decades = 6;
  const int n = points_per_decade * decades;

  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = smin * std::pow(smax / smin, static_cast<double>(i) / (n - 1));

  // normalization: both profiles vanish at the touching point
  const bool origin_ok =
      std::fabs(pr.lower.value(0.0)) < 1e-12 && std::fabs(pr.upper.value(0.0)) < 1e-12;
  if (!origin_ok) rep.notes += "profiles do not vanish at the origin; ";

  // (S1): fit tau as the limit of gap(s)/s^{1+alpha}, then bound the remainder.
  {
    // fit on the inner decade where the remainder term is smallest
    double num = 0.0, den = 0.0;
    for (int i = 0; i < points_per_decade; ++i) {
      const double s = grid[i];
      const double w = std::pow(s, 1.0 + pr.alpha);
      num += pr.gap(s) * w;
      den += w * w;
    }
    rep.tau_fit = (den > 0.0) ? num / den : 0.0;
    double K = 0.0;
    bool finite = rep.tau_fit > 0.0;
    for (double s : grid) {
      const double rem = std::fabs(pr.gap(s) - rep.tau_fit * std::pow(s, 1.0 + pr.alpha));
      const double scale = std::pow(s, 1.0 + pr.alpha + pr.beta);
      if (scale > 0.0) K = std::max(K, rem / scale);
      if (!std::isfinite(rem)) finite = false;
    }
    rep.s1_constant = K;
    rep.s1_pass = origin_ok && finite && std::isfinite(K);
  }

  // (S2): kappa1 = sup max(|h'|,|h1'|)/s^alpha must stay bounded; divergence as
  // s -> 0 shows up as growth of the ratio on the inner decades.
  {
    double kappa1 = 0.0;
    double inner = 0.0, outer = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = grid[i];
      const double ratio =
          std::max(std::fabs(pr.lower.deriv(s)), std::fabs(pr.upper.deriv(s))) /
          std::pow(s, pr.alpha);
      kappa1 = std::max(kappa1, ratio);
      if (i < points_per_decade)
        inner = std::max(inner, ratio);
      else if (i >= n - points_per_decade)
        outer = std::max(outer, ratio);
    }
    rep.kappa1 = kappa1;
    rep.s2_pass = std::isfinite(kappa1) && inner <= 10.0 * std::max(outer, 1e-30);
  }

  // (S3): C^{1,alpha} norm estimate = sup|h| + sup|h'| + Holder seminorm of h'.
  {
    double sup = 0.0, sup_d = 0.0, holder = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = grid[i];
      sup = std::max({sup, std::fabs(pr.lower.value(s)), std::fabs(pr.upper.value(s))});
      sup_d = std::max({sup_d, std::fabs(pr.lower.deriv(s)), std::fabs(pr.upper.deriv(s))});
      if (i > 0) {
        const double t = grid[i - 1];
        const double dd = std::pow(s - t, pr.alpha);
        if (dd > 0.0) {
          holder = std::max(holder,
                            std::fabs(pr.lower.deriv(s) - pr.lower.deriv(t)) / dd);
          holder = std::max(holder,
                            std::fabs(pr.upper.deriv(s) - pr.upper.deriv(t)) / dd);
        }
      }
    }
    // Holder quotient against the origin (h'(0) = 0 for admissible profiles)
    for (int i = 0; i < n; ++i) {
      const double s = grid[i];
      const double dd = std::pow(s, pr.alpha);
      holder = std::max(holder, std::fabs(pr.lower.deriv(s)) / dd);
      holder = std::max(holder, std::fabs(pr.upper.deriv(s)) / dd);
    }
    rep.kappa2 = sup + sup_d + holder;
    rep.s3_pass = std::isfinite(rep.kappa2) && rep.s2_pass;
  }

  // parity: radial profiles are even by construction; verify on mirrored pairs
  {
    bool ok = true;
    for (int i = 0; i < n; i += 7) {
      const double s = std::min(grid[i], pr.R);
      if (std::fabs(pr.gap(s) - pr.gap(std::fabs(-s))) > 1e-14 * (1.0 + std::fabs(pr.gap(s))))
        ok = false;
    }
    rep.parity_pass = ok;
  }

  // inclusion strictly inside the outer domain: sampled signed clearance.
  if (g.dim == 2 && g.outer.radius && g.inclusion.radius) {
    double min_clear = 1e300;
    const int m = 720;
    for (int i = 0; i < m; ++i) {
      const double phi = -M_PI + 2.0 * M_PI * (i + 0.5) / m;
      const Vec2 p = g.inclusion.point(phi);
      // star-shaped test against the outer curve around its own center
      const Vec2 rel = p - g.outer.center;
      const double ang = std::atan2(rel.x, -rel.y);
      const double clear = g.outer.radius(ang) - rel.norm();
      min_clear = std::min(min_clear, clear);
    }
    rep.min_clearance = min_clear;
    rep.inclusion_inside = min_clear > 0.0;
  }
  return rep;
}

// ---- closed-curve construction ----------------------------------------------

namespace {

struct GraphPolar {
  // polar description, around (0, yc), of the graph x2 = f(x1), |x1| <= w
  double yc;
  double w;
  ProfileFn f;  // radial profile (even); slope of the graph at x1 is deriv(|x1|)*sign(x1)

  double x1_of_phi(double phi) const {
    // solve x1 = (yc - f(|x1|)) tan(phi); monotone in x1 for yc above the graph
    const double t = std::tan(phi);
    double x = (yc - f.value(0.0)) * t;
    for (int it = 0; it < 60; ++it) {
      const double s = std::fabs(x);
      const double fx = f.value(s);
      const double dfx = (s == 0.0) ? 0.0 : f.deriv(s) * (x < 0 ? -1.0 : 1.0);
      const double F = x - (yc - fx) * t;
      const double dF = 1.0 + dfx * t;
      const double step = F / dF;
      x -= step;
      if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    return x;
  }

  double radius(double phi) const {
    const double x = x1_of_phi(phi);
    const double y = f.value(std::fabs(x));
    return std::hypot(x, yc - y);
  }

  double dradius(double phi) const {
    const double x = x1_of_phi(phi);
    const double s = std::fabs(x);
    const double y = f.value(s);
    const double dy = (s == 0.0) ? 0.0 : f.deriv(s) * (x < 0 ? -1.0 : 1.0);
    const double rho = std::hypot(x, yc - y);
    const double dphi_dx = ((yc - y) + x * dy) / (rho * rho);
    const double drho_dx = (x - (yc - y) * dy) / rho;
    return drho_dx / dphi_dx;
  }

  double phi_of_x1(double x1) const {
    return std::atan2(x1, yc - f.value(std::fabs(x1)));
  }
};

double hermite(double t, double v0, double d0, double v1, double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * d0 +
         (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * d1;
}

double dhermite(double t, double v0, double d0, double v1, double d1) {
  const double t2 = t * t;
  return (6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) * v1 +
         (3 * t2 - 2 * t) * d1;
}

/// Closed curve: exact graph of `f` for |x1| <= w around center (0, yc), then a
/// C^1 Hermite blend in polar radius onto a circular cap of radius cap_r.
StarCurve make_graph_capped_curve(double yc, double w, ProfileFn f, double cap_r,
                                  double blend_angle, double& window_phi_out) {
  auto gp = std::make_shared<GraphPolar>(GraphPolar{yc, w, std::move(f)});
  const double phi_w = gp->phi_of_x1(w);  // symmetric profile: window is [-phi_w, phi_w]
  const double rho_w = gp->radius(phi_w);
  const double drho_w = gp->dradius(phi_w);
  const double blend = blend_angle;
  window_phi_out = phi_w;

  auto radius = [gp, phi_w, rho_w, drho_w, blend, cap_r](double phi) {
    phi = std::remainder(phi, 2.0 * M_PI);  // reduce to (-pi, pi]
    const double a = std::fabs(phi);
    if (a <= phi_w) return gp->radius(phi);
    if (a <= phi_w + blend) {
      const double t = (a - phi_w) / blend;
      // Hermite slopes are w.r.t. t, scale by the interval length
      return hermite(t, rho_w, drho_w * blend, cap_r, 0.0);
    }
    return cap_r;
  };
  auto dradius = [gp, phi_w, rho_w, drho_w, blend, cap_r](double phi) {
    phi = std::remainder(phi, 2.0 * M_PI);
    const double a = std::fabs(phi);
    const double sgn = (phi < 0) ? -1.0 : 1.0;
    if (a <= phi_w) return gp->dradius(phi);
    if (a <= phi_w + blend) {
      const double t = (a - phi_w) / blend;
      return sgn * dhermite(t, rho_w, drho_w * blend, cap_r, 0.0) / blend;
    }
    return 0.0;
  };
  StarCurve c;
  c.center = {0.0, yc};
  c.radius = radius;
  c.dradius = dradius;
  return c;
}

ProfileFn power_profile(double coeff, double p) {
  ProfileFn f;
  f.value = [coeff, p](double s) { return coeff * std::pow(s, p); };
  f.deriv = [coeff, p](double s) { return (s == 0.0) ? 0.0 : coeff * p * std::pow(s, p - 1.0); };
  return f;
}

ProfileFn zero_profile() {
  ProfileFn f;
  f.value = [](double) { return 0.0; };
  f.deriv = [](double) { return 0.0; };
  return f;
}


GapGeometry assemble_two_sided(ProfileFn lower, ProfileFn upper, double alpha, double beta,
                               double tau, double R, double eps, double y_incl,
                               double y_outer, double cap_outer) {
  GapGeometry g;
  g.dim = 2;
  g.epsilon = eps;
  g.profile.alpha = alpha;
  g.profile.beta = beta;
  g.profile.tau = tau;
  g.profile.R = R;
  g.profile.lower = lower;
  g.profile.upper = upper;

  const double w = 2.0 * R;
  const double up_w = upper.value(w);
  const double lo_w = lower.value(w);

  // inclusion closure: center above the (unshifted) top graph, cap slightly
  // larger than the corner radius, then translate by (0, eps)
  double yi = (y_incl > 0.0) ? y_incl : up_w + 0.8 * w;
  const double corner_i = std::hypot(w, yi - up_w);
  const double cap_i = 1.12 * corner_i;
  // the graph is measured from yi; inclusion curve around (0, yi) then shifted
  ProfileFn upper_copy = upper;
  double win_i = 0.0;
  StarCurve incl = make_graph_capped_curve(yi, w, upper_copy, cap_i, 0.5, win_i);
  incl.center.y += eps;  // D1 = D1* + (0, eps)

  // outer closure: must contain the inclusion with clearance
  const double incl_top = yi + eps + cap_i;
  const double incl_side = cap_i;
  // generous clearance: the shell away from the gap must stay energetically
  // cheap next to the gap contribution, which scales like 1/delta
  double yo = (y_outer > 0.0) ? y_outer : std::max(1.2 * w, 0.45 * incl_top);
  double cap_o = (cap_outer > 0.0)
                     ? cap_outer
                     : std::max({1.25 * std::hypot(w, yo - lo_w), incl_top - yo + 2.5 * w,
                                 incl_side + 2.5 * w});
  double win_o = 0.0;
  StarCurve out = make_graph_capped_curve(yo, w, lower, cap_o, 0.5, win_o);

  g.inclusion = incl;
  g.outer = out;
  g.inclusion_window_phi = win_i;
  g.outer_window_phi = win_o;
  return g;
}

}  // namespace

GapGeometry make_power_geometry(const PowerGeometryParams& p) {
  if (!(p.alpha > 0.0) || !(p.alpha < 1.0))
    throw std::invalid_argument("make_power_geometry: alpha must lie in (0,1)");
  if (!(p.tau > 0.0) || !(p.R > 0.0) || !(p.epsilon > 0.0))
    throw std::invalid_argument("make_power_geometry: tau, R, epsilon must be positive");
  GapGeometry g = assemble_two_sided(zero_profile(), power_profile(p.tau, 1.0 + p.alpha),
                                     p.alpha, p.beta, p.tau, p.R, p.epsilon,
                                     p.inclusion_center_y, p.outer_center_y,
                                     p.outer_cap_radius);
  g.kind = "power";
  return g;
}

GapGeometry make_two_power_geometry(const TwoPowerGeometryParams& p) {
  if (!(p.p_lower > p.p_upper) || !(p.p_upper > 1.0))
    throw std::invalid_argument("make_two_power_geometry: need 1 < p_upper < p_lower");
  const double alpha = p.p_upper - 1.0;
  const double beta = p.p_lower - p.p_upper;
  // positivity of the gap on the window
  const double w = 2.0 * p.R;
  if (p.tau_lower > 0.0 &&
      p.tau_upper * std::pow(w, p.p_upper) <= p.tau_lower * std::pow(w, p.p_lower))
    throw std::invalid_argument("make_two_power_geometry: profiles cross inside the window");
  GapGeometry g = assemble_two_sided(
      power_profile(p.tau_lower, p.p_lower), power_profile(p.tau_upper, p.p_upper), alpha,
      beta, p.tau_upper, p.R, p.epsilon, p.inclusion_center_y, p.outer_center_y,
      p.outer_cap_radius);
  g.kind = "two_power";
  return g;
}

void CurvilinearSquareGeometry::validate() const {
  if (!(r1 > 0.0) || !(r2 > r1)) throw std::invalid_argument("curvilinear squares: need 0 < r1 < r2");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("curvilinear squares: alpha must lie in (0,1)");
  if (!(r0 > 0.0) || !(r0 < 0.5 * std::min(r1, r2)))
    throw std::invalid_argument("curvilinear squares: need 0 < r0 < min(r1,r2)/2");
  if (!(epsilon > 0.0)) throw std::invalid_argument("curvilinear squares: epsilon must be positive");
}

GapGeometry make_curvilinear_square_geometry(const CurvilinearSquareGeometry& p) {
  p.validate();
  const double a = p.alpha;
  const double pw = 1.0 + a;

  auto superellipse_profile = [pw](double r) {
    // x2 = r - (r^p - s^p)^{1/p}, written as -r expm1(log1p(-u)/p) with
    // u = (s/r)^p so that tiny heights keep full relative precision
    ProfileFn f;
    f.value = [r, pw](double s) {
      const double u = std::pow(s / r, pw);
      return -r * std::expm1(std::log1p(-u) / pw);
    };
    f.deriv = [r, pw](double s) {
      if (s == 0.0) return 0.0;
      const double u = std::pow(s / r, pw);
      // s^{p-1} (r^p - s^p)^{1/p - 1}
      return std::pow(s / r, pw - 1.0) * std::exp(std::log1p(-u) * (1.0 - pw) / pw);
    };
    return f;
  };

  auto superellipse_curve = [pw](double r, double cy) {
    StarCurve c;
    c.center = {0.0, cy};
    c.radius = [r, pw](double phi) {
      const double S = std::pow(std::fabs(std::sin(phi)), pw) +
                       std::pow(std::fabs(std::cos(phi)), pw);
      return r * std::pow(S, -1.0 / pw);
    };
    c.dradius = [r, pw](double phi) {
      const double as = std::fabs(std::sin(phi)), ac = std::fabs(std::cos(phi));
      const double S = std::pow(as, pw) + std::pow(ac, pw);
      const double dS = pw * (std::pow(as, pw - 1.0) * (std::sin(phi) < 0 ? -1.0 : 1.0) * std::cos(phi) -
                              std::pow(ac, pw - 1.0) * (std::cos(phi) < 0 ? -1.0 : 1.0) * std::sin(phi));
      return -r / pw * std::pow(S, -1.0 / pw - 1.0) * dS;
    };
    return c;
  };

  GapGeometry g;
  g.dim = 2;
  g.epsilon = p.epsilon;
  g.kind = "curvilinear_square";
  g.profile.alpha = a;
  g.profile.beta = 1.0 + a;  // remainder O(s^{2+2a}) in the gap expansion
  g.profile.tau = effective_tau0(p.r1, p.r2, a);
  g.profile.R = p.r0;
  g.profile.lower = superellipse_profile(p.r2);
  g.profile.upper = superellipse_profile(p.r1);
  g.outer = superellipse_curve(p.r2, p.r2);
  g.inclusion = superellipse_curve(p.r1, p.epsilon + p.r1);

  // graph windows: the angle of the point over x1 = 2 r0
  const double w = 2.0 * p.r0;
  g.outer_window_phi = std::atan2(w, p.r2 - g.profile.lower.value(w));
  g.inclusion_window_phi = std::atan2(w, p.r1 - g.profile.upper.value(w));
  return g;
}

Polyline sample_boundary(const StarCurve& curve, int n_points) {
  ArcTable table(curve, -M_PI, M_PI, std::max(1024, 4 * n_points));
  Polyline poly;
  poly.s.resize(n_points + 1);
  poly.points.resize(n_points + 1);
  for (int i = 0; i <= n_points; ++i) {
    const double sigma = static_cast<double>(i) / n_points;
    poly.s[i] = sigma;
    poly.points[i] = curve.point(table.phi_at(sigma));
  }
  return poly;
}

}  // namespace gapstress
