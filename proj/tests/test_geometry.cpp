#include <doctest.h>

#include <cmath>
#include <random>

#include "gapstress/geometry.hpp"
#include "gapstress/numutil.hpp"

using namespace gapstress;

namespace {

GapGeometry default_power(double eps = 1e-2) {
  PowerGeometryParams p;
  p.alpha = 0.5;
  p.tau = 1.0;
  p.R = 0.5;
  p.epsilon = eps;
  return make_power_geometry(p);
}

CurvilinearSquareGeometry default_squares(double eps = 1e-3) {
  CurvilinearSquareGeometry q;
  q.r1 = 1.0;
  q.r2 = 2.0;
  q.alpha = 0.5;
  q.r0 = 0.45;
  q.epsilon = eps;
  return q;
}

}  // namespace

TEST_CASE("gap thickness at the touching point equals eps") {
  GapGeometry g = default_power(3e-3);
  const double xp0[1] = {0.0};
  CHECK(gap_thickness(g, xp0) == doctest::Approx(3e-3).epsilon(1e-14));
}

TEST_CASE("gap thickness of the power profile is eps + tau s^{1+alpha}") {
  GapGeometry g = default_power(1e-2);
  for (double s : {0.05, 0.2, 0.6, 0.99}) {
    const double xp[1] = {s};
    CHECK(gap_thickness(g, xp) ==
          doctest::Approx(1e-2 + std::pow(s, 1.5)).epsilon(1e-13));
  }
  const double outside[1] = {1.2};
  CHECK_THROWS_AS(gap_thickness(g, outside), std::invalid_argument);
}

TEST_CASE("curvilinear-square gap matches a root-found oracle and the tau0 law") {
  auto q = default_squares(1e-4);
  GapGeometry g = make_curvilinear_square_geometry(q);
  const double tau0 = effective_tau0(q.r1, q.r2, q.alpha);
  const double p = 1.0 + q.alpha;

  // oracle: solve the implicit curves for the heights over x1
  auto implicit_height = [&](double r, double cy, double x1) {
    auto f = [&](double y) {
      return std::pow(std::fabs(x1), p) + std::pow(std::fabs(y - cy), p) - std::pow(r, p);
    };
    return find_root(f, cy - r, cy);
  };

  for (double s : {0.1, 0.01}) {
    const double y_top = implicit_height(q.r1, q.epsilon + q.r1, s);
    const double y_bot = implicit_height(q.r2, q.r2, s);
    const double oracle = y_top - y_bot;
    const double xp[1] = {s};
    CHECK(gap_thickness(g, xp) == doctest::Approx(oracle).epsilon(1e-9));
  }

  // (h1 - h)/s^{1+alpha} -> tau0 with monotone error decay
  double prev_err = 1e300;
  for (double s : {1e-2, 1e-3, 1e-4}) {
    const double ratio = g.profile.gap(s) / std::pow(s, p);
    const double err = std::fabs(ratio / tau0 - 1.0);
    CHECK(err < 0.01);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("outer normal is straight down at the touching point") {
  GapGeometry g = default_power();
  const double xp[1] = {0.0};
  auto n = outer_normal(g, xp);
  CHECK(n[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(n[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("outer normal matches the direct formula for a power lower profile") {
  // lower boundary x2 = x1^{1.5}; slope at x1 = 0.25 is 1.5*sqrt(0.25) = 0.75
  GapGeometry g;
  g.dim = 2;
  g.epsilon = 1e-3;
  g.profile.alpha = 0.5;
  g.profile.R = 0.5;
  g.profile.tau = 1.0;
  g.profile.lower.value = [](double s) { return std::pow(s, 1.5); };
  g.profile.lower.deriv = [](double s) { return 1.5 * std::sqrt(s); };
  g.profile.upper.value = [](double s) { return 2.0 * std::pow(s, 1.5); };
  g.profile.upper.deriv = [](double s) { return 3.0 * std::sqrt(s); };

  const double xp[1] = {0.25};
  auto n = outer_normal(g, xp);
  CHECK(n[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n[1] == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("outer normal has unit length at random points") {
  GapGeometry g = default_power();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uni(-0.99, 0.99);
  for (int k = 0; k < 100; ++k) {
    const double xp[1] = {uni(rng)};
    auto n = outer_normal(g, xp);
    CHECK(std::hypot(n[0], n[1]) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("effective tau0 closed form and limits") {
  CHECK(effective_tau0(1.0, 2.0, 0.5) ==
        doctest::Approx((2.0 / 3.0) * (1.0 - 1.0 / std::sqrt(2.0))).epsilon(1e-13));
  // r2 -> infinity limit
  const double lim = 1.0 / (1.5 * std::pow(1.0, 0.5));
  CHECK(effective_tau0(1.0, 1e9, 0.5) == doctest::Approx(lim).epsilon(1e-4));
  CHECK_THROWS_AS(effective_tau0(2.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("fitted gap exponent and coefficient match tau0 on the squares") {
  auto q = default_squares();
  GapGeometry g = make_curvilinear_square_geometry(q);
  const double tau0 = effective_tau0(q.r1, q.r2, q.alpha);
  std::vector<double> s, gap;
  for (double v = 1e-4; v < 1e-2; v *= 1.3) {
    s.push_back(v);
    gap.push_back(g.profile.gap(v));
  }
  auto fit = fit_loglog(s, gap);
  CHECK(std::fabs(fit.slope - 1.5) < 0.01 * 1.5);
  CHECK(std::fabs(std::exp(fit.intercept) - tau0) < 0.01 * tau0);
}

TEST_CASE("condition checks pass on an exact power model") {
  PowerGeometryParams p;
  p.alpha = 0.5;
  p.beta = 0.5;
  p.tau = 1.0;
  p.R = 0.5;
  p.epsilon = 1e-2;
  GapGeometry g = make_power_geometry(p);
  auto rep = validate_conditions(g);
  CHECK(rep.s1_pass);
  CHECK(rep.s2_pass);
  CHECK(rep.s3_pass);
  CHECK(rep.parity_pass);
  CHECK(rep.inclusion_inside);
  CHECK(std::fabs(rep.tau_fit - 1.0) < 1e-6);
}

TEST_CASE("a Lipschitz corner fails the gradient condition") {
  GapGeometry g = default_power();
  g.profile.upper.value = [](double s) { return s; };
  g.profile.upper.deriv = [](double) { return 1.0; };
  auto rep = validate_conditions(g);
  CHECK_FALSE(rep.s2_pass);
}

TEST_CASE("condition checks pass on the curvilinear squares") {
  GapGeometry g = make_curvilinear_square_geometry(default_squares());
  auto rep = validate_conditions(g);
  CHECK(rep.s1_pass);
  CHECK(rep.s2_pass);
  CHECK(rep.s3_pass);
  CHECK(rep.inclusion_inside);
  const double tau0 = effective_tau0(1.0, 2.0, 0.5);
  CHECK(std::fabs(rep.tau_fit - tau0) < 0.01 * tau0);
}

TEST_CASE("gap thickness is positive and even across the window") {
  for (double eps : {1e-2, 1e-4}) {
    GapGeometry g = default_power(eps);
    for (double s = 0.0; s <= 1.0; s += 0.037) {
      const double a[1] = {s};
      const double b[1] = {-s};
      CHECK(gap_thickness(g, a) > 0.0);
      CHECK(gap_thickness(g, a) == doctest::Approx(gap_thickness(g, b)).epsilon(1e-15));
    }
  }
}

TEST_CASE("curvilinear-square boundary curves satisfy the implicit equations") {
  auto q = default_squares(1e-3);
  GapGeometry g = make_curvilinear_square_geometry(q);
  const double p = 1.0 + q.alpha;
  for (int k = 0; k < 73; ++k) {
    const double phi = -M_PI + 2.0 * M_PI * k / 73.0;
    const Vec2 a = g.inclusion.point(phi);
    const Vec2 b = g.outer.point(phi);
    const double fa = std::pow(std::fabs(a.x), p) +
                      std::pow(std::fabs(a.y - q.epsilon - q.r1), p) - std::pow(q.r1, p);
    const double fb =
        std::pow(std::fabs(b.x), p) + std::pow(std::fabs(b.y - q.r2), p) - std::pow(q.r2, p);
    CHECK(std::fabs(fa) < 1e-10);
    CHECK(std::fabs(fb) < 1e-10);
  }
}

TEST_CASE("power geometry closure: graphs sit on the curves, inclusion inside") {
  GapGeometry g = default_power(5e-3);
  // the bottom window of each curve reproduces the profile graphs exactly
  for (double x1 : {-0.9, -0.3, 0.0, 0.4, 0.99}) {
    const double phi_o = std::atan2(x1, g.outer.center.y - g.lower_height(x1));
    const Vec2 po = g.outer.point(phi_o);
    CHECK(po.x == doctest::Approx(x1).epsilon(1e-9));
    CHECK(po.y == doctest::Approx(g.lower_height(x1)).epsilon(1e-9));

    const double phi_i =
        std::atan2(x1, g.inclusion.center.y - g.upper_height(x1));
    const Vec2 pi = g.inclusion.point(phi_i);
    CHECK(pi.x == doctest::Approx(x1).epsilon(1e-9));
    CHECK(pi.y == doctest::Approx(g.upper_height(x1)).epsilon(1e-9));
  }
  auto rep = validate_conditions(g);
  CHECK(rep.inclusion_inside);
  CHECK(rep.min_clearance > 0.0);
}

TEST_CASE("two-power profiles: opposite convexity with the stated exponents") {
  TwoPowerGeometryParams p;
  p.tau_upper = 1.2;
  p.p_upper = 1.5;   // alpha = 0.5
  p.tau_lower = 0.4;
  p.p_lower = 2.0;   // beta = 0.5
  p.R = 0.4;
  p.epsilon = 5e-3;
  GapGeometry g = make_two_power_geometry(p);
  CHECK(g.profile.alpha == doctest::Approx(0.5));
  CHECK(g.profile.beta == doctest::Approx(0.5));
  auto rep = validate_conditions(g);
  CHECK(rep.s1_pass);
  CHECK(rep.s2_pass);
  CHECK(rep.inclusion_inside);
  CHECK(std::fabs(rep.tau_fit - 1.2) < 2e-3 * 1.2);
  // gap = 1.2 s^{3/2} - 0.4 s^2 exactly
  const double s = 0.17;
  CHECK(g.profile.gap(s) ==
        doctest::Approx(1.2 * std::pow(s, 1.5) - 0.4 * s * s).epsilon(1e-13));
  CHECK_THROWS_AS(make_two_power_geometry(TwoPowerGeometryParams{1.0, 2.0, 1.0, 1.5, 0.5,
                                                                 1e-3, 0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("boundary polyline export is closed and ordered") {
  GapGeometry g = default_power();
  auto poly = sample_boundary(g.outer, 200);
  REQUIRE(poly.points.size() == 201);
  CHECK(poly.s.front() == 0.0);
  CHECK(poly.s.back() == 1.0);
  CHECK((poly.points.front() - poly.points.back()).norm() < 1e-6);
}
