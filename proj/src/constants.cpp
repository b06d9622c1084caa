#include "gapstress/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gapstress/numutil.hpp"

namespace gapstress {

double AsymptoticConstants::kappa3() const {
  const double lo = std::min(lame.mu, dim * lame.lambda + 2.0 * lame.mu);
  const double hi = std::max(lame.mu, dim * lame.lambda + 2.0 * lame.mu);
  return std::min(lo, 1.0 / hi);
}

void AsymptoticConstants::validate() const {
  if (!(lame.mu > 0.0) || !(dim * lame.lambda + 2.0 * lame.mu > 0.0))
    throw std::invalid_argument("AsymptoticConstants: ellipticity requires mu > 0, d*lambda+2*mu > 0");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("AsymptoticConstants: alpha must lie in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("AsymptoticConstants: beta must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("AsymptoticConstants: tau must be positive");
}

double gamma_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("gamma_alpha: alpha must lie in (0,1]");
  return gamma_fn(1.0 / (1.0 + alpha)) * gamma_fn(alpha / (1.0 + alpha));
}

double m_alpha_tau(double alpha, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("m_alpha_tau: tau must be positive");
  return 2.0 * gamma_alpha(alpha) / ((1.0 + alpha) * std::pow(tau, 1.0 / (1.0 + alpha)));
}

std::vector<double> lame_row(int dim, const LameParameters& lame) {
  if (dim < 2) throw std::invalid_argument("lame_row: dimension must be >= 2");
  std::vector<double> row(dim, lame.mu);
  row[dim - 1] = lame.lambda + 2.0 * lame.mu;
  return row;
}

double rest_exponent_2d(double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("rest_exponent_2d: alpha must lie in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("rest_exponent_2d: beta must be positive");
  const double e1 = (1.0 - alpha) * alpha / (2.0 * (1.0 + 2.0 * alpha));
  const double e2 = alpha * alpha / (2.0 * (1.0 + 2.0 * alpha) * (1.0 + alpha) * (1.0 + alpha));
  if (alpha > beta) return std::min({beta / (1.0 + alpha), e1, e2});
  return std::min(e1, e2);
}

double rest_exponent_hd(double alpha, int dim) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("rest_exponent_hd: alpha must lie in (0,1)");
  if (dim < 3) throw std::invalid_argument("rest_exponent_hd: dimension must be >= 3");
  const double base = alpha * alpha / (2.0 * (1.0 + 2.0 * alpha));
  if (dim == 3) return base * (1.0 - alpha) / ((1.0 + alpha) * (1.0 + alpha));
  if (dim == 4)
    return base * std::min(1.0 + alpha, 2.0 - alpha) / ((1.0 + alpha) * (1.0 + alpha));
  return base / (1.0 + alpha);
}

TildeEps tilde_eps(double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("tilde_eps: alpha must lie in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("tilde_eps: beta must be positive");
  TildeEps out;
  if (alpha > beta) {
    out.exponent = beta / (1.0 + alpha);
  } else if (alpha == beta) {
    out.exponent = alpha / (1.0 + alpha);
    out.has_log_factor = true;
  } else {
    out.exponent = alpha / (1.0 + alpha);
  }
  return out;
}

GapIntegral gap_integral(double alpha, double tau, double eps, double R) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("gap_integral: alpha must lie in (0,1)");
  if (!(tau > 0.0) || !(eps > 0.0) || !(R > 0.0))
    throw std::invalid_argument("gap_integral: tau, eps, R must be positive");
  auto f = [&](double x) { return 1.0 / (eps + tau * std::pow(std::fabs(x), 1.0 + alpha)); };
  // split at the origin where the integrand peaks; integrand is even
  QuadratureResult half = integrate_adaptive(f, 0.0, R, 1e-10, 1e-10);
  GapIntegral out;
  out.value = 2.0 * half.value;
  out.leading = m_alpha_tau(alpha, tau) * std::pow(eps, -alpha / (1.0 + alpha));
  out.ratio = out.value / out.leading;
  out.converged = half.converged;
  return out;
}

ExampleConstants example_constants(const CurvilinearSquareGeometry& geom,
                                   const LameParameters& lame) {
  geom.validate();
  GapGeometry g = make_curvilinear_square_geometry(geom);
  const double a = geom.alpha;
  ExampleConstants out;
  out.tau0 = effective_tau0(geom.r1, geom.r2, a);

  const double tau0 = out.tau0;
  auto integrand = [&](double x) {
    const double s = std::fabs(x);
    return 1.0 / g.profile.gap(s) - 1.0 / (tau0 * std::pow(s, 1.0 + a));
  };
  // the integrand is bounded at the origin but its two terms individually blow
  // up; below s0 the difference is pure cancellation noise, so integrate from
  // s0 and close the strip with a rectangle (the integrand is flat there)
  const double s0 = 1e-7 * geom.r0;
  QuadratureResult half = integrate_adaptive(integrand, s0, geom.r0, 1e-10, 1e-10);
  out.c_star = 2.0 * (half.value + s0 * integrand(s0));
  out.converged = half.converged;

  const auto row = lame_row(2, lame);
  const double m = m_alpha_tau(a, tau0);
  for (int i = 0; i < 2; ++i) {
    out.k_star[i] = out.c_star - 2.0 * row[i] / (a * tau0 * std::pow(geom.r0, a));
    out.g_star[i] = out.k_star[i] / (row[i] * m);
  }
  return out;
}

}  // namespace gapstress
