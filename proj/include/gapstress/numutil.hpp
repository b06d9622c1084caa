#ifndef GAPSTRESS_NUMUTIL_HPP
#define GAPSTRESS_NUMUTIL_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gapstress {

/// Gamma function for x > 0, Lanczos approximation (g = 607/128, 15 terms).
/// Relative accuracy close to machine epsilon on (0, 170).
double gamma_fn(double x);

/// Bracketing root solver (bisection refined by secant steps).
/// f(a) and f(b) must have opposite signs.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-14);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7,15) on [a,b], recursive bisection.
/// Tolerances are split across subintervals; integrand must be finite on [a,b].
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol = 1e-10,
                                    double rel_tol = 1e-10, int max_depth = 60);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Log-log power-law fit y = C * x^slope; all inputs must be positive.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct PinnedRateFit {
  double limit = 0.0;        // v* in  y = v* + c * eps^p
  double coefficient = 0.0;  // c
  double residual = 0.0;     // max |y_i - fit_i| / scale
};

/// Least squares for y = v* + c * eps^p with the exponent p pinned.
/// Requires at least two samples; with exactly two it interpolates.
PinnedRateFit fit_pinned_rate(const std::vector<double>& eps, const std::vector<double>& y,
                              double p);

}  // namespace gapstress

#endif
