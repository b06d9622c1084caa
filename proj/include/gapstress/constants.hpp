#ifndef GAPSTRESS_CONSTANTS_HPP
#define GAPSTRESS_CONSTANTS_HPP

#include <utility>
#include <vector>

#include "gapstress/geometry.hpp"

namespace gapstress {

struct LameParameters {
  double lambda = 1.0;
  double mu = 1.0;
};

/// Parameter bundle entering the asymptotic formulas, with the ellipticity
/// bounds kappa3 <= mu, d lambda + 2 mu <= 1/kappa3 recorded.
struct AsymptoticConstants {
  double alpha = 0.5;
  double beta = 1.0;
  double tau = 1.0;
  int dim = 2;
  LameParameters lame;

  double kappa3() const;
  void validate() const;  // throws unless mu > 0 and d*lambda + 2*mu > 0
};

/// Gamma_alpha = Gamma(1/(1+alpha)) * Gamma(alpha/(1+alpha));
/// equals pi / sin(pi/(1+alpha)) by the reflection formula.
double gamma_alpha(double alpha);

/// M_{alpha,tau} = 2 Gamma_alpha / ((1+alpha) tau^{1/(1+alpha)}).
double m_alpha_tau(double alpha, double tau);

/// (mu, ..., mu, lambda + 2 mu), length d.
std::vector<double> lame_row(int dim, const LameParameters& lame);

/// Rest-term exponent of the two-dimensional expansion (branches alpha > beta
/// and alpha <= beta).
double rest_exponent_2d(double alpha, double beta);

/// Rest-term exponent in dimension d >= 3 (three branches d=3, d=4, d>=5).
double rest_exponent_hd(double alpha, int dim);

struct TildeEps {
  double exponent = 0.0;
  bool has_log_factor = false;  // the alpha == beta branch carries |ln eps|
};

/// Convergence-rate exponent of the diagonal-energy expansion in 2-D.
TildeEps tilde_eps(double alpha, double beta);

struct GapIntegral {
  double value = 0.0;            // integral over |x| < R of dx/(eps + tau |x|^{1+alpha})
  double leading = 0.0;          // M_{alpha,tau} eps^{-alpha/(1+alpha)}
  double ratio = 0.0;            // value / leading
  bool converged = false;
};

/// Quadrature of the scalar gap integral plus its closed-form leading term.
GapIntegral gap_integral(double alpha, double tau, double eps, double R);

struct ExampleConstants {
  double tau0 = 0.0;
  double c_star = 0.0;   // integral of 1/(h1-h) - 1/(tau0 |x|^{1+alpha}) over |x| < r0
  double k_star[2] = {0.0, 0.0};  // per Lame row entry (the formula carries L_2^i)
  double g_star[2] = {0.0, 0.0};
  bool converged = false;
};

/// Second-order geometry constants of the curvilinear-square example.
ExampleConstants example_constants(const CurvilinearSquareGeometry& geom,
                                   const LameParameters& lame);

}  // namespace gapstress

#endif
