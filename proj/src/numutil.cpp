#include "gapstress/numutil.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace gapstress {

namespace {

// Lanczos coefficients for g = 607/128 (Godfrey's 15-term set).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,    -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,  0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

// Gamma(z+1) for z >= 0.
double gamma_plus_one(double z) {
  double acc = kLanczos[0];
  for (int k = 1; k < 15; ++k) acc += kLanczos[k] / (z + k);
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("gamma_fn: requires x > 0");
  if (x < 1.0) return gamma_plus_one(x) / x;
  return gamma_plus_one(x - 1.0);
}

double find_root(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("find_root: endpoints do not bracket a root");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    // secant candidate, kept only if it stays inside the bracket
    double sec = b - fb * (b - a) / (fb - fa);
    double c = (sec > std::min(a, b) && sec < std::max(a, b) && it % 2 == 0) ? sec : mid;
    double fc = f(c);
    if (fc == 0.0 || std::fabs(b - a) < tol * (1.0 + std::fabs(c))) return c;
    if (fa * fc < 0.0) {
      b = c;
      fb = fc;
    } else {
      a = c;
      fa = fc;
    }
  }
  return 0.5 * (a + b);
}

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] (symmetric half listed).
constexpr double kKronrodX[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                                 0.741531185599394, 0.586087235467691, 0.405845151377397,
                                 0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                                 0.140653259715525, 0.169004726639267, 0.190350578064785,
                                 0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                               0.417959183673469};

void gk15(const std::function<double(double)>& f, double a, double b, double& result,
          double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kKronrodX[i]);
    fv[14 - i] = f(c + h * kKronrodX[i]);
  }
  fv[7] = f(c);
  double resk = 0.0;
  for (int i = 0; i < 7; ++i) resk += kKronrodW[i] * (fv[i] + fv[14 - i]);
  resk += kKronrodW[7] * fv[7];
  double resg = kGaussW[3] * fv[7];
  for (int i = 0; i < 3; ++i) resg += kGaussW[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  result = resk * h;
  err = std::fabs((resk - resg) * h);
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol, double rel_tol,
                                    int max_depth) {
  // globally adaptive: always split the interval with the largest error estimate
  std::priority_queue<Interval> queue;
  double total = 0.0, err = 0.0;
  {
    Interval w{a, b, 0.0, 0.0};
    gk15(f, a, b, w.value, w.error);
    total = w.value;
    err = w.error;
    queue.push(w);
  }
  const long max_intervals = 1L << std::min(max_depth, 18);
  QuadratureResult out;
  long n = 1;
  while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && n < max_intervals) {
    Interval w = queue.top();
    queue.pop();
    const double m = 0.5 * (w.a + w.b);
    if (m <= w.a || m >= w.b) {  // interval at floating-point resolution
      w.error = 0.0;
      queue.push(w);
      continue;
    }
    Interval l{w.a, m, 0.0, 0.0}, r{m, w.b, 0.0, 0.0};
    gk15(f, l.a, l.b, l.value, l.error);
    gk15(f, r.a, r.b, r.value, r.error);
    total += l.value + r.value - w.value;
    err += l.error + r.error - w.error;
    queue.push(l);
    queue.push(r);
    ++n;
  }
  out.value = total;
  out.error_estimate = err;
  out.intervals = static_cast<int>(n);
  out.converged = err <= std::max(abs_tol, rel_tol * std::fabs(total));
  return out;
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_linear: need >= 2 samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog: inputs must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_linear(lx, ly);
}

PinnedRateFit fit_pinned_rate(const std::vector<double>& eps, const std::vector<double>& y,
                              double p) {
  if (eps.size() != y.size() || eps.size() < 2)
    throw std::invalid_argument("fit_pinned_rate: need >= 2 samples");
  // normal equations for basis {1, eps^p}
  double s0 = static_cast<double>(eps.size());
  double s1 = 0, s2 = 0, b0 = 0, b1 = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double t = std::pow(eps[i], p);
    s1 += t;
    s2 += t * t;
    b0 += y[i];
    b1 += y[i] * t;
  }
  const double denom = s0 * s2 - s1 * s1;
  if (denom == 0.0) throw std::invalid_argument("fit_pinned_rate: degenerate abscissae");
  PinnedRateFit fit;
  fit.limit = (s2 * b0 - s1 * b1) / denom;
  fit.coefficient = (s0 * b1 - s1 * b0) / denom;
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) scale = 1.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double pred = fit.limit + fit.coefficient * std::pow(eps[i], p);
    fit.residual = std::max(fit.residual, std::fabs(y[i] - pred) / scale);
  }
  return fit;
}

}  // namespace gapstress
