#include <doctest.h>

#include <cmath>

#include "gapstress/constants.hpp"
#include "gapstress/numutil.hpp"

using namespace gapstress;

TEST_CASE("gamma_alpha: special values and the reflection oracle") {
  CHECK(gamma_alpha(1.0) == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(gamma_alpha(0.5) == doctest::Approx(2.0 * M_PI / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(gamma_alpha(0.25) == doctest::Approx(M_PI / std::sin(0.8 * M_PI)).epsilon(1e-13));
  for (double a = 0.1; a < 0.95; a += 0.1) {
    const double oracle = M_PI / std::sin(M_PI / (1.0 + a));
    CHECK(std::fabs(gamma_alpha(a) - oracle) / oracle < 1e-12);
  }
  CHECK_THROWS_AS(gamma_alpha(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_alpha(-0.3), std::invalid_argument);
}

TEST_CASE("m_alpha_tau values and the full-line quadrature oracle") {
  CHECK(m_alpha_tau(1.0, 1.0) == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(m_alpha_tau(0.5, 1.0) ==
        doctest::Approx(2.0 * gamma_alpha(0.5) / 1.5).epsilon(1e-13));
  CHECK(m_alpha_tau(0.5, 1.0) == doctest::Approx(4.836799).epsilon(1e-6));

  // full-line integral of 1/(eps + |x|^{3/2}) equals M eps^{-1/3} exactly;
  // tail beyond L handled by the substitution x = t^{-2}
  const double eps = 1e-6;
  const double L = 1.0;
  auto head = integrate_adaptive(
      [&](double x) { return 1.0 / (eps + std::pow(std::fabs(x), 1.5)); }, 0.0, L, 1e-12,
      1e-12);
  auto tail = integrate_adaptive(
      [&](double t) { return 2.0 / (1.0 + eps * t * t * t); }, 0.0, 1.0 / std::sqrt(L),
      1e-12, 1e-12);
  const double integral = 2.0 * (head.value + tail.value);
  const double closed = m_alpha_tau(0.5, 1.0) * std::pow(eps, -1.0 / 3.0);
  CHECK(head.converged);
  CHECK(tail.converged);
  CHECK(std::fabs(integral - closed) / closed < 1e-6);
}

TEST_CASE("lame_row layout") {
  LameParameters l{1.0, 1.0};
  auto r2 = lame_row(2, l);
  CHECK(r2[0] == 1.0);
  CHECK(r2[1] == 3.0);
  auto r3 = lame_row(3, LameParameters{0.0, 2.0});
  CHECK(r3[0] == 2.0);
  CHECK(r3[1] == 2.0);
  CHECK(r3[2] == 4.0);
  for (double lam : {0.3, 1.7}) {
    for (double mu : {0.9, 2.4}) {
      auto row = lame_row(4, LameParameters{lam, mu});
      CHECK(row.back() - row.front() == doctest::Approx(lam + mu).epsilon(1e-15));
    }
  }
}

TEST_CASE("2-D rest exponent branches") {
  CHECK(rest_exponent_2d(0.5, 0.2) == doctest::Approx(0.25 / 9.0).epsilon(1e-12));
  CHECK(rest_exponent_2d(0.5, 1.0) == doctest::Approx(0.25 / 9.0).epsilon(1e-12));
  // continuity at the branch seam beta = alpha
  const double a = 0.5;
  CHECK(rest_exponent_2d(a, a - 1e-12) ==
        doctest::Approx(rest_exponent_2d(a, a + 1e-12)).epsilon(1e-9));
  for (double alpha = 0.1; alpha < 0.95; alpha += 0.1)
    for (double beta : {0.05, 0.5, 2.0}) CHECK(rest_exponent_2d(alpha, beta) >= 0.0);
}

TEST_CASE("higher-dimensional rest exponent branches") {
  CHECK(rest_exponent_hd(0.5, 3) == doctest::Approx(0.125 / 9.0).epsilon(1e-12));
  CHECK(rest_exponent_hd(0.5, 5) == doctest::Approx(0.25 / 6.0).epsilon(1e-12));
  CHECK(rest_exponent_hd(0.5, 4) == doctest::Approx(0.25 * 1.5 / 9.0).epsilon(1e-12));
  CHECK_THROWS_AS(rest_exponent_hd(0.5, 2), std::invalid_argument);
}

TEST_CASE("tilde_eps branch structure") {
  auto t1 = tilde_eps(0.5, 0.2);
  CHECK(t1.exponent == doctest::Approx(0.2 / 1.5).epsilon(1e-14));
  CHECK_FALSE(t1.has_log_factor);
  auto t2 = tilde_eps(0.5, 0.5);
  CHECK(t2.exponent == doctest::Approx(0.5 / 1.5).epsilon(1e-14));
  CHECK(t2.has_log_factor);
  auto t3 = tilde_eps(0.5, 2.0);
  CHECK(t3.exponent == doctest::Approx(0.5 / 1.5).epsilon(1e-14));
  CHECK_FALSE(t3.has_log_factor);
}

TEST_CASE("gap integral tracks its closed-form leading term") {
  auto gi = gap_integral(0.5, 1.0, 1e-6, 1.0);
  CHECK(gi.converged);
  CHECK(std::fabs(gi.ratio - 1.0) < 0.01);
  // the deviation is controlled by the eps^{alpha/(1+alpha)} channel
  const double channel = std::pow(1e-6, 1.0 / 3.0);
  CHECK(std::fabs(gi.ratio - 1.0) < 5.0 * channel);

  // evenness: the two half-line contributions agree
  auto half = integrate_adaptive(
      [&](double x) { return 1.0 / (1e-6 + std::pow(std::fabs(x), 1.5)); }, 0.0, 1.0,
      1e-10, 1e-10);
  CHECK(gi.value == doctest::Approx(2.0 * half.value).epsilon(1e-10));

  // doubling R adds only the bounded tail integral, independently of eps
  for (double eps : {1e-6, 1e-8}) {
    auto a = gap_integral(0.5, 1.0, eps, 1.0);
    auto b = gap_integral(0.5, 1.0, eps, 2.0);
    const double tail = 2.0 * (2.0 / std::sqrt(1.0) - 2.0 / std::sqrt(2.0));
    CHECK(std::fabs((b.value - a.value) - tail) < 1e-3 * tail);
  }
}

TEST_CASE("gap integral correction exponent follows the branch structure") {
  // profiles with a correction term: gap = tau s^{1+a} + tau_c s^{1+a+b};
  // the deviation of I(eps) eps^{a/(1+a)} from M decays like eps^{min(b,a)/(1+a)}
  const double alpha = 0.5;
  auto deviation = [&](double beta, double tau_c, double eps) {
    auto f = [&](double x) {
      const double s = std::fabs(x);
      return 1.0 / (eps + std::pow(s, 1.0 + alpha) + tau_c * std::pow(s, 1.0 + alpha + beta));
    };
    auto head = integrate_adaptive(f, 0.0, 1.0, 1e-12, 1e-12);
    const double lead = m_alpha_tau(alpha, 1.0) * std::pow(eps, -alpha / (1.0 + alpha));
    return std::fabs(2.0 * head.value / lead - 1.0);
  };
  for (double beta : {0.3, 0.8}) {
    std::vector<double> eps_list = {1e-6, 1e-8, 1e-10};
    std::vector<double> devs;
    for (double e : eps_list) devs.push_back(deviation(beta, 0.5, e));
    auto fit = fit_loglog(eps_list, devs);
    const double want = std::min(beta, alpha) / (1.0 + alpha);
    CHECK(fit.slope >= want - 0.05);
  }
}

TEST_CASE("example constants of the curvilinear squares") {
  CurvilinearSquareGeometry q;
  q.r1 = 1.0;
  q.r2 = 2.0;
  q.alpha = 0.5;
  q.r0 = 0.45;
  q.epsilon = 1e-4;
  LameParameters lame{1.0, 1.0};
  auto ec = example_constants(q, lame);
  CHECK(ec.converged);
  CHECK(ec.tau0 == doctest::Approx(effective_tau0(1.0, 2.0, 0.5)).epsilon(1e-13));

  // integrand of C* stays bounded near the origin
  GapGeometry g = make_curvilinear_square_geometry(q);
  double bound = 0.0;
  for (double s : {1e-4, 1e-3, 1e-2}) {
    const double v = std::fabs(1.0 / g.profile.gap(s) -
                               1.0 / (ec.tau0 * std::pow(s, 1.5)));
    bound = std::max(bound, v);
  }
  CHECK(bound < 10.0);  // bounded, not blowing up like the 1/s^{3/2} pieces

  // K*_1 - K*_2 = 2 (lambda + mu) / (alpha tau0 r0^alpha)
  const double expected =
      2.0 * (lame.lambda + lame.mu) / (q.alpha * ec.tau0 * std::pow(q.r0, q.alpha));
  CHECK(ec.k_star[0] - ec.k_star[1] == doctest::Approx(expected).epsilon(1e-10));

  // G* has the sign of K*
  for (int i = 0; i < 2; ++i)
    CHECK((ec.g_star[i] > 0) == (ec.k_star[i] > 0));
}

TEST_CASE("asymptotic constants validate ellipticity") {
  AsymptoticConstants c;
  c.lame = {1.0, 1.0};
  CHECK_NOTHROW(c.validate());
  CHECK(c.kappa3() > 0.0);
  AsymptoticConstants bad = c;
  bad.lame = {-2.0, 1.0};  // d*lambda + 2*mu = -2 < 0
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
