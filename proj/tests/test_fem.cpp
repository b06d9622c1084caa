#include <doctest.h>

#include <cmath>
#include <random>

#include "gapstress/fem.hpp"
#include "gapstress/constants.hpp"
#include "gapstress/geometry.hpp"

using namespace gapstress;

namespace {

GapGeometry default_power(double eps) {
  PowerGeometryParams p;
  p.alpha = 0.5;
  p.tau = 1.0;
  p.R = 0.5;
  p.epsilon = eps;
  return make_power_geometry(p);
}

MeshParams coarse_params() {
  MeshParams mp;
  mp.n_layers = 4;
  mp.c_g = 0.7;
  mp.h_max = 0.35;
  return mp;
}

FieldSolution interpolate(const std::shared_ptr<const GapMesh>& mesh,
                          const std::function<Vec2(const Vec2&)>& f) {
  FieldSolution u;
  u.mesh = mesh;
  u.values.resize(2 * mesh->node_count());
  for (int n = 0; n < mesh->node_count(); ++n) {
    const Vec2 v = f(mesh->nodes[n]);
    u.values[2 * n] = v.x;
    u.values[2 * n + 1] = v.y;
  }
  return u;
}

}  // namespace

TEST_CASE("elasticity tensor: symmetries and ellipticity bounds") {
  ElasticityTensor c{{1.3, 0.8}, 2};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          CHECK(c.component(i, j, k, l) == c.component(k, l, i, j));
          CHECK(c.component(i, j, k, l) == c.component(k, l, j, i));
        }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double lo = std::min(2.0 * 0.8, 2.0 * 1.3 + 2.0 * 0.8);
  const double hi = std::max(2.0 * 0.8, 2.0 * 1.3 + 2.0 * 0.8);
  for (int t = 0; t < 50; ++t) {
    Mat2 xi;
    xi.m[0][0] = uni(rng);
    xi.m[1][1] = uni(rng);
    xi.m[0][1] = xi.m[1][0] = uni(rng);
    double norm2 = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) norm2 += xi.m[i][j] * xi.m[i][j];
    const double quad = c.energy_density(xi, xi);
    CHECK(quad >= lo * norm2 - 1e-12);
    CHECK(quad <= hi * norm2 + 1e-12);
  }
}

TEST_CASE("mesh: gap layers, Jacobians, grading") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params());
  CHECK(mesh->min_jacobian > 0.0);
  CHECK(mesh->n_rows == 2 * 4 + 1);  // n_layers quads across every cross-section
  CHECK(mesh->gap_cols >= 4);
  // grading: tangential spacing tracks delta inside the gap
  for (int i = 2; i + 2 <= mesh->gap_cols; i += 2) {
    const double dx = mesh->col_x[i + 2] - mesh->col_x[i];
    const double delta = g.epsilon + g.profile.gap(std::fabs(mesh->col_x[i + 1]));
    CHECK(dx <= 1.05 * std::max(0.7 * delta, coarse_params().h_max));
  }

  // halving eps at fixed grading keeps the layer count (structural invariant)
  GapGeometry g2 = default_power(5e-3);
  auto mesh2 = build_gap_mesh(g2, coarse_params());
  CHECK(mesh2->n_rows == mesh->n_rows);
  CHECK(mesh2->min_jacobian > 0.0);
}

TEST_CASE("mesh: annulus-like smoke geometry is quasi-uniform") {
  GapGeometry g = default_power(0.3);  // large gap: grading cap everywhere
  MeshParams mp = coarse_params();
  auto mesh = build_gap_mesh(g, mp);
  CHECK(mesh->min_jacobian > 0.0);
  double dmin = 1e300, dmax = 0.0;
  for (int i = 0; i + 2 <= mesh->gap_cols; i += 2) {
    const double dx = mesh->col_x[i + 2] - mesh->col_x[i];
    dmin = std::min(dmin, dx);
    dmax = std::max(dmax, dx);
  }
  CHECK(dmax / dmin < 4.0);
}

TEST_CASE("scalar Laplace self-test obeys the maximum principle") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params());
  auto v = solve_scalar_laplace(mesh);
  double lo = 1e300, hi = -1e300;
  for (int n = 0; n < mesh->node_count(); ++n) {
    lo = std::min(lo, v.values[2 * n]);
    hi = std::max(hi, v.values[2 * n]);
  }
  CHECK(lo >= -1e-10);
  CHECK(hi <= 1.0 + 1e-10);
  // in the gap the solution is close to the linear profile vbar
  const Vec2 probe{0.1, g.lower_height(0.1) + 0.5 * (g.epsilon + g.profile.gap(0.1))};
  CHECK(value_at(v, probe).x == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("stiffness is SPD and rigid data is reproduced exactly") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params());
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  SubproblemSolver solver(mesh, tensor);
  CHECK(solver.rayleigh_probe() > 0.0);

  // u_k + u_0(phi = psi_k) = psi_k in the discrete space
  RigidBasis basis(2);
  for (int k : {1, 3}) {
    FieldSolution uk = solver.solve_rigid(k);
    CHECK(uk.residual < 1e-10);
    PhiField phi;
    phi.dim = 2;
    phi.value = [k](std::span<const double> x, std::span<double> out) {
      RigidBasis b(2);
      auto v = b.value(k, x);
      out[0] = v[0];
      out[1] = v[1];
    };
    phi.jacobian = [k](std::span<const double>, std::span<double> out) {
      RigidBasis b(2);
      DMat g = b.gradient(k);
      out[0] = g(0, 0);
      out[1] = g(0, 1);
      out[2] = g(1, 0);
      out[3] = g(1, 1);
    };
    FieldSolution u0 = solver.solve_boundary_data(phi);
    double worst = 0.0;
    for (int n = 0; n < mesh->node_count(); ++n) {
      const Vec2 psi = basis.value2(k, mesh->nodes[n]);
      worst = std::max(worst, std::fabs(uk.values[2 * n] + u0.values[2 * n] - psi.x));
      worst = std::max(worst, std::fabs(uk.values[2 * n + 1] + u0.values[2 * n + 1] - psi.y));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("well-separated annulus: bounded gradients, refinement-stable") {
  GapGeometry g = default_power(0.3);
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  auto coarse = build_gap_mesh(g, coarse_params());
  auto fine = build_gap_mesh(g, coarse_params().refined(1.6));
  FieldSolution uc = SubproblemSolver(coarse, tensor).solve_rigid(1);
  FieldSolution uf = SubproblemSolver(fine, tensor).solve_rigid(1);
  double mc = 0.0, mf = 0.0;
  for (double x1 = -0.8; x1 <= 0.8; x1 += 0.1) {
    const double mid = g.lower_height(x1) + 0.5 * (g.epsilon + g.profile.gap(std::fabs(x1)));
    const Vec2 p{x1, mid};
    mc = std::max(mc, gradient_at(uc, p).frobenius());
    mf = std::max(mf, gradient_at(uf, p).frobenius());
  }
  CHECK(mc < 50.0);
  CHECK(std::fabs(mc - mf) / mf < 0.02);
}

TEST_CASE("energy inner product: symmetry, positivity, rigid null") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params());
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  SubproblemSolver solver(mesh, tensor);
  FieldSolution u1 = solver.solve_rigid(1);
  FieldSolution u3 = solver.solve_rigid(3);
  const double a13 = energy_inner(tensor, u1, u3);
  const double a31 = energy_inner(tensor, u3, u1);
  CHECK(std::fabs(a13 - a31) <=
        1e-12 * std::sqrt(energy_inner(tensor, u1, u1) * energy_inner(tensor, u3, u3)));
  CHECK(energy_inner(tensor, u1, u1) > 0.0);

  RigidBasis basis(2);
  FieldSolution rigid = interpolate(mesh, [&](const Vec2& p) { return basis.value2(3, p); });
  const double zero = energy_inner(tensor, rigid, rigid);
  CHECK(std::fabs(zero) < 1e-18 * energy_inner(tensor, u1, u1) + 1e-14);
}

TEST_CASE("diagonal gap energy follows the leading closed form") {
  // a_ii eps^{1/3} approaches L_2^i M_{1/2,1}; at eps = 1e-3 the O(1) remainder
  // is still visible, so this unit check uses a wide band (the 10% version at
  // eps = 1e-5 runs in the acceptance suite)
  const double eps = 1e-3;
  GapGeometry g = default_power(eps);
  MeshParams mp;
  mp.n_layers = 6;
  mp.c_g = 0.5;
  mp.h_max = 0.25;
  auto mesh = build_gap_mesh(g, mp);
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  SubproblemSolver solver(mesh, tensor);
  FieldSolution u1 = solver.solve_rigid(1);
  FieldSolution u2 = solver.solve_rigid(2);
  const double m = 4.8367983091699329;  // 2 Gamma_{1/2} / (3/2)
  const double r11 = energy_inner(tensor, u1, u1) * std::pow(eps, 1.0 / 3.0) / (1.0 * m);
  const double r22 = energy_inner(tensor, u2, u2) * std::pow(eps, 1.0 / 3.0) / (3.0 * m);
  CHECK(r11 == doctest::Approx(1.0).epsilon(0.3));
  CHECK(r22 == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("boundary flux cross-checks the volume energies") {
  GapGeometry g = default_power(1e-2);
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  auto mesh = build_gap_mesh(g, coarse_params().refined(3.0));
  SubproblemSolver solver(mesh, tensor);
  std::vector<FieldSolution> u;
  for (int i = 1; i <= 3; ++i) u.push_back(solver.solve_rigid(i));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double vol = energy_inner(tensor, u[i], u[j]);
      const double flux = -boundary_flux_functional(tensor, u[i], j + 1);
      const double scale =
          std::sqrt(energy_inner(tensor, u[i], u[i]) * energy_inner(tensor, u[j], u[j]));
      CHECK(std::fabs(vol - flux) / scale < 0.01);
    }
  }

  // rigid interpolant has zero traction
  RigidBasis basis(2);
  FieldSolution rigid = interpolate(mesh, [&](const Vec2& p) { return basis.value2(3, p); });
  CHECK(std::fabs(boundary_flux_functional(tensor, rigid, 1)) < 1e-10);
}

TEST_CASE("flux-volume mismatch shrinks under refinement") {
  GapGeometry g = default_power(1e-2);
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  auto mismatch = [&](const MeshParams& mp) {
    auto mesh = build_gap_mesh(g, mp);
    SubproblemSolver solver(mesh, tensor);
    FieldSolution u1 = solver.solve_rigid(1);
    const double vol = energy_inner(tensor, u1, u1);
    return std::fabs(vol + boundary_flux_functional(tensor, u1, 1)) / vol;
  };
  const double coarse = mismatch(coarse_params().refined(1.5));
  const double fine = mismatch(coarse_params().refined(3.0));
  CHECK(fine < 0.7 * coarse);
}

TEST_CASE("gradient evaluation: affine exactness and smooth-field accuracy") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params().refined(2.0));
  RigidBasis basis(2);
  FieldSolution rot = interpolate(mesh, [&](const Vec2& p) { return basis.value2(3, p); });
  const Mat2 grad = gradient_at(rot, {0.2, g.lower_height(0.2) + 0.004});
  CHECK(grad.m[0][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(grad.m[0][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(grad.m[1][0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(grad.m[1][1] == doctest::Approx(0.0).epsilon(1e-12));

  // interpolated vbar e_1 against the analytic gap-field gradient
  FieldSolution vb = interpolate(mesh, [&](const Vec2& p) {
    const double s = std::fabs(p.x);
    if (s > 2.0 * g.profile.R) return Vec2{0.0, 0.0};
    const double h = g.lower_height(p.x);
    const double delta = g.epsilon + g.profile.gap(s);
    const double t = (p.y - h) / delta;
    if (t < -0.01 || t > 1.01) return Vec2{0.0, 0.0};
    return Vec2{t, 0.0};
  });
  for (double x1 : {0.35, 0.6, -0.45}) {
    const double delta = g.epsilon + g.profile.gap(std::fabs(x1));
    const Vec2 p{x1, g.lower_height(x1) + 0.37 * delta};
    const Mat2 got = gradient_at(vb, p);
    const Mat2 want = ubar2_gradient(g, 1, p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::fabs(got.m[i][j] - want.m[i][j]) <= 5e-3 * want.max_abs() + 1e-9);
  }
}

TEST_CASE("pipeline stays healthy away from the default exponent") {
  PowerGeometryParams p;
  p.alpha = 0.25;
  p.tau = 0.8;
  p.R = 0.4;
  p.epsilon = 1e-2;
  GapGeometry g = make_power_geometry(p);
  auto mesh = build_gap_mesh(g, coarse_params());
  CHECK(mesh->min_jacobian > 0.0);
  ElasticityTensor tensor{{1.4, 0.9}, 2};
  SubproblemSolver solver(mesh, tensor);
  FieldSolution u1 = solver.solve_rigid(1);
  const double a11 = energy_inner(tensor, u1, u1);
  // leading law mu M_{alpha,tau} eps^{-alpha/(1+alpha)} within a loose band
  const double m = m_alpha_tau(0.25, 0.8);
  const double lead = 0.9 * m * std::pow(p.epsilon, -0.25 / 1.25);
  CHECK(a11 > 0.5 * lead);
  CHECK(a11 < 2.5 * lead);
}

TEST_CASE("conjugate-gradient backend matches the direct factorization") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params());
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  SolverOptions direct;
  SolverOptions cg;
  cg.method = "cg";
  FieldSolution ud = SubproblemSolver(mesh, tensor, direct).solve_rigid(1);
  FieldSolution uc = SubproblemSolver(mesh, tensor, cg).solve_rigid(1);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < ud.values.size(); ++k) {
    worst = std::max(worst, std::fabs(ud.values[k] - uc.values[k]));
    scale = std::max(scale, std::fabs(ud.values[k]));
  }
  CHECK(worst < 1e-7 * scale);
  CHECK(uc.residual < 1e-9);
}

TEST_CASE("Dirichlet data is met exactly at boundary nodes") {
  GapGeometry g = default_power(1e-2);
  auto mesh = build_gap_mesh(g, coarse_params());
  ElasticityTensor tensor{{1.0, 1.0}, 2};
  SubproblemSolver solver(mesh, tensor);
  RigidBasis basis(2);
  FieldSolution u3 = solver.solve_rigid(3);
  for (int node : mesh->inclusion_nodes) {
    const Vec2 psi = basis.value2(3, mesh->nodes[node]);
    CHECK(u3.values[2 * node] == psi.x);
    CHECK(u3.values[2 * node + 1] == psi.y);
  }
  for (int node : mesh->outer_nodes) {
    CHECK(u3.values[2 * node] == 0.0);
    CHECK(u3.values[2 * node + 1] == 0.0);
  }
}

TEST_CASE("two-sided gradient jumps are at discretization size") {
  GapGeometry g = default_power(0.3);
  MeshParams mp = coarse_params();
  mp.h_max = 0.12;
  auto mesh = build_gap_mesh(g, mp);
  FieldSolution smooth = interpolate(mesh, [](const Vec2& p) {
    return Vec2{std::sin(p.x) * std::cos(p.y), p.x * p.x - 0.3 * p.y * p.y};
  });
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-0.7, 0.7);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x1 = ux(rng);
    const double delta = g.epsilon + g.profile.gap(std::fabs(x1));
    const Vec2 p{x1, g.lower_height(x1) + 0.5 * delta};
    const Mat2 a = gradient_at(smooth, {p.x - 1e-9, p.y});
    const Mat2 b = gradient_at(smooth, {p.x + 1e-9, p.y});
    worst = std::max(worst, (a - b).max_abs());
  }
  CHECK(worst < 0.02);
}
