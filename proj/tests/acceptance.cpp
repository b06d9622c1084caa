// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "gapstress/harness.hpp"

using namespace gapstress;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

ExperimentConfig power_config(const char* phi_kind) {
  ExperimentConfig cfg;
  cfg.geometry.kind = "power";
  cfg.geometry.alpha = 0.5;
  cfg.geometry.beta = 1.0;
  cfg.geometry.tau = 1.0;
  cfg.geometry.R = 0.5;
  cfg.lame = {1.0, 1.0};
  cfg.phi.kind = phi_kind;
  cfg.phi.rigid_index = 3;
  cfg.eps_list = {1e-3, 1e-4, 1e-5};
  cfg.mesh.n_layers = 6;
  cfg.mesh.c_g = 0.5;
  cfg.mesh.h_max = 0.25;
  cfg.cert_tol = 0.01;
  cfg.cert_factor = 1.4;
  cfg.workers = 2;
  return cfg;
}

PhiField rigid_trace(int k) {
  PhiDescriptor d;
  d.kind = "rigid";
  d.rigid_index = k;
  return make_phi(d);
}

constexpr double kM05 = 4.8367983091699329;  // M_{1/2,1}

// ---------------------------------------------------------------------------

void criterion_1() {
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    const double oracle = M_PI / std::sin(M_PI / (1.0 + a));
    worst = std::max(worst, std::fabs(gamma_alpha(a) - oracle) / oracle);
  }
  const double mpi = std::fabs(m_alpha_tau(1.0, 1.0) - M_PI) / M_PI;
  report(1, worst < 1e-12 && mpi < 1e-12, "closed-form constant oracle",
         fmt("max gamma_alpha dev %.2e, m_alpha_tau(1,1) dev %.2e", worst, mpi));
}

void criterion_2() {
  auto g6 = gap_integral(0.5, 1.0, 1e-6, 1.0);
  auto g9 = gap_integral(0.5, 1.0, 1e-9, 1.0);
  const double d6 = std::fabs(g6.ratio - 1.0);
  const double d9 = std::fabs(g9.ratio - 1.0);
  report(2, g6.converged && g9.converged && d6 < 0.01 && d9 < 0.001,
         "scalar gap-integral asymptotic",
         fmt("dev %.4f%% at 1e-6, %.4f%% at 1e-9", 100 * d6, 100 * d9));
}

void criterion_3(const SweepData& sweep) {
  const SweepRecord& r = sweep.points.back().record;  // eps = 1e-5
  const double r11 = r.a[0][0] * std::pow(r.eps, 1.0 / 3.0) / (1.0 * kM05);
  const double r22 = r.a[1][1] * std::pow(r.eps, 1.0 / 3.0) / (3.0 * kM05);
  const bool pass = r.ok && r.certified && r11 >= 0.9 && r11 <= 1.1 && r22 >= 0.9 &&
                    r22 <= 1.1;
  report(3, pass, "diagonal energy asymptotic at eps=1e-5",
         fmt("a11 ratio %.4f, a22 ratio %.4f, certified=%d (delta %.2e)", r11, r22,
             r.certified ? 1 : 0, r.cert_delta));
}

void criterion_4(const SweepData& generic, const SweepData& rigid) {
  std::vector<SweepRecord> grec, rrec;
  for (auto& p : generic.points) grec.push_back(p.record);
  for (auto& p : rigid.points) rrec.push_back(p.record);
  const LinearFit gf = fit_rate(grec, "max_grad_x0");
  const LinearFit rf = fit_rate(rrec, "max_grad_x0");
  const bool pass = std::fabs(gf.slope + 2.0 / 3.0) <= 0.1 && std::fabs(rf.slope) < 0.05;
  report(4, pass, "blow-up rate on the axis",
         fmt("generic slope %.4f (target -0.6667 +- 0.1), rigid slope %.4f", gf.slope,
             rf.slope));
}

void criterion_5(const SweepData& generic) {
  // linear-system exactness on every sweep point
  double worst_res = 0.0;
  for (const auto& p : generic.points) {
    DMat a(3, 3);
    DVec y(3), c(3);
    for (int i = 0; i < 3; ++i) {
      y[i] = p.record.q[i];
      c[i] = p.record.c[i];
      for (int j = 0; j < 3; ++j) a(i, j) = p.record.a[i][j];
    }
    DVec r = matvec(a, c);
    for (int i = 0; i < 3; ++i) r[i] = y[i] - r[i];
    worst_res = std::max(worst_res, norm2(r) / norm2(y));
  }

  // rigid-trace data: unit coefficients and a strain-free reconstruction
  ExperimentConfig cfg = power_config("generic");
  const GapGeometry geom = cfg.geometry.build(1e-3);
  auto mesh = build_gap_mesh(geom, cfg.mesh);
  ElasticityTensor tensor{cfg.lame, 2};
  SubproblemSolver solver(mesh, tensor, cfg.solver);
  SolutionBundle bundle;
  bundle.tensor = tensor;
  bundle.fields.push_back(solver.solve_boundary_data(rigid_trace(3)));
  for (int i = 1; i <= 3; ++i) bundle.fields.push_back(solver.solve_rigid(i));
  ConcentrationSystem sys = assemble_system(bundle, geom.epsilon);
  double worst_c = 0.0;
  for (int i = 0; i < 3; ++i)
    worst_c = std::max(worst_c, std::fabs(sys.c[i] - (i == 2 ? 1.0 : 0.0)));
  double worst_strain = 0.0;
  for (double x1 : {0.0, 0.3, -0.6}) {
    const double delta = geom.epsilon + geom.profile.gap(std::fabs(x1));
    const Vec2 p{x1, geom.lower_height(x1) + 0.5 * delta};
    worst_strain = std::max(worst_strain,
                            reconstruct_gradient(bundle, sys.c, p).sym().max_abs());
  }
  const bool pass = worst_res <= 1e-10 && worst_c <= 1e-6 && worst_strain <= 1e-8;
  report(5, pass, "linear-system exactness and rigid-trace null test",
         fmt("residual %.2e, |C - e_3| %.2e, strain %.2e", worst_res, worst_c,
             worst_strain));
}

void criterion_6() {
  ExperimentConfig cfg = power_config("generic");
  const GapGeometry geom = cfg.geometry.build(1e-3);
  ElasticityTensor tensor{cfg.lame, 2};
  auto mismatch = [&](const MeshParams& mp) {
    auto mesh = build_gap_mesh(geom, mp);
    SubproblemSolver solver(mesh, tensor, cfg.solver);
    std::vector<FieldSolution> u;
    for (int i = 1; i <= 3; ++i) u.push_back(solver.solve_rigid(i));
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        const double vol = energy_inner(tensor, u[i], u[j]);
        const double flux = -boundary_flux_functional(tensor, u[i], j + 1);
        const double scale = std::sqrt(energy_inner(tensor, u[i], u[i]) *
                                       energy_inner(tensor, u[j], u[j]));
        worst = std::max(worst, std::fabs(vol - flux) / scale);
      }
    }
    return worst;
  };
  const double coarse = mismatch(cfg.mesh);
  const double fine = mismatch(cfg.mesh.refined(2.0));
  const bool pass = fine < 0.01 && fine < 0.7 * coarse;
  report(6, pass, "Green-identity flux cross-check",
         fmt("mismatch %.3f%% coarse, %.3f%% fine (ratio %.2f)", 100 * coarse, 100 * fine,
             fine / coarse));
}

void criterion_7() {
  ExperimentConfig cfg = power_config("generic");
  const GapGeometry geom = cfg.geometry.build(1e-3);
  auto mesh = build_gap_mesh(geom, cfg.mesh);
  ElasticityTensor tensor{cfg.lame, 2};
  const PhiField phi = make_phi(cfg.phi);
  SubproblemSolver solver(mesh, tensor, cfg.solver);
  SolutionBundle bundle;
  bundle.tensor = tensor;
  bundle.fields.push_back(solver.solve_boundary_data(phi));
  for (int i = 1; i <= 3; ++i) bundle.fields.push_back(solver.solve_rigid(i));
  ConcentrationSystem sys = assemble_system(bundle, geom.epsilon);
  auto mono = solve_constrained_monolithic(mesh, tensor, phi, cfg.solver);

  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> ux(-0.95, 0.95);
  std::uniform_real_distribution<double> ut(0.05, 0.95);
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x1 = ux(rng);
    const double delta = geom.epsilon + geom.profile.gap(std::fabs(x1));
    const Vec2 p{x1, geom.lower_height(x1) + ut(rng) * delta};
    const Mat2 a = reconstruct_gradient(bundle, sys.c, p);
    const Mat2 b = gradient_at(mono.field, p);
    worst = std::max(worst, (a - b).max_abs());
    scale = std::max(scale, b.max_abs());
  }
  const bool pass = worst <= 1e-6 * scale;
  report(7, pass, "decomposition equals the constrained monolithic solve",
         fmt("rel Linf %.2e over 50 gap points", worst / scale));
}

void criterion_8(const SweepData& generic) {
  StarredData sd = estimate_starred(generic.concentration_points(), 0.5);
  double worst = 0.0;
  for (const auto& f : sd.q_fits)
    worst = std::max(worst, std::fabs(f.two_point - f.value) / std::fabs(f.value));
  const auto& a33 = sd.a_fits[8];
  worst = std::max(worst, std::fabs(a33.two_point - a33.value) / std::fabs(a33.value));

  bool pd_extrapolated = sd.positive_definite();
  // synthetic d=3 data must also pass the positivity surrogate
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  DMat b(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) b(i, j) = uni(rng);
  DMat a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = (i == j) ? 1.0 : 0.0;
      for (int k = 0; k < 6; ++k) s += b(k, i) * b(k, j);
      a(i, j) = s;
    }
  DVec q(6, 0.3);
  BlowupMatrices bm = blowup_matrices(make_starred_from_matrix(a, q, 0.5, 3));
  const bool pass = worst < 0.01 && pd_extrapolated && bm.positive_definite && bm.det_a > 0;
  report(8, pass, "starred-data self-consistency and positivity",
         fmt("max 2pt-vs-3pt drift %.3f%%, extrapolated PD=%d, synthetic PD=%d",
             100 * worst, pd_extrapolated ? 1 : 0, bm.positive_definite ? 1 : 0));
}

void criterion_9(const SweepData& generic) {
  // (a) default power scenario: monotone decay, <= 15% at eps = 1e-4
  StarredData sd = estimate_starred(generic.concentration_points(), 0.5);
  std::vector<SweepRecord> recs;
  for (auto& p : generic.points) recs.push_back(p.record);
  CompareTable table = compare_asymptotics(recs, sd, generic.cfg);
  bool pass_a = table.hypotheses_met && table.rows.size() == 3;
  std::string detail_a = "hypotheses unmet";
  if (pass_a) {
    pass_a = table.rows[1].err_x0 < table.rows[0].err_x0 &&
             table.rows[2].err_x0 < table.rows[1].err_x0 && table.rows[1].err_x0 <= 0.15;
    detail_a = fmt("errors %.2f%% -> %.2f%% -> %.2f%%", 100 * table.rows[0].err_x0,
                   100 * table.rows[1].err_x0, 100 * table.rows[2].err_x0);
  }
  report(9, pass_a, "asymptotics-vs-FEM error decays, <= 15% at 1e-4", detail_a);

  // (b) curvilinear squares: corrected evaluator strictly better at every eps
  ExperimentConfig sq = power_config("generic");
  sq.geometry.kind = "curvilinear_square";
  sq.geometry.r1 = 1.0;
  sq.geometry.r2 = 2.0;
  sq.geometry.alpha = 0.5;
  sq.geometry.r0 = 0.45;
  SweepData sq_sweep = run_sweep(sq);
  StarredData sq_sd = estimate_starred(sq_sweep.concentration_points(), 0.5);
  std::vector<SweepRecord> sq_recs;
  for (auto& p : sq_sweep.points) sq_recs.push_back(p.record);
  CompareTable sq_table = compare_asymptotics(sq_recs, sq_sd, sq);
  bool pass_b = sq_table.hypotheses_met && sq_table.rows.size() == 3;
  std::string detail_b = "hypotheses unmet";
  if (pass_b) {
    detail_b = "corrected vs uncorrected:";
    for (const auto& row : sq_table.rows) {
      pass_b = pass_b && row.err_x0_corrected < row.err_x0;
      detail_b += fmt(" %.2f%%/%.2f%%", 100 * row.err_x0_corrected, 100 * row.err_x0);
    }
    if (!pass_b) detail_b += " - the K* constant does not capture the measured subleading energy; see the decisions ledger";
  }
  report(9, pass_b, "corrected example evaluator beats the uncorrected one", detail_b);
}

void criterion_10() {
  double worst = 0.0;
  auto dev = [&](double got, double want) {
    worst = std::max(worst, std::fabs(got - want));
  };
  dev(rest_exponent_2d(0.5, 0.2), 0.25 / 9.0);
  dev(rest_exponent_2d(0.5, 1.0), 0.25 / 9.0);
  dev(rest_exponent_hd(0.5, 3), 0.125 / 9.0);
  dev(rest_exponent_hd(0.5, 4), 0.25 * 1.5 / 9.0);
  dev(rest_exponent_hd(0.5, 5), 0.25 / 6.0);
  auto t1 = tilde_eps(0.5, 0.2);
  auto t2 = tilde_eps(0.5, 0.5);
  auto t3 = tilde_eps(0.5, 2.0);
  dev(t1.exponent, 0.2 / 1.5);
  dev(t2.exponent, 0.5 / 1.5);
  dev(t3.exponent, 0.5 / 1.5);
  const bool logs = !t1.has_log_factor && t2.has_log_factor && !t3.has_log_factor;
  report(10, worst < 1e-12 && logs, "rest-term exponent branches",
         fmt("max deviation %.2e, log flags %s", worst, logs ? "correct" : "wrong"));
}

}  // namespace

int main() {
  std::printf("acceptance suite: Lame gap-concentration toolkit\n");
  criterion_1();
  criterion_2();
  criterion_10();

  SweepData generic = run_sweep(power_config("generic"));
  SweepData rigid = run_sweep(power_config("rigid"));
  criterion_3(generic);
  criterion_4(generic, rigid);
  criterion_5(generic);
  criterion_6();
  criterion_7();
  criterion_8(generic);
  criterion_9(generic);

  std::printf("%d criterion check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
