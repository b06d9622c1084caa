#include "gapstress/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace gapstress {

using nlohmann::json;

GapGeometry GeometryDescriptor::build(double epsilon) const {
  if (kind == "power") {
    PowerGeometryParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.tau = tau;
    p.R = R;
    p.epsilon = epsilon;
    return make_power_geometry(p);
  }
  if (kind == "two_power") {
    TwoPowerGeometryParams p;
    p.tau_upper = tau_upper;
    p.p_upper = p_upper;
    p.tau_lower = tau_lower;
    p.p_lower = p_lower;
    p.R = R;
    p.epsilon = epsilon;
    return make_two_power_geometry(p);
  }
  if (kind == "curvilinear_square") {
    CurvilinearSquareGeometry q = *squares(epsilon);
    return make_curvilinear_square_geometry(q);
  }
  throw std::invalid_argument("GeometryDescriptor: unknown kind '" + kind + "'");
}

double GeometryDescriptor::profile_alpha() const {
  if (kind == "two_power") return p_upper - 1.0;
  return alpha;
}

std::optional<CurvilinearSquareGeometry> GeometryDescriptor::squares(double epsilon) const {
  if (kind != "curvilinear_square") return std::nullopt;
  CurvilinearSquareGeometry q;
  q.r1 = r1;
  q.r2 = r2;
  q.alpha = alpha;
  q.r0 = r0;
  q.epsilon = epsilon;
  return q;
}

namespace {

PhiField finish_phi(PhiField phi) {
  // enforce phi(0) = 0 by offset subtraction
  if (phi.is_zero()) return phi;
  const double origin[2] = {0.0, 0.0};
  double at0[2] = {0.0, 0.0};
  phi.value(origin, at0);
  if (at0[0] != 0.0 || at0[1] != 0.0) {
    auto inner = phi.value;
    const double ox = at0[0], oy = at0[1];
    phi.value = [inner, ox, oy](std::span<const double> x, std::span<double> out) {
      inner(x, out);
      out[0] -= ox;
      out[1] -= oy;
    };
  }
  return phi;
}

double poly_eval(const std::vector<std::vector<double>>& c, double x, double y) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c[i].size(); ++j)
      s += c[i][j] * std::pow(x, static_cast<double>(i)) * std::pow(y, static_cast<double>(j));
  return s;
}

double poly_dx(const std::vector<std::vector<double>>& c, double x, double y) {
  double s = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i)
    for (std::size_t j = 0; j < c[i].size(); ++j)
      s += c[i][j] * i * std::pow(x, static_cast<double>(i - 1)) *
           std::pow(y, static_cast<double>(j));
  return s;
}

double poly_dy(const std::vector<std::vector<double>>& c, double x, double y) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 1; j < c[i].size(); ++j)
      s += c[i][j] * j * std::pow(x, static_cast<double>(i)) *
           std::pow(y, static_cast<double>(j - 1));
  return s;
}

}  // namespace

PhiField make_phi(const PhiDescriptor& desc) {
  PhiField phi;
  phi.dim = 2;
  phi.name = desc.kind;
  if (desc.kind == "zero") {
    return phi;  // empty callables mean the zero field
  }
  if (desc.kind == "generic") {
    phi.value = [](std::span<const double> x, std::span<double> out) {
      out[0] = x[1] + 0.3 * x[0];
      out[1] = 0.5 * x[0] - 0.4 * x[1];
    };
    phi.jacobian = [](std::span<const double>, std::span<double> out) {
      out[0] = 0.3;
      out[1] = 1.0;
      out[2] = 0.5;
      out[3] = -0.4;
    };
    return phi;
  }
  if (desc.kind == "linear_shear") {
    phi.value = [](std::span<const double> x, std::span<double> out) {
      out[0] = x[1];
      out[1] = 0.0;
    };
    phi.jacobian = [](std::span<const double>, std::span<double> out) {
      out[0] = 0.0;
      out[1] = 1.0;
      out[2] = 0.0;
      out[3] = 0.0;
    };
    return phi;
  }
  if (desc.kind == "rigid" || desc.kind == "rotation_like") {
    const int k = (desc.kind == "rotation_like") ? 3 : desc.rigid_index;
    RigidBasis basis(2);
    if (k < 1 || k > basis.size()) throw std::invalid_argument("make_phi: rigid index");
    phi.name = "rigid_" + std::to_string(k);
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
    return phi;
  }
  if (desc.kind == "poly") {
    auto c1 = desc.c1, c2 = desc.c2;
    phi.value = [c1, c2](std::span<const double> x, std::span<double> out) {
      out[0] = poly_eval(c1, x[0], x[1]);
      out[1] = poly_eval(c2, x[0], x[1]);
    };
    phi.jacobian = [c1, c2](std::span<const double> x, std::span<double> out) {
      out[0] = poly_dx(c1, x[0], x[1]);
      out[1] = poly_dy(c1, x[0], x[1]);
      out[2] = poly_dx(c2, x[0], x[1]);
      out[3] = poly_dy(c2, x[0], x[1]);
    };
    return finish_phi(phi);
  }
  throw std::invalid_argument("make_phi: unknown kind '" + desc.kind + "'");
}

void ExperimentConfig::validate() const {
  if (eps_list.empty()) throw std::invalid_argument("config: eps_list must not be empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (eps_list[i] < kEpsFloor)
      throw std::invalid_argument("config: eps below the practical floor 1e-6");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("config: eps_list must decrease strictly");
  }
  AsymptoticConstants ac;
  ac.alpha = geometry.profile_alpha();
  ac.beta = (geometry.kind == "curvilinear_square") ? 1.0 + geometry.alpha : geometry.beta;
  ac.tau = 1.0;
  ac.lame = lame;
  ac.validate();
}

ExperimentConfig load_config(const std::string& path) {
  json j = json::parse(read_file(path));
  ExperimentConfig cfg;
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    auto& d = cfg.geometry;
    d.kind = g.value("kind", d.kind);
    d.alpha = g.value("alpha", d.alpha);
    d.beta = g.value("beta", d.beta);
    d.tau = g.value("tau", d.tau);
    d.R = g.value("R", d.R);
    d.tau_upper = g.value("tau_upper", d.tau_upper);
    d.p_upper = g.value("p_upper", d.p_upper);
    d.tau_lower = g.value("tau_lower", d.tau_lower);
    d.p_lower = g.value("p_lower", d.p_lower);
    d.r1 = g.value("r1", d.r1);
    d.r2 = g.value("r2", d.r2);
    d.r0 = g.value("r0", d.r0);
  }
  if (j.contains("lame")) {
    cfg.lame.lambda = j["lame"].value("lambda", cfg.lame.lambda);
    cfg.lame.mu = j["lame"].value("mu", cfg.lame.mu);
  }
  if (j.contains("phi")) {
    const auto& p = j["phi"];
    cfg.phi.kind = p.value("kind", cfg.phi.kind);
    cfg.phi.rigid_index = p.value("index", cfg.phi.rigid_index);
    if (p.contains("c1")) cfg.phi.c1 = p["c1"].get<std::vector<std::vector<double>>>();
    if (p.contains("c2")) cfg.phi.c2 = p["c2"].get<std::vector<std::vector<double>>>();
  }
  if (j.contains("eps_list")) cfg.eps_list = j["eps_list"].get<std::vector<double>>();
  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    cfg.mesh.n_layers = m.value("n_layers", cfg.mesh.n_layers);
    cfg.mesh.c_g = m.value("c_g", cfg.mesh.c_g);
    cfg.mesh.h_max = m.value("h_max", cfg.mesh.h_max);
    cfg.mesh.dx_floor = m.value("dx_floor", cfg.mesh.dx_floor);
    cfg.solver.method = m.value("solver", cfg.solver.method);
    cfg.solver.tol = m.value("tol", cfg.solver.tol);
    cfg.cert_tol = m.value("cert_tol", cfg.cert_tol);
    cfg.cert_factor = m.value("cert_factor", cfg.cert_factor);
  }
  cfg.workers = j.value("workers", cfg.workers);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.validate();
  return cfg;
}

namespace {

Vec2 x0_point(const GapGeometry& g) { return {0.0, 0.5 * g.epsilon}; }

Vec2 ring_point(const GapGeometry& g) {
  const double alpha = g.profile.alpha;
  const double s = std::pow(g.epsilon, 1.0 / (1.0 + alpha));
  const double h = g.lower_height(s);
  const double delta = g.epsilon + g.profile.gap(s);
  return {s, h + 0.5 * delta};
}

double max_grad_on_axis(const SolutionBundle& bundle, const DVec& c, const GapGeometry& g) {
  double best = 0.0;
  const int n = 21;
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n;
    const Mat2 grad = reconstruct_gradient(bundle, c, {0.0, t * g.epsilon});
    best = std::max(best, grad.frobenius());
  }
  return best;
}

}  // namespace

PointResult run_point(const ExperimentConfig& cfg, double eps) {
  PointResult out;
  out.record.eps = eps;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const GapGeometry geom = cfg.geometry.build(eps);
    const ElasticityTensor tensor{cfg.lame, 2};
    const PhiField phi = make_phi(cfg.phi);
    const int m = RigidBasis(2).size();

    auto solve_level = [&](const MeshParams& mp, std::shared_ptr<const GapMesh>& mesh_out)
        -> std::shared_ptr<SolutionBundle> {
      auto mesh = build_gap_mesh(geom, mp);
      SubproblemSolver solver(mesh, tensor, cfg.solver);
      auto bundle = std::make_shared<SolutionBundle>();
      bundle->tensor = tensor;
      bundle->fields.push_back(solver.solve_boundary_data(phi));
      for (int i = 1; i <= m; ++i) bundle->fields.push_back(solver.solve_rigid(i));
      mesh_out = mesh;
      return bundle;
    };

    std::shared_ptr<const GapMesh> mesh_fine, mesh_coarse;
    auto coarse = solve_level(cfg.mesh, mesh_coarse);
    auto fine = solve_level(cfg.mesh.refined(cfg.cert_factor), mesh_fine);

    ConcentrationSystem sys_c = assemble_system(*coarse, eps);
    ConcentrationSystem sys_f = assemble_system(*fine, eps);

    double delta = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double scale = std::sqrt(sys_f.a(i, i) * sys_f.a(j, j));
        delta = std::max(delta, std::fabs(sys_f.a(i, j) - sys_c.a(i, j)) / scale);
      }
    }
    out.record.certified = delta < cfg.cert_tol;
    out.record.cert_delta = delta;

    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out.record.a[i][j] = sys_f.a(i, j);
      out.record.q[i] = sys_f.y[i];
      out.record.c[i] = sys_f.c[i];
    }
    out.record.max_grad_x0 = max_grad_on_axis(*fine, sys_f.c, geom);
    out.record.fem_grad_x0 = reconstruct_gradient(*fine, sys_f.c, x0_point(geom));
    out.record.fem_grad_ring = reconstruct_gradient(*fine, sys_f.c, ring_point(geom));
    out.bundle = fine;
    out.mesh = mesh_fine;
    out.record.ok = true;
  } catch (const std::exception& e) {
    out.record.ok = false;
    out.record.error = e.what();
  }
  out.record.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<ConcentrationPoint> SweepData::concentration_points() const {
  // only mesh-certified records feed the extrapolation
  std::vector<ConcentrationPoint> pts;
  for (const auto& p : points) {
    if (!p.record.ok || !p.record.certified) continue;
    ConcentrationPoint cp;
    cp.epsilon = p.record.eps;
    cp.a = DMat(3, 3);
    cp.q.assign(3, 0.0);
    for (int i = 0; i < 3; ++i) {
      cp.q[i] = p.record.q[i];
      for (int j = 0; j < 3; ++j) cp.a(i, j) = p.record.a[i][j];
    }
    pts.push_back(std::move(cp));
  }
  return pts;
}

std::vector<const SweepRecord*> SweepData::records() const {
  std::vector<const SweepRecord*> out;
  for (const auto& p : points) out.push_back(&p.record);
  return out;
}

SweepData run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepData data;
  data.cfg = cfg;
  data.points.resize(cfg.eps_list.size());
  const int workers = std::max(1, std::min<int>(cfg.workers, cfg.eps_list.size()));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfg.eps_list.size()) break;
      data.points[k] = run_point(cfg, cfg.eps_list[k]);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return data;
}

StarredData estimate_starred(const ExperimentConfig& cfg) {
  SweepData data = run_sweep(cfg);
  return estimate_starred(data.concentration_points(), cfg.geometry.profile_alpha());
}

double record_quantity(const SweepRecord& r, const std::string& q) {
  if (q == "a11") return r.a[0][0];
  if (q == "a12") return r.a[0][1];
  if (q == "a13") return r.a[0][2];
  if (q == "a22") return r.a[1][1];
  if (q == "a23") return r.a[1][2];
  if (q == "a33") return r.a[2][2];
  if (q == "q1") return r.q[0];
  if (q == "q2") return r.q[1];
  if (q == "q3") return r.q[2];
  if (q == "c1") return r.c[0];
  if (q == "c2") return r.c[1];
  if (q == "c3") return r.c[2];
  if (q == "max_grad_x0") return r.max_grad_x0;
  throw std::invalid_argument("record_quantity: unknown quantity '" + q + "'");
}

LinearFit fit_rate(const std::vector<SweepRecord>& records, const std::string& quantity) {
  std::vector<double> eps, val;
  for (const auto& r : records) {
    if (!r.ok || !r.certified) continue;
    const double v = record_quantity(r, quantity);
    if (!(v > 0.0))
      throw std::invalid_argument("fit_rate: quantity '" + quantity + "' is not positive");
    eps.push_back(r.eps);
    val.push_back(v);
  }
  if (eps.size() < 3) throw std::invalid_argument("fit_rate: need at least three records");
  return fit_loglog(eps, val);
}

CompareTable compare_asymptotics(const std::vector<SweepRecord>& records,
                                 const StarredData& starred, const ExperimentConfig& cfg) {
  CompareTable table;
  const PhiField phi = make_phi(cfg.phi);
  BlowupMatrices bm = blowup_matrices(starred);
  auto squares = cfg.geometry.squares(1e-3);

  for (const auto& r : records) {
    if (!r.ok || !r.certified) continue;
    const GapGeometry geom = cfg.geometry.build(r.eps);
    CompareRow row;
    row.eps = r.eps;
    try {
      const Prediction2d pred = asymptotic_gradient_2d(bm, geom, cfg.lame, phi, x0_point(geom));
      // dominant component judged by the FEM truth
      int br = 0, bc = 0;
      double best = -1.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (std::fabs(r.fem_grad_x0.m[i][j]) > best) {
            best = std::fabs(r.fem_grad_x0.m[i][j]);
            br = i;
            bc = j;
          }
      row.dominant_r = br;
      row.dominant_c = bc;
      row.err_x0 = std::fabs(pred.value.m[br][bc] - r.fem_grad_x0.m[br][bc]) /
                   std::fabs(r.fem_grad_x0.m[br][bc]);

      const Prediction2d pred_ring =
          asymptotic_gradient_2d(bm, geom, cfg.lame, phi, ring_point(geom));
      int rr = 0, rc = 0;
      best = -1.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (std::fabs(r.fem_grad_ring.m[i][j]) > best) {
            best = std::fabs(r.fem_grad_ring.m[i][j]);
            rr = i;
            rc = j;
          }
      row.err_ring = std::fabs(pred_ring.value.m[rr][rc] - r.fem_grad_ring.m[rr][rc]) /
                     std::fabs(r.fem_grad_ring.m[rr][rc]);

      if (squares) {
        auto sq = cfg.geometry.squares(r.eps);
        const Prediction2d corr =
            example_asymptotic(bm, geom, *sq, cfg.lame, phi, x0_point(geom));
        row.err_x0_corrected = std::fabs(corr.value.m[br][bc] - r.fem_grad_x0.m[br][bc]) /
                               std::fabs(r.fem_grad_x0.m[br][bc]);
      }
      table.rows.push_back(row);
      table.hypotheses_met = true;
    } catch (const HypothesisError& e) {
      table.note = std::string("hypotheses unmet: ") + e.what();
      table.rows.clear();
      table.hypotheses_met = false;
      return table;
    }
  }
  return table;
}

// ---- artifacts --------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << "eps,ok,a11,a12,a13,a22,a23,a33,q1,q2,q3,c1,c2,c3,max_grad_x0,"
        "gx0_00,gx0_01,gx0_10,gx0_11,gring_00,gring_01,gring_10,gring_11,"
        "certified,cert_delta,error\n";
  for (const auto& r : records) {
    os << fmt(r.eps) << ',' << (r.ok ? 1 : 0) << ',';
    os << fmt(r.a[0][0]) << ',' << fmt(r.a[0][1]) << ',' << fmt(r.a[0][2]) << ','
       << fmt(r.a[1][1]) << ',' << fmt(r.a[1][2]) << ',' << fmt(r.a[2][2]) << ',';
    os << fmt(r.q[0]) << ',' << fmt(r.q[1]) << ',' << fmt(r.q[2]) << ',';
    os << fmt(r.c[0]) << ',' << fmt(r.c[1]) << ',' << fmt(r.c[2]) << ',';
    os << fmt(r.max_grad_x0) << ',';
    os << fmt(r.fem_grad_x0.m[0][0]) << ',' << fmt(r.fem_grad_x0.m[0][1]) << ','
       << fmt(r.fem_grad_x0.m[1][0]) << ',' << fmt(r.fem_grad_x0.m[1][1]) << ',';
    os << fmt(r.fem_grad_ring.m[0][0]) << ',' << fmt(r.fem_grad_ring.m[0][1]) << ','
       << fmt(r.fem_grad_ring.m[1][0]) << ',' << fmt(r.fem_grad_ring.m[1][1]) << ',';
    os << (r.certified ? 1 : 0) << ',' << fmt(r.cert_delta) << ',' << r.error << '\n';
  }
  return os.str();
}

std::vector<SweepRecord> parse_sweep_csv(const std::string& text) {
  std::vector<SweepRecord> out;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 25) continue;
    SweepRecord r;
    int k = 0;
    auto next = [&]() { return std::stod(cells[k++]); };
    r.eps = next();
    r.ok = next() != 0.0;
    r.a[0][0] = next();
    r.a[0][1] = r.a[1][0] = next();
    r.a[0][2] = r.a[2][0] = next();
    r.a[1][1] = next();
    r.a[1][2] = r.a[2][1] = next();
    r.a[2][2] = next();
    for (int i = 0; i < 3; ++i) r.q[i] = next();
    for (int i = 0; i < 3; ++i) r.c[i] = next();
    r.max_grad_x0 = next();
    r.fem_grad_x0.m[0][0] = next();
    r.fem_grad_x0.m[0][1] = next();
    r.fem_grad_x0.m[1][0] = next();
    r.fem_grad_x0.m[1][1] = next();
    r.fem_grad_ring.m[0][0] = next();
    r.fem_grad_ring.m[0][1] = next();
    r.fem_grad_ring.m[1][0] = next();
    r.fem_grad_ring.m[1][1] = next();
    r.certified = next() != 0.0;
    r.cert_delta = next();
    if (k < static_cast<int>(cells.size())) r.error = cells[k];
    out.push_back(r);
  }
  return out;
}

std::string compare_csv(const CompareTable& table) {
  std::ostringstream os;
  os << "eps,err_x0,err_ring,err_x0_corrected,dominant_r,dominant_c\n";
  if (!table.hypotheses_met) {
    os << "# " << table.note << '\n';
    return os.str();
  }
  for (const auto& row : table.rows) {
    os << fmt(row.eps) << ',' << fmt(row.err_x0) << ',' << fmt(row.err_ring) << ','
       << fmt(row.err_x0_corrected) << ',' << row.dominant_r << ',' << row.dominant_c
       << '\n';
  }
  return os.str();
}

std::string starred_json(const StarredData& sd) {
  json j;
  j["dim"] = sd.dim;
  j["alpha"] = sd.alpha;
  j["q_star"] = sd.q_star;
  json rows = json::array();
  for (std::size_t i = 0; i < sd.a_star.rows(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < sd.a_star.cols(); ++c) {
      const double v = sd.a_star(i, c);
      if (std::isnan(v))
        row.push_back(nullptr);
      else
        row.push_back(v);
    }
    rows.push_back(row);
  }
  j["a_star"] = rows;
  j["a11_leading"] = sd.a11_leading;
  j["a22_leading"] = sd.a22_leading;
  j["a12_log_bound"] = sd.a12_log_bound;
  j["eps_used"] = sd.eps_used;
  json fits = json::array();
  for (const auto& f : sd.q_fits)
    fits.push_back({{"value", f.value},
                    {"exponent", f.exponent},
                    {"residual", f.residual},
                    {"two_point", f.two_point}});
  j["q_fits"] = fits;
  json afits = json::array();
  for (const auto& f : sd.a_fits)
    afits.push_back({{"value", f.value},
                     {"exponent", f.exponent},
                     {"residual", f.residual},
                     {"two_point", f.two_point}});
  j["a_fits"] = afits;
  return j.dump(2) + "\n";
}

StarredData parse_starred_json(const std::string& text) {
  json j = json::parse(text);
  StarredData sd;
  sd.dim = j.value("dim", 2);
  sd.alpha = j.value("alpha", 0.5);
  sd.q_star = j["q_star"].get<std::vector<double>>();
  const auto& rows = j["a_star"];
  const std::size_t n = rows.size();
  sd.a_star = DMat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c)
      sd.a_star(i, c) = rows[i][c].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                             : rows[i][c].get<double>();
  sd.a11_leading = j.value("a11_leading", 0.0);
  sd.a22_leading = j.value("a22_leading", 0.0);
  sd.a12_log_bound = j.value("a12_log_bound", 0.0);
  if (j.contains("eps_used")) sd.eps_used = j["eps_used"].get<std::vector<double>>();
  auto read_fits = [&](const char* key, std::vector<StarredEntryFit>& out) {
    if (!j.contains(key)) return;
    for (const auto& f : j[key]) {
      StarredEntryFit fit;
      fit.value = f.value("value", 0.0);
      fit.exponent = f.value("exponent", 0.0);
      fit.residual = f.value("residual", 0.0);
      fit.two_point = f.value("two_point", 0.0);
      out.push_back(fit);
    }
  };
  read_fits("q_fits", sd.q_fits);
  read_fits("a_fits", sd.a_fits);
  return sd;
}

std::string constants_csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const double alpha = cfg.geometry.profile_alpha();
  const double tau =
      (cfg.geometry.kind == "curvilinear_square")
          ? effective_tau0(cfg.geometry.r1, cfg.geometry.r2, cfg.geometry.alpha)
          : cfg.geometry.tau;
  const double beta =
      (cfg.geometry.kind == "curvilinear_square") ? 1.0 + alpha : cfg.geometry.beta;
  os << "name,alpha,tau,value\n";
  os << "gamma_alpha," << fmt(alpha) << ",," << fmt(gamma_alpha(alpha)) << '\n';
  os << "m_alpha_tau," << fmt(alpha) << ',' << fmt(tau) << ',' << fmt(m_alpha_tau(alpha, tau))
     << '\n';
  os << "rest_exponent_2d," << fmt(alpha) << ",," << fmt(rest_exponent_2d(alpha, beta))
     << '\n';
  for (int d : {3, 4, 5})
    os << "rest_exponent_d" << d << ',' << fmt(alpha) << ",,"
       << fmt(rest_exponent_hd(alpha, d)) << '\n';
  auto te = tilde_eps(alpha, beta);
  os << "tilde_eps," << fmt(alpha) << ",," << fmt(te.exponent) << '\n';
  os << "tilde_eps_log_factor," << fmt(alpha) << ",," << (te.has_log_factor ? 1 : 0) << '\n';
  const auto row = lame_row(2, cfg.lame);
  os << "lame_row_1,,," << fmt(row[0]) << '\n';
  os << "lame_row_2,,," << fmt(row[1]) << '\n';
  if (auto sq = cfg.geometry.squares(cfg.eps_list.front())) {
    auto ec = example_constants(*sq, cfg.lame);
    os << "tau0," << fmt(alpha) << ",," << fmt(ec.tau0) << '\n';
    os << "c_star," << fmt(alpha) << ",," << fmt(ec.c_star) << '\n';
    for (int i = 0; i < 2; ++i) {
      os << "k_star_" << (i + 1) << ',' << fmt(alpha) << ",," << fmt(ec.k_star[i]) << '\n';
      os << "g_star_" << (i + 1) << ',' << fmt(alpha) << ",," << fmt(ec.g_star[i]) << '\n';
    }
  }
  return os.str();
}

std::string loglog_fit_svg(const std::vector<double>& eps, const std::vector<double>& values,
                           const LinearFit& fit, const std::string& label) {
  if (eps.size() != values.size() || eps.empty())
    throw std::invalid_argument("loglog_fit_svg: shape mismatch");
  const double w = 480, h = 360, pad = 56;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    xlo = std::min(xlo, std::log10(eps[i]));
    xhi = std::max(xhi, std::log10(eps[i]));
    ylo = std::min(ylo, std::log10(values[i]));
    yhi = std::max(yhi, std::log10(values[i]));
  }
  if (xhi - xlo < 1e-12) xhi = xlo + 1.0;
  if (yhi - ylo < 1e-12) yhi = ylo + 1.0;
  auto px = [&](double lx) { return pad + (lx - xlo) / (xhi - xlo) * (w - 2 * pad); };
  auto py = [&](double ly) { return h - pad - (ly - ylo) / (yhi - ylo) * (h - 2 * pad); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\""
     << h - pad << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
     << h - pad << "\" stroke=\"black\"/>\n";
  // fitted line through the data range (natural-log fit, plotted in log10)
  const double lna = std::log(10.0);
  auto fit_ly = [&](double lx) { return (fit.slope * (lx * lna) + fit.intercept) / lna; };
  os << "<line x1=\"" << px(xlo) << "\" y1=\"" << py(fit_ly(xlo)) << "\" x2=\"" << px(xhi)
     << "\" y2=\"" << py(fit_ly(xhi)) << "\" stroke=\"#888\" stroke-dasharray=\"5,3\"/>\n";
  for (std::size_t i = 0; i < eps.size(); ++i)
    os << "<circle cx=\"" << px(std::log10(eps[i])) << "\" cy=\""
       << py(std::log10(values[i])) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s: slope %.4f, R^2 %.6f", label.c_str(), fit.slope,
                fit.r_squared);
  os << "<text x=\"" << pad << "\" y=\"" << pad - 16 << "\" font-family=\"sans-serif\" "
     << "font-size=\"14\">" << buf << "</text>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">log10 eps"
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string validation_report_text(const ConditionReport& rep) {
  std::ostringstream os;
  auto line = [&](const char* name, bool pass) {
    os << name << ": " << (pass ? "pass" : "FAIL") << '\n';
  };
  line("S1 (leading gap expansion)", rep.s1_pass);
  line("S2 (gradient growth bound)", rep.s2_pass);
  line("S3 (C^{1,alpha} norms bounded)", rep.s3_pass);
  line("parity (gap even in x')", rep.parity_pass);
  line("inclusion strictly inside", rep.inclusion_inside);
  os << "tau_fit: " << fmt(rep.tau_fit) << '\n';
  os << "S1 constant: " << fmt(rep.s1_constant) << '\n';
  os << "kappa1: " << fmt(rep.kappa1) << '\n';
  os << "kappa2: " << fmt(rep.kappa2) << '\n';
  os << "min clearance: " << fmt(rep.min_clearance) << '\n';
  return os.str();
}

std::string polyline_csv(const Polyline& poly) {
  std::ostringstream os;
  os << "s,x1,x2\n";
  for (std::size_t i = 0; i < poly.points.size(); ++i)
    os << fmt(poly.s[i]) << ',' << fmt(poly.points[i].x) << ',' << fmt(poly.points[i].y)
       << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_file: cannot open " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_file: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace gapstress
