#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gapstress/harness.hpp"

using namespace gapstress;

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

int cmd_validate_geometry(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const GapGeometry g = cfg.geometry.build(cfg.eps_list.front());
  const ConditionReport rep = validate_conditions(g);
  const std::string text = validation_report_text(rep);
  std::cout << text;
  write_file(cfg.out_dir + "/validation.txt", text);
  write_file(cfg.out_dir + "/boundary_outer.csv", polyline_csv(sample_boundary(g.outer, 720)));
  write_file(cfg.out_dir + "/boundary_inclusion.csv",
             polyline_csv(sample_boundary(g.inclusion, 720)));
  const bool ok = rep.s1_pass && rep.s2_pass && rep.s3_pass && rep.parity_pass &&
                  rep.inclusion_inside;
  return ok ? 0 : 1;
}

int cmd_constants(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const std::string table = constants_csv(cfg);
  std::cout << table;
  write_file(cfg.out_dir + "/constants.csv", table);
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg, double eps) {
  ensure_dir(cfg.out_dir);
  PointResult point = run_point(cfg, eps);
  if (!point.record.ok) {
    std::cerr << "solve failed: " << point.record.error << "\n";
    return 1;
  }
  // mesh export
  {
    std::string nodes = "node,x1,x2\n";
    char buf[96];
    for (int n = 0; n < point.mesh->node_count(); ++n) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", n, point.mesh->nodes[n].x,
                    point.mesh->nodes[n].y);
      nodes += buf;
    }
    write_file(cfg.out_dir + "/mesh_nodes.csv", nodes);
    std::string elems = "tri,n0,n1,n2,n3,n4,n5\n";
    for (std::size_t e = 0; e < point.mesh->tris.size(); ++e) {
      const auto& t = point.mesh->tris[e];
      std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%d,%d,%d,%d\n", e, t[0], t[1], t[2], t[3],
                    t[4], t[5]);
      elems += buf;
    }
    write_file(cfg.out_dir + "/mesh_elements.csv", elems);
  }
  // per-subproblem solution export
  for (std::size_t k = 0; k < point.bundle->fields.size(); ++k) {
    const auto& f = point.bundle->fields[k];
    std::string csv = "node,x1,x2,u1,u2\n";
    char buf[160];
    for (int n = 0; n < point.mesh->node_count(); ++n) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", n,
                    point.mesh->nodes[n].x, point.mesh->nodes[n].y, f.values[2 * n],
                    f.values[2 * n + 1]);
      csv += buf;
    }
    write_file(cfg.out_dir + "/solution_u" + std::to_string(k) + ".csv", csv);
  }
  write_file(cfg.out_dir + "/point.csv", sweep_csv({point.record}));
  std::cout << sweep_csv({point.record});
  std::cerr << "solve: " << point.record.solve_ms << " ms, certified="
            << (point.record.certified ? "yes" : "no") << "\n";
  return point.record.certified ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  SweepData data = run_sweep(cfg);
  std::vector<SweepRecord> records;
  for (const auto& p : data.points) records.push_back(p.record);
  write_file(cfg.out_dir + "/sweep.csv", sweep_csv(records));

  bool all_ok = true;
  for (const auto& r : records) {
    if (!r.ok) {
      std::cerr << "point eps=" << r.eps << " failed: " << r.error << "\n";
      all_ok = false;
    } else if (!r.certified) {
      std::cerr << "point eps=" << r.eps << " not mesh-certified (delta=" << r.cert_delta
                << ")\n";
      all_ok = false;
    }
    std::cerr << "eps=" << r.eps << " solved in " << r.solve_ms << " ms\n";
  }

  try {
    StarredData sd = estimate_starred(data.concentration_points(),
                                      cfg.geometry.profile_alpha());
    write_file(cfg.out_dir + "/starred.json", starred_json(sd));
    CompareTable table = compare_asymptotics(records, sd, cfg);
    write_file(cfg.out_dir + "/compare.csv", compare_csv(table));
    if (!table.hypotheses_met) std::cerr << table.note << "\n";
  } catch (const std::exception& e) {
    std::cerr << "extrapolation skipped: " << e.what() << "\n";
    all_ok = false;
  }
  std::cout << sweep_csv(records);
  return all_ok ? 0 : 1;
}

int cmd_fit(const ExperimentConfig& cfg, const std::string& quantity) {
  const auto records = parse_sweep_csv(read_file(cfg.out_dir + "/sweep.csv"));
  LinearFit fit = fit_rate(records, quantity);
  std::printf("quantity,slope,intercept,r_squared\n%s,%.17g,%.17g,%.17g\n", quantity.c_str(),
              fit.slope, fit.intercept, fit.r_squared);
  std::vector<double> eps, values;
  for (const auto& r : records) {
    if (!r.ok || !r.certified) continue;
    eps.push_back(r.eps);
    values.push_back(record_quantity(r, quantity));
  }
  write_file(cfg.out_dir + "/fit_" + quantity + ".svg",
             loglog_fit_svg(eps, values, fit, quantity));
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
  const auto records = parse_sweep_csv(read_file(cfg.out_dir + "/sweep.csv"));
  StarredData sd = parse_starred_json(read_file(cfg.out_dir + "/starred.json"));
  CompareTable table = compare_asymptotics(records, sd, cfg);
  const std::string csv = compare_csv(table);
  std::cout << csv;
  write_file(cfg.out_dir + "/compare.csv", csv);
  if (!table.hypotheses_met) {
    std::cerr << table.note << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lame-system gap concentration toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int workers = -1;
  long seed = -1;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--workers", workers, "worker threads for sweeps");
  app.add_option("--seed", seed, "random seed override");

  auto* validate = app.add_subcommand("validate-geometry", "check the interface conditions");
  auto* constants = app.add_subcommand("constants", "closed-form constants table");
  auto* solve = app.add_subcommand("solve", "single-eps solve with artifacts");
  double eps_override = 0.0;
  solve->add_option("--eps", eps_override, "gap width (default: first of eps_list)");
  auto* sweep = app.add_subcommand("sweep", "eps sweep, extrapolation, comparison");
  auto* fit = app.add_subcommand("fit", "log-log rate fit on a sweep artifact");
  std::string quantity = "max_grad_x0";
  fit->add_option("--quantity", quantity, "column to fit");
  auto* compare = app.add_subcommand("compare", "prediction-vs-FEM table from artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (workers > 0) cfg.workers = workers;
    if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);

    if (validate->parsed()) return cmd_validate_geometry(cfg);
    if (constants->parsed()) return cmd_constants(cfg);
    if (solve->parsed())
      return cmd_solve(cfg, eps_override > 0.0 ? eps_override : cfg.eps_list.front());
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (fit->parsed()) return cmd_fit(cfg, quantity);
    if (compare->parsed()) return cmd_compare(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
