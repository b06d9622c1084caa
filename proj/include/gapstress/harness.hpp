#ifndef GAPSTRESS_HARNESS_HPP
#define GAPSTRESS_HARNESS_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gapstress/concentration.hpp"
#include "gapstress/numutil.hpp"

namespace gapstress {

inline constexpr double kEpsFloor = 1e-6;

struct GeometryDescriptor {
  std::string kind = "power";  // power | two_power | curvilinear_square
  // power / two_power
  double alpha = 0.5;
  double beta = 1.0;
  double tau = 1.0;
  double R = 0.5;
  double tau_upper = 1.0, p_upper = 1.5, tau_lower = 0.0, p_lower = 2.5;
  // curvilinear_square
  double r1 = 1.0, r2 = 2.0, r0 = 0.45;

  GapGeometry build(double epsilon) const;
  double profile_alpha() const;
  std::optional<CurvilinearSquareGeometry> squares(double epsilon) const;
};

struct PhiDescriptor {
  std::string kind = "generic";  // generic | linear_shear | rotation_like | rigid | zero | poly
  int rigid_index = 3;
  // poly: coefficient of x1^i x2^j in each component, row i, column j
  std::vector<std::vector<double>> c1, c2;
};

/// Builds the boundary field; phi(0) = 0 is enforced by offset subtraction.
PhiField make_phi(const PhiDescriptor& desc);

struct ExperimentConfig {
  GeometryDescriptor geometry;
  LameParameters lame;
  PhiDescriptor phi;
  std::vector<double> eps_list = {1e-3, 1e-4, 1e-5};
  MeshParams mesh;
  SolverOptions solver;
  double cert_tol = 0.01;   // mesh-convergence certification threshold
  double cert_factor = 1.4; // refinement factor between the two levels
  int workers = 2;
  unsigned seed = 12345;
  std::string out_dir = "out";

  void validate() const;  // eps strictly decreasing, all >= floor
};

ExperimentConfig load_config(const std::string& path);

struct SweepRecord {
  double eps = 0.0;
  bool ok = false;
  std::string error;

  double a[3][3] = {};
  double q[3] = {};
  double c[3] = {};
  double max_grad_x0 = 0.0;
  bool certified = false;
  double cert_delta = 0.0;

  // reconstructed gradients at the two comparison points (gap center line and
  // the ring |x'| = eps^{1/(1+alpha)})
  Mat2 fem_grad_x0;
  Mat2 fem_grad_ring;

  double solve_ms = 0.0;  // wall clock, kept out of the CSV artifacts
};

struct PointResult {
  SweepRecord record;
  std::shared_ptr<SolutionBundle> bundle;  // fine-level fields
  std::shared_ptr<const GapMesh> mesh;
};

/// Solve all sub-problems at one gap width on a certification pair of meshes.
PointResult run_point(const ExperimentConfig& cfg, double eps);

struct SweepData {
  ExperimentConfig cfg;
  std::vector<PointResult> points;

  std::vector<ConcentrationPoint> concentration_points() const;
  std::vector<const SweepRecord*> records() const;
};

/// One record per eps, points computed independently (worker pool), failures
/// recorded per point and the sweep continues.
SweepData run_sweep(const ExperimentConfig& cfg);

/// Convenience wrapper: sweep the family and extrapolate in one call.
StarredData estimate_starred(const ExperimentConfig& cfg);

LinearFit fit_rate(const std::vector<SweepRecord>& records, const std::string& quantity);
double record_quantity(const SweepRecord& r, const std::string& quantity);

struct CompareRow {
  double eps = 0.0;
  double err_x0 = 0.0;       // dominant-component relative error at x' = 0
  double err_ring = 0.0;     // same at |x'| = eps^{1/(1+alpha)}
  double err_x0_corrected = std::numeric_limits<double>::quiet_NaN();
  int dominant_r = 0, dominant_c = 0;
};

struct CompareTable {
  std::vector<CompareRow> rows;
  bool hypotheses_met = false;
  std::string note;
};

/// Prediction-vs-FEM error table; empty with a note when the evaluator
/// hypotheses fail (zero Q_3*, vanishing determinants).
CompareTable compare_asymptotics(const std::vector<SweepRecord>& records,
                                 const StarredData& starred, const ExperimentConfig& cfg);

// ---- artifacts --------------------------------------------------------------

std::string sweep_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> parse_sweep_csv(const std::string& text);
std::string compare_csv(const CompareTable& table);
std::string starred_json(const StarredData& sd);
StarredData parse_starred_json(const std::string& text);
std::string constants_csv(const ExperimentConfig& cfg);

/// Static SVG scatter of a log-log fit (points plus the fitted line).
std::string loglog_fit_svg(const std::vector<double>& eps, const std::vector<double>& values,
                           const LinearFit& fit, const std::string& label);
std::string validation_report_text(const ConditionReport& rep);
std::string polyline_csv(const Polyline& poly);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gapstress

#endif
