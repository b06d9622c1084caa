#ifndef GAPSTRESS_CONCENTRATION_HPP
#define GAPSTRESS_CONCENTRATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "gapstress/fem.hpp"

namespace gapstress {

/// The free-constant linear system A X = Y at one gap width.
struct ConcentrationSystem {
  double epsilon = 0.0;
  DMat a;     // a_ij, energy inner products (symmetric positive definite)
  DVec y;     // Q_j = -(C e(u_0), e(u_j)) pairings
  DVec c;     // solved free constants
  double residual = 0.0;       // |A c - y| / |y|
  double symmetry_defect = 0.0;
  double min_eigenvalue = 0.0;
};

/// All sub-problem solutions on one mesh: index 0 is the boundary-data
/// problem, 1..d(d+1)/2 the rigid-data problems.
struct SolutionBundle {
  std::vector<FieldSolution> fields;
  ElasticityTensor tensor;

  const FieldSolution& u0() const { return fields.at(0); }
  const FieldSolution& u(int i) const { return fields.at(i); }
  int rigid_count() const { return static_cast<int>(fields.size()) - 1; }
};

ConcentrationSystem assemble_system(const SolutionBundle& bundle, double epsilon);

/// grad u(x) = sum_i C^i grad u_i(x) + grad u_0(x) on the discrete fields.
Mat2 reconstruct_gradient(const SolutionBundle& bundle, const DVec& c, const Vec2& x);

/// One sweep point: the matrix/vector entries needed by the extrapolation.
struct ConcentrationPoint {
  double epsilon = 0.0;
  DMat a;
  DVec q;
};

struct StarredEntryFit {
  double value = 0.0;      // extrapolated limit
  double exponent = 0.0;   // pinned rate used
  double residual = 0.0;   // relative fit residual
  double two_point = 0.0;  // value from the two smallest-eps samples only
};

/// Limit quantities a_ij*, Q_j* obtained by rate-pinned extrapolation.
/// In dimension two the entries a_11, a_22, a_12 diverge; they carry leading
/// coefficients instead and reading them as starred values is an error.
struct StarredData {
  int dim = 2;
  double alpha = 0.5;
  DMat a_star;             // divergent entries stored as NaN
  DVec q_star;
  std::vector<StarredEntryFit> q_fits;      // per j
  std::vector<StarredEntryFit> a_fits;      // row-major, unused slots zeroed
  double a11_leading = 0.0;  // fitted coefficient of eps^{-alpha/(1+alpha)}
  double a22_leading = 0.0;
  double a12_log_bound = 0.0;  // max |a_12| / |ln eps| over the sweep
  std::vector<double> eps_used;

  int size() const { return static_cast<int>(q_star.size()); }
  bool divergent(int i, int j) const;
  /// a_ij*; throws for the divergent 2-D entries
  double a_entry(int i, int j) const;
  bool positive_definite() const;  // of the convergent block
};

/// Rate-pinned extrapolation of the sweep values. Requires >= 3 strictly
/// decreasing eps values. alpha is the interface exponent of the family.
StarredData estimate_starred(const std::vector<ConcentrationPoint>& points, double alpha,
                             int dim = 2);

/// Synthetic starred data for the d >= 3 evaluators (matrix supplied directly).
StarredData make_starred_from_matrix(const DMat& a_star, const DVec& q_star, double alpha,
                                     int dim);

struct BlowupMatrices {
  int dim = 2;
  // d = 2: the two 2x2 matrices (Q_i*, a_i3*; Q_3*, a_33*)
  DMat b[2];
  double det_b[2] = {0.0, 0.0};
  double a33_star = 0.0;
  double q3_star = 0.0;
  // d >= 3: A* and the column-replaced F_i*
  DMat a_star;
  std::vector<DMat> f_star;
  std::vector<double> det_f;
  double det_a = 0.0;
  bool positive_definite = false;
};

BlowupMatrices blowup_matrices(const StarredData& starred);

struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Leading-order prediction of grad u in the 2-D gap, with the dropped
/// rest-term exponents attached as metadata.
struct Prediction2d {
  Mat2 value;
  double coeff[3] = {0, 0, 0};         // the three reconstruction coefficients
  double rest_exponent_translation = 0.0;  // eps(alpha,beta) channel
  double rest_exponent_rotation = 0.0;     // alpha/(2(1+2alpha)) channel
  double delta_channel_exponent = 0.0;     // (1-alpha)/(1+alpha), delta power
};

Prediction2d asymptotic_gradient_2d(const BlowupMatrices& bm, const GapGeometry& g,
                                    const LameParameters& lame, const PhiField& phi,
                                    const Vec2& x);

/// Same with the curvilinear-square second-order factor 1/(1 + G*_i eps^{a/(1+a)}).
Prediction2d example_asymptotic(const BlowupMatrices& bm, const GapGeometry& g,
                                const CurvilinearSquareGeometry& geom,
                                const LameParameters& lame, const PhiField& phi,
                                const Vec2& x);

struct PredictionHd {
  DMat value;
  DVec coeff;
  double rest_exponent = 0.0;
};

PredictionHd asymptotic_gradient_hd(const BlowupMatrices& bm, const GapGeometry& g,
                                    const PhiField& phi, std::span<const double> x);

/// Pointwise bracket for max |grad u| on the segment {x' = 0}; the universal
/// constant is a fitted calibration factor, reported, never assumed 1.
struct GradientBounds {
  double lower_raw = 0.0;  // bound value at calibration = 1
  double upper_raw = 0.0;
  double calibration = 1.0;
  double exponent = 0.0;  // blow-up power of eps
  double lower() const { return lower_raw / calibration; }
  double upper() const { return upper_raw * calibration; }
};

GradientBounds gradient_bounds(const BlowupMatrices& bm, const LameParameters& lame,
                               double alpha, double tau1, double tau2, double epsilon,
                               double calibration = 1.0);

/// Smallest calibration >= 1 placing every (eps, observed max gradient) sample
/// inside the corresponding bracket.
double calibrate_bounds(const BlowupMatrices& bm, const LameParameters& lame, double alpha,
                        double tau1, double tau2,
                        const std::vector<std::pair<double, double>>& samples);

}  // namespace gapstress

#endif
