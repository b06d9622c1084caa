#ifndef GAPSTRESS_FEM_HPP
#define GAPSTRESS_FEM_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gapstress/aux_fields.hpp"
#include "gapstress/constants.hpp"
#include "gapstress/mesh.hpp"
#include "gapstress/solver.hpp"

namespace gapstress {

/// Isotropic elasticity tensor C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk).
struct ElasticityTensor {
  LameParameters lame;
  int dim = 2;

  double component(int i, int j, int k, int l) const {
    const double d_ij = (i == j) ? 1.0 : 0.0;
    const double d_kl = (k == l) ? 1.0 : 0.0;
    const double d_ik = (i == k) ? 1.0 : 0.0;
    const double d_jl = (j == l) ? 1.0 : 0.0;
    const double d_il = (i == l) ? 1.0 : 0.0;
    const double d_jk = (j == k) ? 1.0 : 0.0;
    return lame.lambda * d_ij * d_kl + lame.mu * (d_ik * d_jl + d_il * d_jk);
  }

  /// stress from a (not necessarily symmetric) displacement gradient
  Mat2 stress(const Mat2& grad_u) const {
    const Mat2 e = grad_u.sym();
    Mat2 s = e * (2.0 * lame.mu);
    const double tr = lame.lambda * e.trace();
    s.m[0][0] += tr;
    s.m[1][1] += tr;
    return s;
  }

  /// (C e(u), e(v)) for two displacement gradients
  double energy_density(const Mat2& gu, const Mat2& gv) const {
    const Mat2 eu = gu.sym(), ev = gv.sym();
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += eu.m[i][j] * ev.m[i][j];
    return lame.lambda * eu.trace() * ev.trace() + 2.0 * lame.mu * s;
  }
};

/// Discrete displacement field on a GapMesh (2 components per node).
struct FieldSolution {
  std::shared_ptr<const GapMesh> mesh;
  int subproblem = -1;  // 0 for the boundary-data problem, 1..3 for rigid data
  std::vector<double> values;
  double residual = 0.0;

  Vec2 at_node(int n) const { return {values[2 * n], values[2 * n + 1]}; }
};

struct SolverOptions {
  std::string method = "direct";  // direct | cg
  double tol = 1e-10;
  int threads = 1;
};

/// Shares one assembled stiffness (and factorization) across the 1 + d(d+1)/2
/// Dirichlet sub-problems posed on the same mesh.
class SubproblemSolver {
 public:
  SubproblemSolver(std::shared_ptr<const GapMesh> mesh, const ElasticityTensor& tensor,
                   const SolverOptions& opts = {});

  /// u_i = psi_i on the inclusion boundary, 0 on the outer boundary (i >= 1).
  FieldSolution solve_rigid(int i) const;

  /// u_0 = 0 on the inclusion boundary, phi on the outer boundary.
  FieldSolution solve_boundary_data(const PhiField& phi) const;

  /// General Dirichlet data (used by tests and the smoke cases).
  FieldSolution solve_dirichlet(const std::function<Vec2(const Vec2&)>& outer_data,
                                const std::function<Vec2(const Vec2&)>& inclusion_data,
                                int label = -1) const;

  const GapMesh& mesh() const { return *mesh_; }
  const ElasticityTensor& tensor() const { return tensor_; }

  /// smallest Rayleigh quotient of the reduced stiffness over a few random
  /// vectors; positive for an SPD discretization
  double rayleigh_probe(unsigned seed = 1234) const;

 private:
  std::shared_ptr<const GapMesh> mesh_;
  ElasticityTensor tensor_;
  SolverOptions opts_;

  std::vector<std::array<double, 144>> element_k_;
  std::vector<int> free_index_;  // node*2+c -> free dof or -1
  int n_free_ = 0;
  CsrMatrix k_free_;
  std::unique_ptr<BandSchurSolver> direct_;

  std::vector<int> band_order(int extra_tail) const;
  FieldSolution solve_internal(const std::vector<double>& boundary_values, int label) const;
};

/// Energy inner product int_Omega (C e(u), e(v)); fields must share a mesh.
double energy_inner(const ElasticityTensor& tensor, const FieldSolution& u,
                    const FieldSolution& v);

/// int_{dD1} (C e(u)) nu . psi_j with nu the outer normal of the inclusion:
/// -boundary_flux_functional(u_i, j) cross-checks the volume form a_ij, and
/// +boundary_flux_functional(u_0, j) cross-checks Q_j.
double boundary_flux_functional(const ElasticityTensor& tensor, const FieldSolution& u,
                                int j);

/// Scalar Laplace self-test on the same mesh: data 1 on the inclusion, 0 on
/// the outer boundary. The discrete solution must respect the maximum
/// principle; one value per node is stored in the x-slot of the field.
FieldSolution solve_scalar_laplace(std::shared_ptr<const GapMesh> mesh,
                                   const SolverOptions& opts = {});

Mat2 gradient_at(const FieldSolution& u, const Vec2& x);
Vec2 value_at(const FieldSolution& u, const Vec2& x);

struct MonolithicResult {
  FieldSolution field;
  DVec rigid_coefficients;  // the d(d+1)/2 free constants
  double residual = 0.0;
};

/// One-shot constrained solve: the inclusion boundary carries an unknown rigid
/// motion, fixed by the variational structure (test-space includes the rigid
/// modes). Used as an independent oracle for the decomposition path.
MonolithicResult solve_constrained_monolithic(std::shared_ptr<const GapMesh> mesh,
                                              const ElasticityTensor& tensor,
                                              const PhiField& phi,
                                              const SolverOptions& opts = {});

}  // namespace gapstress

#endif
