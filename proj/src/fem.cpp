#include "gapstress/fem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace gapstress {

namespace {

const TriQuadrature& tri_quad() {
  static const TriQuadrature q;
  return q;
}

// element stiffness of a curved P2 triangle, local dof = 2*a + c
void element_stiffness(const GapMesh& mesh, int tri, const ElasticityTensor& tensor,
                       double* ke) {
  const auto& quad = tri_quad();
  Vec2 xy[6];
  for (int a = 0; a < 6; ++a) xy[a] = mesh.nodes[mesh.tris[tri][a]];
  std::fill(ke, ke + 144, 0.0);
  const double lambda = tensor.lame.lambda;
  const double mu = tensor.lame.mu;
  for (int q = 0; q < TriQuadrature::n; ++q) {
    double dN[6][2];
    p2_shape_grad(quad.xi[q], quad.eta[q], dN);
    double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
    for (int a = 0; a < 6; ++a) {
      j00 += xy[a].x * dN[a][0];
      j01 += xy[a].x * dN[a][1];
      j10 += xy[a].y * dN[a][0];
      j11 += xy[a].y * dN[a][1];
    }
    const double det = j00 * j11 - j01 * j10;
    const double wq = quad.w[q] * det;
    double g[6][2];  // physical gradients of the shape functions
    for (int a = 0; a < 6; ++a) {
      g[a][0] = (j11 * dN[a][0] - j10 * dN[a][1]) / det;
      g[a][1] = (-j01 * dN[a][0] + j00 * dN[a][1]) / det;
    }
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        const double gg = g[a][0] * g[b][0] + g[a][1] * g[b][1];
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            double v = lambda * g[a][c] * g[b][d] + mu * g[a][d] * g[b][c];
            if (c == d) v += mu * gg;
            ke[(2 * a + c) * 12 + (2 * b + d)] += wq * v;
          }
        }
      }
    }
  }
}

std::vector<std::array<double, 144>> compute_element_matrices(const GapMesh& mesh,
                                                              const ElasticityTensor& tensor,
                                                              int threads) {
  std::vector<std::array<double, 144>> out(mesh.tris.size());
  const int nthreads = std::max(1, threads);
  if (nthreads == 1 || mesh.tris.size() < 256) {
    for (std::size_t e = 0; e < mesh.tris.size(); ++e)
      element_stiffness(mesh, static_cast<int>(e), tensor, out[e].data());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (mesh.tris.size() + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(mesh.tris.size(), lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t e = lo; e < hi; ++e)
        element_stiffness(mesh, static_cast<int>(e), tensor, out[e].data());
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

// free-dof numbering: rows J in [1, 2*n_layers - 1] of every fine column
std::vector<int> build_free_index(const GapMesh& mesh, int& n_free) {
  std::vector<int> idx(2 * mesh.node_count(), -1);
  const int rows_free = mesh.n_rows - 2;
  for (int I = 0; I < mesh.n_cols; ++I) {
    for (int J = 1; J < mesh.n_rows - 1; ++J) {
      const int node = I * mesh.n_rows + J;
      for (int c = 0; c < 2; ++c)
        idx[2 * node + c] = 2 * (I * rows_free + (J - 1)) + c;
    }
  }
  n_free = 2 * mesh.n_cols * rows_free;
  return idx;
}

std::vector<int> make_band_order(const GapMesh& mesh, int n_free, int extra_tail) {
  const int rows_free = mesh.n_rows - 2;
  std::vector<int> order;
  order.reserve(n_free + extra_tail);
  auto push_col = [&](int I) {
    for (int J = 0; J < rows_free; ++J)
      for (int c = 0; c < 2; ++c) order.push_back(2 * (I * rows_free + J) + c);
  };
  for (int I = 1; I <= mesh.n_cols - 3; ++I) push_col(I);
  push_col(mesh.n_cols - 2);
  push_col(mesh.n_cols - 1);
  push_col(0);
  for (int t = 0; t < extra_tail; ++t) order.push_back(n_free + t);
  return order;
}

CsrMatrix assemble_free_csr(const GapMesh& mesh,
                            const std::vector<std::array<double, 144>>& ek,
                            const std::vector<int>& free_index, int n_free) {
  CsrBuilder builder(n_free);
  for (std::size_t e = 0; e < mesh.tris.size(); ++e) {
    const auto& tri = mesh.tris[e];
    int dofs[12];
    for (int a = 0; a < 6; ++a)
      for (int c = 0; c < 2; ++c) dofs[2 * a + c] = free_index[2 * tri[a] + c];
    for (int p = 0; p < 12; ++p) {
      if (dofs[p] < 0) continue;
      for (int q = 0; q < 12; ++q) {
        if (dofs[q] < 0) continue;
        builder.add(dofs[p], dofs[q], ek[e][p * 12 + q]);
      }
    }
  }
  return builder.finish();
}

const double kEdgeGaussX[4] = {0.069431844202973712, 0.33000947820757187,
                               0.66999052179242813, 0.93056815579702623};
const double kEdgeGaussW[4] = {0.17392742256872693, 0.32607257743127307,
                               0.32607257743127307, 0.17392742256872693};

void edge_reference_point(int local, double s, double& xi, double& eta, double dref[2]) {
  switch (local) {
    case 0:
      xi = s;
      eta = 0.0;
      dref[0] = 1.0;
      dref[1] = 0.0;
      break;
    case 1:
      xi = 1.0 - s;
      eta = s;
      dref[0] = -1.0;
      dref[1] = 1.0;
      break;
    default:
      xi = 0.0;
      eta = 1.0 - s;
      dref[0] = 0.0;
      dref[1] = -1.0;
      break;
  }
}

Mat2 gradient_at_ref(const FieldSolution& u, int tri, double xi, double eta) {
  const GapMesh& mesh = *u.mesh;
  Vec2 xy[6], uv[6];
  for (int a = 0; a < 6; ++a) {
    xy[a] = mesh.nodes[mesh.tris[tri][a]];
    uv[a] = u.at_node(mesh.tris[tri][a]);
  }
  double dN[6][2];
  p2_shape_grad(xi, eta, dN);
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
  for (int a = 0; a < 6; ++a) {
    j00 += xy[a].x * dN[a][0];
    j01 += xy[a].x * dN[a][1];
    j10 += xy[a].y * dN[a][0];
    j11 += xy[a].y * dN[a][1];
  }
  const double det = j00 * j11 - j01 * j10;
  Mat2 grad;
  for (int a = 0; a < 6; ++a) {
    const double gx = (j11 * dN[a][0] - j10 * dN[a][1]) / det;
    const double gy = (-j01 * dN[a][0] + j00 * dN[a][1]) / det;
    grad.m[0][0] += uv[a].x * gx;
    grad.m[0][1] += uv[a].x * gy;
    grad.m[1][0] += uv[a].y * gx;
    grad.m[1][1] += uv[a].y * gy;
  }
  return grad;
}

}  // namespace

SubproblemSolver::SubproblemSolver(std::shared_ptr<const GapMesh> mesh,
                                   const ElasticityTensor& tensor, const SolverOptions& opts)
    : mesh_(std::move(mesh)), tensor_(tensor), opts_(opts) {
  element_k_ = compute_element_matrices(*mesh_, tensor_, opts_.threads);
  free_index_ = build_free_index(*mesh_, n_free_);
  k_free_ = assemble_free_csr(*mesh_, element_k_, free_index_, n_free_);
  if (opts_.method == "direct")
    direct_ = std::make_unique<BandSchurSolver>(k_free_, make_band_order(*mesh_, n_free_, 0),
                                                2 * 3 * (mesh_->n_rows - 2));
}

FieldSolution SubproblemSolver::solve_internal(const std::vector<double>& boundary_values,
                                               int label) const {
  // rhs = -K_fb u_b
  DVec rhs(n_free_, 0.0);
  for (std::size_t e = 0; e < mesh_->tris.size(); ++e) {
    const auto& tri = mesh_->tris[e];
    double ub[12];
    int dofs[12];
    bool any = false;
    for (int a = 0; a < 6; ++a) {
      for (int c = 0; c < 2; ++c) {
        const int p = 2 * a + c;
        dofs[p] = free_index_[2 * tri[a] + c];
        ub[p] = (dofs[p] < 0) ? boundary_values[2 * tri[a] + c] : 0.0;
        if (ub[p] != 0.0) any = true;
      }
    }
    if (!any) continue;
    const auto& ke = element_k_[e];
    for (int p = 0; p < 12; ++p) {
      if (dofs[p] < 0) continue;
      double s = 0.0;
      for (int q = 0; q < 12; ++q) s += ke[p * 12 + q] * ub[q];
      rhs[dofs[p]] -= s;
    }
  }

  DVec x;
  if (direct_) {
    x = direct_->solve_refined(k_free_, rhs);
  } else {
    x.assign(n_free_, 0.0);
    auto r = pcg_solve(k_free_, rhs, x, opts_.tol);
    if (!r.converged)
      throw std::runtime_error("SubproblemSolver: conjugate gradients did not converge");
  }

  FieldSolution sol;
  sol.mesh = mesh_;
  sol.subproblem = label;
  sol.values = boundary_values;
  for (std::size_t k = 0; k < free_index_.size(); ++k)
    if (free_index_[k] >= 0) sol.values[k] = x[free_index_[k]];
  const double rn = norm2(k_free_.residual(x, rhs));
  sol.residual = rn / std::max(norm2(rhs), 1e-300);
  if (sol.residual > opts_.tol)
    throw std::runtime_error("SubproblemSolver: algebraic residual above tolerance");
  return sol;
}

FieldSolution SubproblemSolver::solve_rigid(int i) const {
  RigidBasis basis(2);
  if (i < 1 || i > basis.size())
    throw std::invalid_argument("solve_rigid: index must be 1..d(d+1)/2");
  std::vector<double> bv(2 * mesh_->node_count(), 0.0);
  for (int node : mesh_->inclusion_nodes) {
    const Vec2 v = basis.value2(i, mesh_->nodes[node]);
    bv[2 * node] = v.x;
    bv[2 * node + 1] = v.y;
  }
  return solve_internal(bv, i);
}

FieldSolution SubproblemSolver::solve_boundary_data(const PhiField& phi) const {
  std::vector<double> bv(2 * mesh_->node_count(), 0.0);
  if (!phi.is_zero()) {
    for (int node : mesh_->outer_nodes) {
      const Vec2 v = phi.value2(mesh_->nodes[node]);
      bv[2 * node] = v.x;
      bv[2 * node + 1] = v.y;
    }
  }
  return solve_internal(bv, 0);
}

FieldSolution SubproblemSolver::solve_dirichlet(
    const std::function<Vec2(const Vec2&)>& outer_data,
    const std::function<Vec2(const Vec2&)>& inclusion_data, int label) const {
  std::vector<double> bv(2 * mesh_->node_count(), 0.0);
  for (int node : mesh_->outer_nodes) {
    const Vec2 v = outer_data(mesh_->nodes[node]);
    bv[2 * node] = v.x;
    bv[2 * node + 1] = v.y;
  }
  for (int node : mesh_->inclusion_nodes) {
    const Vec2 v = inclusion_data(mesh_->nodes[node]);
    bv[2 * node] = v.x;
    bv[2 * node + 1] = v.y;
  }
  return solve_internal(bv, label);
}

double SubproblemSolver::rayleigh_probe(unsigned seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 1e300;
  DVec x(n_free_), y;
  for (int trial = 0; trial < 8; ++trial) {
    for (auto& v : x) v = uni(rng);
    k_free_.multiply(x, y);
    worst = std::min(worst, dot(x, y) / dot(x, x));
  }
  return worst;
}

double energy_inner(const ElasticityTensor& tensor, const FieldSolution& u,
                    const FieldSolution& v) {
  if (u.mesh != v.mesh) throw std::invalid_argument("energy_inner: fields on different meshes");
  const GapMesh& mesh = *u.mesh;
  const auto& quad = tri_quad();
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.tris.size(); ++e) {
    Vec2 xy[6], ua[6], va[6];
    for (int a = 0; a < 6; ++a) {
      xy[a] = mesh.nodes[mesh.tris[e][a]];
      ua[a] = u.at_node(mesh.tris[e][a]);
      va[a] = v.at_node(mesh.tris[e][a]);
    }
    for (int q = 0; q < TriQuadrature::n; ++q) {
      double dN[6][2];
      p2_shape_grad(quad.xi[q], quad.eta[q], dN);
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
      for (int a = 0; a < 6; ++a) {
        j00 += xy[a].x * dN[a][0];
        j01 += xy[a].x * dN[a][1];
        j10 += xy[a].y * dN[a][0];
        j11 += xy[a].y * dN[a][1];
      }
      const double det = j00 * j11 - j01 * j10;
      Mat2 gu, gv;
      for (int a = 0; a < 6; ++a) {
        const double gx = (j11 * dN[a][0] - j10 * dN[a][1]) / det;
        const double gy = (-j01 * dN[a][0] + j00 * dN[a][1]) / det;
        gu.m[0][0] += ua[a].x * gx;
        gu.m[0][1] += ua[a].x * gy;
        gu.m[1][0] += ua[a].y * gx;
        gu.m[1][1] += ua[a].y * gy;
        gv.m[0][0] += va[a].x * gx;
        gv.m[0][1] += va[a].x * gy;
        gv.m[1][0] += va[a].y * gx;
        gv.m[1][1] += va[a].y * gy;
      }
      total += quad.w[q] * det * tensor.energy_density(gu, gv);
    }
  }
  return total;
}

namespace {

double inclusion_traction_pairing(const ElasticityTensor& tensor, const FieldSolution& u,
                                  int j) {
  const GapMesh& mesh = *u.mesh;
  RigidBasis basis(2);
  double total = 0.0;
  for (const auto& edge : mesh.inclusion_edges) {
    Vec2 xy[6];
    for (int a = 0; a < 6; ++a) xy[a] = mesh.nodes[mesh.tris[edge.tri][a]];
    // interior reference point of the parent triangle fixes the normal side
    Vec2 centroid{0, 0};
    {
      double N[6];
      p2_shape(1.0 / 3.0, 1.0 / 3.0, N);
      for (int a = 0; a < 6; ++a) centroid += xy[a] * N[a];
    }
    for (int q = 0; q < 4; ++q) {
      double xi, eta, dref[2];
      edge_reference_point(edge.local, kEdgeGaussX[q], xi, eta, dref);
      double N[6], dN[6][2];
      p2_shape(xi, eta, N);
      p2_shape_grad(xi, eta, dN);
      Vec2 pos{0, 0};
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
      for (int a = 0; a < 6; ++a) {
        pos += xy[a] * N[a];
        j00 += xy[a].x * dN[a][0];
        j01 += xy[a].x * dN[a][1];
        j10 += xy[a].y * dN[a][0];
        j11 += xy[a].y * dN[a][1];
      }
      const Vec2 tangent{j00 * dref[0] + j01 * dref[1], j10 * dref[0] + j11 * dref[1]};
      Vec2 normal{tangent.y, -tangent.x};
      const double len = normal.norm();
      normal = normal * (1.0 / len);
      if (normal.dot(centroid - pos) < 0.0) normal = normal * (-1.0);
      const Mat2 grad = gradient_at_ref(u, edge.tri, xi, eta);
      const Mat2 sigma = tensor.stress(grad);
      const Vec2 traction{sigma.m[0][0] * normal.x + sigma.m[0][1] * normal.y,
                          sigma.m[1][0] * normal.x + sigma.m[1][1] * normal.y};
      const Vec2 psi = basis.value2(j, pos);
      total += kEdgeGaussW[q] * len * traction.dot(psi);
    }
  }
  return total;
}

}  // namespace

double boundary_flux_functional(const ElasticityTensor& tensor, const FieldSolution& u,
                                int j) {
  return inclusion_traction_pairing(tensor, u, j);
}

FieldSolution solve_scalar_laplace(std::shared_ptr<const GapMesh> mesh,
                                   const SolverOptions& opts) {
  const GapMesh& m = *mesh;
  const auto& quad = tri_quad();
  const int rows_free = m.n_rows - 2;

  // scalar free numbering mirrors the vector one with one component
  std::vector<int> free_index(m.node_count(), -1);
  for (int I = 0; I < m.n_cols; ++I)
    for (int J = 1; J < m.n_rows - 1; ++J)
      free_index[I * m.n_rows + J] = I * rows_free + (J - 1);
  const int n_free = m.n_cols * rows_free;

  CsrBuilder builder(n_free);
  DVec rhs(n_free, 0.0);
  for (std::size_t e = 0; e < m.tris.size(); ++e) {
    const auto& tri = m.tris[e];
    Vec2 xy[6];
    double bv[6];
    int dofs[6];
    for (int a = 0; a < 6; ++a) {
      xy[a] = m.nodes[tri[a]];
      dofs[a] = free_index[tri[a]];
      bv[a] = (dofs[a] < 0 && m.on_inclusion(tri[a])) ? 1.0 : 0.0;
    }
    double ke[36] = {};
    for (int q = 0; q < TriQuadrature::n; ++q) {
      double dN[6][2];
      p2_shape_grad(quad.xi[q], quad.eta[q], dN);
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
      for (int a = 0; a < 6; ++a) {
        j00 += xy[a].x * dN[a][0];
        j01 += xy[a].x * dN[a][1];
        j10 += xy[a].y * dN[a][0];
        j11 += xy[a].y * dN[a][1];
      }
      const double det = j00 * j11 - j01 * j10;
      double g[6][2];
      for (int a = 0; a < 6; ++a) {
        g[a][0] = (j11 * dN[a][0] - j10 * dN[a][1]) / det;
        g[a][1] = (-j01 * dN[a][0] + j00 * dN[a][1]) / det;
      }
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          ke[a * 6 + b] += quad.w[q] * det * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
    }
    for (int a = 0; a < 6; ++a) {
      if (dofs[a] < 0) continue;
      for (int b = 0; b < 6; ++b) {
        if (dofs[b] >= 0)
          builder.add(dofs[a], dofs[b], ke[a * 6 + b]);
        else if (bv[b] != 0.0)
          rhs[dofs[a]] -= ke[a * 6 + b] * bv[b];
      }
    }
  }
  CsrMatrix k = builder.finish();

  // same ring ordering as the vector problem, one component
  std::vector<int> order;
  order.reserve(n_free);
  auto push_col = [&](int I) {
    for (int J = 0; J < rows_free; ++J) order.push_back(I * rows_free + J);
  };
  for (int I = 1; I <= m.n_cols - 3; ++I) push_col(I);
  push_col(m.n_cols - 2);
  push_col(m.n_cols - 1);
  push_col(0);
  BandSchurSolver solver(k, order, 3 * rows_free);
  DVec x = solver.solve_refined(k, rhs);

  FieldSolution sol;
  sol.mesh = mesh;
  sol.subproblem = -2;
  sol.values.assign(2 * m.node_count(), 0.0);
  for (int node = 0; node < m.node_count(); ++node) {
    if (free_index[node] >= 0)
      sol.values[2 * node] = x[free_index[node]];
    else
      sol.values[2 * node] = m.on_inclusion(node) ? 1.0 : 0.0;
  }
  sol.residual = norm2(k.residual(x, rhs)) / std::max(norm2(rhs), 1e-300);
  (void)opts;
  return sol;
}

Mat2 gradient_at(const FieldSolution& u, const Vec2& x) {
  auto loc = u.mesh->locate(x);
  if (loc.tri < 0) throw std::invalid_argument("gradient_at: point not inside the mesh");
  return gradient_at_ref(u, loc.tri, loc.xi, loc.eta);
}

Vec2 value_at(const FieldSolution& u, const Vec2& x) {
  auto loc = u.mesh->locate(x);
  if (loc.tri < 0) throw std::invalid_argument("value_at: point not inside the mesh");
  double N[6];
  p2_shape(loc.xi, loc.eta, N);
  Vec2 out{0, 0};
  for (int a = 0; a < 6; ++a) out += u.at_node(u.mesh->tris[loc.tri][a]) * N[a];
  return out;
}

MonolithicResult solve_constrained_monolithic(std::shared_ptr<const GapMesh> mesh,
                                              const ElasticityTensor& tensor,
                                              const PhiField& phi,
                                              const SolverOptions& opts) {
  const GapMesh& m = *mesh;
  RigidBasis basis(2);
  const int n_rigid = basis.size();
  auto ek = compute_element_matrices(m, tensor, opts.threads);
  int n_free = 0;
  std::vector<int> free_index = build_free_index(m, n_free);
  const int n = n_free + n_rigid;

  // boundary data on the outer curve
  std::vector<double> dirichlet(2 * m.node_count(), 0.0);
  if (!phi.is_zero()) {
    for (int node : m.outer_nodes) {
      const Vec2 v = phi.value2(m.nodes[node]);
      dirichlet[2 * node] = v.x;
      dirichlet[2 * node + 1] = v.y;
    }
  }

  // local dof expansion: free dof, rigid combination, or Dirichlet value
  struct Expansion {
    int dof[3];
    double w[3];
    int count = 0;
    double dir = 0.0;
  };
  auto expand = [&](int node, int c) {
    Expansion ex;
    const int f = free_index[2 * node + c];
    if (f >= 0) {
      ex.dof[0] = f;
      ex.w[0] = 1.0;
      ex.count = 1;
    } else if (m.on_inclusion(node)) {
      for (int i = 1; i <= n_rigid; ++i) {
        const Vec2 psi = basis.value2(i, m.nodes[node]);
        ex.dof[ex.count] = n_free + (i - 1);
        ex.w[ex.count] = (c == 0) ? psi.x : psi.y;
        ++ex.count;
      }
    } else {
      ex.dir = dirichlet[2 * node + c];
    }
    return ex;
  };

  CsrBuilder builder(n);
  DVec rhs(n, 0.0);
  for (std::size_t e = 0; e < m.tris.size(); ++e) {
    const auto& tri = m.tris[e];
    Expansion ex[12];
    for (int a = 0; a < 6; ++a)
      for (int c = 0; c < 2; ++c) ex[2 * a + c] = expand(tri[a], c);
    for (int p = 0; p < 12; ++p) {
      for (int q = 0; q < 12; ++q) {
        const double kpq = ek[e][p * 12 + q];
        if (kpq == 0.0) continue;
        for (int ip = 0; ip < ex[p].count; ++ip) {
          for (int iq = 0; iq < ex[q].count; ++iq)
            builder.add(ex[p].dof[ip], ex[q].dof[iq], ex[p].w[ip] * kpq * ex[q].w[iq]);
          if (ex[q].count == 0 && ex[q].dir != 0.0)
            rhs[ex[p].dof[ip]] -= ex[p].w[ip] * kpq * ex[q].dir;
        }
      }
    }
  }
  CsrMatrix k = builder.finish();

  const int tail = 2 * 3 * (m.n_rows - 2) + n_rigid;
  BandSchurSolver solver(k, make_band_order(m, n_free, n_rigid), tail);
  DVec x = solver.solve_refined(k, rhs);

  MonolithicResult out;
  out.rigid_coefficients.assign(x.begin() + n_free, x.end());
  out.field.mesh = mesh;
  out.field.subproblem = -1;
  out.field.values = dirichlet;
  for (int node = 0; node < m.node_count(); ++node) {
    for (int c = 0; c < 2; ++c) {
      const int f = free_index[2 * node + c];
      if (f >= 0) {
        out.field.values[2 * node + c] = x[f];
      } else if (m.on_inclusion(node)) {
        double v = 0.0;
        for (int i = 1; i <= n_rigid; ++i) {
          const Vec2 psi = basis.value2(i, m.nodes[node]);
          v += out.rigid_coefficients[i - 1] * ((c == 0) ? psi.x : psi.y);
        }
        out.field.values[2 * node + c] = v;
      }
    }
  }
  const double rn = norm2(k.residual(x, rhs));
  out.residual = rn / std::max(norm2(rhs), 1e-300);
  out.field.residual = out.residual;
  return out;
}

}  // namespace gapstress
