#ifndef GAPSTRESS_MESH_HPP
#define GAPSTRESS_MESH_HPP

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapstress/geometry.hpp"
#include "gapstress/linalg.hpp"

namespace gapstress {

struct MeshParams {
  int n_layers = 6;       // elements across every gap cross-section
  double c_g = 0.5;       // grading: target tangential size = c_g * delta(x') in the gap
  double h_max = 0.25;    // size cap away from the gap
  double dx_floor = 0.0;  // lower bound on tangential size (0: derived from epsilon)

  MeshParams refined(double factor = 1.5) const {
    MeshParams p = *this;
    p.n_layers = static_cast<int>(std::lround(n_layers * factor));
    p.c_g = c_g / factor;
    p.h_max = h_max / factor;
    p.dx_floor = dx_floor / factor;
    return p;
  }
};

struct MeshBuildError : std::runtime_error {
  Vec2 where;
  MeshBuildError(const std::string& msg, Vec2 at) : std::runtime_error(msg), where(at) {}
};

/// Structured mesh of the shell Omega = D \ D1: a ring of fibers joining the
/// outer boundary (t=0) to the inclusion boundary (t=1), n_layers quads across,
/// each quad split into two curved six-node triangles. Fibers are vertical in
/// the gap window (cross-sections {x' = const}) and arc-length matched outside.
struct GapMesh {
  std::shared_ptr<const GapGeometry> geom;
  MeshParams params;

  std::vector<Vec2> nodes;
  std::vector<std::array<int, 6>> tris;  // 3 vertices, then midpoints of (01),(12),(20)

  int n_cols = 0;  // fine columns around the ring (periodic)
  int n_rows = 0;  // fine rows across, = 2*n_layers + 1
  int gap_cols = 0;  // fine columns 0..gap_cols (inclusive) carry the gap window
  std::vector<double> col_x;  // x1 of each gap fine column

  struct Edge {
    int tri;
    int local;  // edge id in the triangle: 0=(v0,v1), 1=(v1,v2), 2=(v2,v0)
  };
  std::vector<Edge> outer_edges;
  std::vector<Edge> inclusion_edges;
  std::vector<int> outer_nodes;
  std::vector<int> inclusion_nodes;

  double min_jacobian = 0.0;  // min det J / element area scale, over quadrature points

  int node_id(int col, int row) const { return (col % n_cols) * n_rows + row; }
  int node_count() const { return n_cols * n_rows; }
  bool on_outer(int node) const { return node % n_rows == 0; }
  bool on_inclusion(int node) const { return node % n_rows == n_rows - 1; }
  bool on_boundary(int node) const { return on_outer(node) || on_inclusion(node); }

  /// Locate the element containing x; returns (tri, xi, eta) or tri = -1.
  struct Location {
    int tri = -1;
    double xi = 0.0;
    double eta = 0.0;
  };
  Location locate(const Vec2& x) const;

  // point-location acceleration
  struct BinGrid {
    double x0, y0, dx, dy;
    int nx, ny;
    std::vector<std::vector<int>> cells;
  };
  BinGrid bins;
};

std::shared_ptr<GapMesh> build_gap_mesh(const GapGeometry& g, const MeshParams& params);

// P2 reference element helpers (shared with assembly and evaluation)
void p2_shape(double xi, double eta, double N[6]);
void p2_shape_grad(double xi, double eta, double dN[6][2]);

struct TriQuadrature {
  static constexpr int n = 7;
  double xi[7], eta[7], w[7];  // weights include the reference area 1/2
  TriQuadrature();
};

}  // namespace gapstress

#endif
