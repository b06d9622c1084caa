#include "gapstress/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace gapstress {

void p2_shape(double xi, double eta, double N[6]) {
  const double l1 = 1.0 - xi - eta, l2 = xi, l3 = eta;
  N[0] = l1 * (2.0 * l1 - 1.0);
  N[1] = l2 * (2.0 * l2 - 1.0);
  N[2] = l3 * (2.0 * l3 - 1.0);
  N[3] = 4.0 * l1 * l2;
  N[4] = 4.0 * l2 * l3;
  N[5] = 4.0 * l3 * l1;
}

void p2_shape_grad(double xi, double eta, double dN[6][2]) {
  const double l1 = 1.0 - xi - eta, l2 = xi, l3 = eta;
  dN[0][0] = -(4.0 * l1 - 1.0);
  dN[0][1] = -(4.0 * l1 - 1.0);
  dN[1][0] = 4.0 * l2 - 1.0;
  dN[1][1] = 0.0;
  dN[2][0] = 0.0;
  dN[2][1] = 4.0 * l3 - 1.0;
  dN[3][0] = 4.0 * (l1 - l2);
  dN[3][1] = -4.0 * l2;
  dN[4][0] = 4.0 * l3;
  dN[4][1] = 4.0 * l2;
  dN[5][0] = -4.0 * l3;
  dN[5][1] = 4.0 * (l1 - l3);
}

TriQuadrature::TriQuadrature() {
  // degree-5 rule: centroid plus two symmetric orbits
  const double a1 = 0.059715871789770, b1 = 0.470142064105115;
  const double a2 = 0.797426985353087, b2 = 0.101286507323456;
  const double wc = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
  const double bx[7] = {1.0 / 3.0, a1, b1, b1, a2, b2, b2};
  const double by[7] = {1.0 / 3.0, b1, a1, b1, b2, a2, b2};
  const double bw[7] = {wc, w1, w1, w1, w2, w2, w2};
  for (int i = 0; i < 7; ++i) {
    xi[i] = bx[i];
    eta[i] = by[i];
    w[i] = 0.5 * bw[i];
  }
}

namespace {

struct FiberSpec {
  bool in_gap;
  double param;  // x1 in the gap, arc fraction sigma on the top
};

struct FiberEndpoints {
  Vec2 outer, inner;
};

class FiberFactory {
 public:
  FiberFactory(const GapGeometry& g)
      : g_(g),
        outer_top_(g.outer, g.outer_window_phi, 2.0 * M_PI - g.outer_window_phi),
        inner_top_(g.inclusion, g.inclusion_window_phi, 2.0 * M_PI - g.inclusion_window_phi) {}

  FiberEndpoints eval(const FiberSpec& s) const {
    FiberEndpoints f;
    if (s.in_gap) {
      f.outer = {s.param, g_.lower_height(s.param)};
      f.inner = {s.param, g_.upper_height(s.param)};
    } else {
      f.outer = g_.outer.point(outer_top_.phi_at(s.param));
      f.inner = g_.inclusion.point(inner_top_.phi_at(s.param));
    }
    return f;
  }

  double outer_top_length() const { return outer_top_.length(); }
  double inner_top_length() const { return inner_top_.length(); }

 private:
  const GapGeometry& g_;
  ArcTable outer_top_;
  ArcTable inner_top_;
};

FiberSpec mid_spec(const FiberSpec& a, const FiberSpec& b) {
  if (a.in_gap && b.in_gap) return {true, 0.5 * (a.param + b.param)};
  if (a.in_gap && !b.in_gap) return {false, 0.5 * b.param};  // junction at sigma = 0
  if (!a.in_gap && b.in_gap) return {false, 0.5 * (a.param + 1.0)};  // junction at sigma = 1
  return {false, 0.5 * (a.param + b.param)};
}

std::vector<double> grade_gap(const GapGeometry& g, const MeshParams& p, double w) {
  const double floor =
      (p.dx_floor > 0.0) ? p.dx_floor : 0.25 * p.c_g * g.epsilon;
  auto spacing = [&](double x) {
    const double delta = g.epsilon + g.profile.gap(std::fabs(x));
    return std::clamp(p.c_g * delta, floor, p.h_max);
  };
  // march from the touching point outwards
  std::vector<double> xs = {0.0};
  while (xs.back() < w) {
    double step = spacing(xs.back());
    xs.push_back(std::min(xs.back() + step, w));
  }
  // merge a short trailing cell into its neighbor
  if (xs.size() >= 3 && (xs.back() - xs[xs.size() - 2]) < 0.4 * spacing(xs[xs.size() - 2]))
    xs.erase(xs.end() - 2);
  // mirror: -w ... 0 ... w
  std::vector<double> full;
  for (std::size_t i = xs.size(); i-- > 1;) full.push_back(-xs[i]);
  for (double v : xs) full.push_back(v);
  return full;
}

}  // namespace

std::shared_ptr<GapMesh> build_gap_mesh(const GapGeometry& g, const MeshParams& params) {
  if (g.dim != 2) throw std::invalid_argument("build_gap_mesh: only 2-D geometries are meshed");
  if (params.n_layers < 1 || !(params.c_g > 0.0) || !(params.h_max > 0.0))
    throw std::invalid_argument("build_gap_mesh: invalid mesh parameters");

  auto mesh = std::make_shared<GapMesh>();
  mesh->geom = std::make_shared<GapGeometry>(g);
  mesh->params = params;

  FiberFactory fibers(g);
  const double w = 2.0 * g.profile.R;

  // ring of fibers: gap window swept by x1, then top stations by arc fraction
  std::vector<double> gap_x = grade_gap(g, params, w);
  const double top_len = std::max(fibers.outer_top_length(), fibers.inner_top_length());
  const int n_top = std::max(4, static_cast<int>(std::ceil(top_len / params.h_max)));

  std::vector<FiberSpec> ring;
  for (double x : gap_x) ring.push_back({true, x});
  for (int j = 1; j < n_top; ++j)
    ring.push_back({false, static_cast<double>(j) / n_top});

  const int nf = static_cast<int>(ring.size());
  const int nt = params.n_layers;
  mesh->n_cols = 2 * nf;
  mesh->n_rows = 2 * nt + 1;
  mesh->gap_cols = 2 * (static_cast<int>(gap_x.size()) - 1);

  // fine columns: every column is a genuine fiber (boundary nodes on the curves)
  std::vector<FiberEndpoints> cols(2 * nf);
  mesh->col_x.assign(mesh->gap_cols + 1, 0.0);
  for (int i = 0; i < nf; ++i) {
    const FiberSpec& a = ring[i];
    const FiberSpec& b = ring[(i + 1) % nf];
    cols[2 * i] = fibers.eval(a);
    cols[2 * i + 1] = fibers.eval(mid_spec(a, b));
    if (2 * i <= mesh->gap_cols && a.in_gap) mesh->col_x[2 * i] = a.param;
    if (2 * i + 1 <= mesh->gap_cols && a.in_gap && b.in_gap)
      mesh->col_x[2 * i + 1] = 0.5 * (a.param + b.param);
  }

  mesh->nodes.resize(mesh->node_count());
  for (int I = 0; I < mesh->n_cols; ++I) {
    for (int J = 0; J < mesh->n_rows; ++J) {
      const double t = static_cast<double>(J) / (mesh->n_rows - 1);
      const Vec2 p = cols[I].outer * (1.0 - t) + cols[I].inner * t;
      mesh->nodes[mesh->node_id(I, J)] = p;
    }
  }

  // two triangles per quad; P2 connectivity over the fine grid
  mesh->tris.reserve(2 * nf * nt);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int I0 = 2 * i, J0 = 2 * j;
      auto nid = [&](int a, int b) { return mesh->node_id(I0 + a, J0 + b); };
      // lower-right triangle
      mesh->tris.push_back(
          {nid(0, 0), nid(2, 0), nid(2, 2), nid(1, 0), nid(2, 1), nid(1, 1)});
      // upper-left triangle
      mesh->tris.push_back(
          {nid(0, 0), nid(2, 2), nid(0, 2), nid(1, 1), nid(1, 2), nid(0, 1)});
      if (j == 0)
        mesh->outer_edges.push_back({static_cast<int>(mesh->tris.size()) - 2, 0});
      if (j == nt - 1)
        mesh->inclusion_edges.push_back({static_cast<int>(mesh->tris.size()) - 1, 1});
    }
  }
  for (int I = 0; I < mesh->n_cols; ++I) {
    mesh->outer_nodes.push_back(mesh->node_id(I, 0));
    mesh->inclusion_nodes.push_back(mesh->node_id(I, mesh->n_rows - 1));
  }

  // Jacobian validity at the quadrature points of every element
  TriQuadrature quad;
  double worst = 1e300;
  Vec2 worst_at{0, 0};
  for (const auto& tri : mesh->tris) {
    Vec2 xy[6];
    for (int a = 0; a < 6; ++a) xy[a] = mesh->nodes[tri[a]];
    const double scale = std::max((xy[1] - xy[0]).norm() * (xy[2] - xy[0]).norm(), 1e-300);
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
      if (det / scale < worst) {
        worst = det / scale;
        worst_at = xy[0];
      }
    }
  }
  mesh->min_jacobian = worst;
  if (!(worst > 0.0))
    throw MeshBuildError("build_gap_mesh: inverted element (non-positive Jacobian)", worst_at);

  // bin grid over element bounding boxes for point location
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const Vec2& p : mesh->nodes) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  auto& bins = mesh->bins;
  bins.nx = std::clamp(static_cast<int>((xhi - xlo) / params.h_max), 8, 256);
  bins.ny = std::clamp(static_cast<int>((yhi - ylo) / params.h_max), 8, 256);
  bins.x0 = xlo;
  bins.y0 = ylo;
  bins.dx = (xhi - xlo) / bins.nx + 1e-30;
  bins.dy = (yhi - ylo) / bins.ny + 1e-30;
  bins.cells.assign(static_cast<std::size_t>(bins.nx) * bins.ny, {});
  for (std::size_t e = 0; e < mesh->tris.size(); ++e) {
    double exlo = 1e300, exhi = -1e300, eylo = 1e300, eyhi = -1e300;
    for (int a = 0; a < 6; ++a) {
      const Vec2 p = mesh->nodes[mesh->tris[e][a]];
      exlo = std::min(exlo, p.x);
      exhi = std::max(exhi, p.x);
      eylo = std::min(eylo, p.y);
      eyhi = std::max(eyhi, p.y);
    }
    const int ix0 = std::clamp(static_cast<int>((exlo - bins.x0) / bins.dx), 0, bins.nx - 1);
    const int ix1 = std::clamp(static_cast<int>((exhi - bins.x0) / bins.dx), 0, bins.nx - 1);
    const int iy0 = std::clamp(static_cast<int>((eylo - bins.y0) / bins.dy), 0, bins.ny - 1);
    const int iy1 = std::clamp(static_cast<int>((eyhi - bins.y0) / bins.dy), 0, bins.ny - 1);
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy)
        bins.cells[static_cast<std::size_t>(ix) * bins.ny + iy].push_back(static_cast<int>(e));
  }
  return mesh;
}

namespace {

bool invert_p2_map(const GapMesh& mesh, int tri, const Vec2& x, double& xi, double& eta) {
  Vec2 xy[6];
  for (int a = 0; a < 6; ++a) xy[a] = mesh.nodes[mesh.tris[tri][a]];
  double u = 1.0 / 3.0, v = 1.0 / 3.0;
  for (int it = 0; it < 30; ++it) {
    double N[6], dN[6][2];
    p2_shape(u, v, N);
    p2_shape_grad(u, v, dN);
    Vec2 pos{0, 0};
    double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
    for (int a = 0; a < 6; ++a) {
      pos += xy[a] * N[a];
      j00 += xy[a].x * dN[a][0];
      j01 += xy[a].x * dN[a][1];
      j10 += xy[a].y * dN[a][0];
      j11 += xy[a].y * dN[a][1];
    }
    const Vec2 r = x - pos;
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0) return false;
    const double du = (j11 * r.x - j01 * r.y) / det;
    const double dv = (-j10 * r.x + j00 * r.y) / det;
    u += du;
    v += dv;
    if (std::fabs(du) + std::fabs(dv) < 1e-13) break;
    if (u < -2.0 || v < -2.0 || u > 3.0 || v > 3.0) return false;
  }
  const double tol = 1e-8;
  if (u < -tol || v < -tol || u + v > 1.0 + tol) return false;
  xi = std::clamp(u, 0.0, 1.0);
  eta = std::clamp(v, 0.0, 1.0);
  return true;
}

}  // namespace

GapMesh::Location GapMesh::locate(const Vec2& x) const {
  Location loc;
  // fast path: the gap window, fibers are vertical there
  const double w = col_x.empty() ? -1.0 : col_x.back();
  if (!col_x.empty() && std::fabs(x.x) <= w) {
    const double h = geom->lower_height(x.x);
    const double delta = geom->epsilon + geom->profile.gap(std::fabs(x.x));
    const double t = (x.y - h) / delta;
    if (t > -0.2 && t < 1.2) {
      auto it = std::upper_bound(col_x.begin(), col_x.end(), x.x);
      int qi = std::clamp(static_cast<int>(it - col_x.begin() - 1) / 2, 0, gap_cols / 2 - 1);
      const int nt = (n_rows - 1) / 2;
      int qj = std::clamp(static_cast<int>(t * nt), 0, nt - 1);
      for (int di : {0, -1, 1}) {
        for (int dj : {0, -1, 1}) {
          const int i = qi + di, j = qj + dj;
          if (i < 0 || j < 0 || i >= gap_cols / 2 || j >= nt) continue;
          const int base = 2 * (i * nt + j);
          for (int k = 0; k < 2; ++k) {
            if (invert_p2_map(*this, base + k, x, loc.xi, loc.eta)) {
              loc.tri = base + k;
              return loc;
            }
          }
        }
      }
    }
  }
  // general path: bin grid
  const int ix = std::clamp(static_cast<int>((x.x - bins.x0) / bins.dx), 0, bins.nx - 1);
  const int iy = std::clamp(static_cast<int>((x.y - bins.y0) / bins.dy), 0, bins.ny - 1);
  for (int dx = 0; dx < 2; ++dx) {
    for (int sx = -1; sx <= 1; sx += 2) {
      const int jx = ix + sx * dx;
      if (jx < 0 || jx >= bins.nx || (dx == 0 && sx == 1)) continue;
      for (int dy = 0; dy < 2; ++dy) {
        for (int sy = -1; sy <= 1; sy += 2) {
          const int jy = iy + sy * dy;
          if (jy < 0 || jy >= bins.ny || (dy == 0 && sy == 1)) continue;
          for (int e : bins.cells[static_cast<std::size_t>(jx) * bins.ny + jy]) {
            if (invert_p2_map(*this, e, x, loc.xi, loc.eta)) {
              loc.tri = e;
              return loc;
            }
          }
        }
      }
    }
  }
  return loc;
}

}  // namespace gapstress
