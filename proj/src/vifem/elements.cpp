#include "vifem/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace vifem {

void shape_values(CellKind kind, const Vec3& r, double n[kMaxCellNodes]) {
  const double x = r[0], y = r[1], z = r[2];
  switch (kind) {
    case CellKind::Tri3:
      n[0] = 1.0 - x - y;
      n[1] = x;
      n[2] = y;
      break;
    case CellKind::Quad4:
      n[0] = (1 - x) * (1 - y);
      n[1] = x * (1 - y);
      n[2] = x * y;
      n[3] = (1 - x) * y;
      break;
    case CellKind::Hex8:
      n[0] = (1 - x) * (1 - y) * (1 - z);
      n[1] = x * (1 - y) * (1 - z);
      n[2] = x * y * (1 - z);
      n[3] = (1 - x) * y * (1 - z);
      n[4] = (1 - x) * (1 - y) * z;
      n[5] = x * (1 - y) * z;
      n[6] = x * y * z;
      n[7] = (1 - x) * y * z;
      break;
  }
}

void shape_gradients(CellKind kind, const Vec3& r, Vec3 dn[kMaxCellNodes]) {
  const double x = r[0], y = r[1], z = r[2];
  switch (kind) {
    case CellKind::Tri3:
      dn[0] = {-1, -1, 0};
      dn[1] = {1, 0, 0};
      dn[2] = {0, 1, 0};
      break;
    case CellKind::Quad4:
      dn[0] = {-(1 - y), -(1 - x), 0};
      dn[1] = {1 - y, -x, 0};
      dn[2] = {y, x, 0};
      dn[3] = {-y, 1 - x, 0};
      break;
    case CellKind::Hex8:
      dn[0] = {-(1 - y) * (1 - z), -(1 - x) * (1 - z), -(1 - x) * (1 - y)};
      dn[1] = {(1 - y) * (1 - z), -x * (1 - z), -x * (1 - y)};
      dn[2] = {y * (1 - z), x * (1 - z), -x * y};
      dn[3] = {-y * (1 - z), (1 - x) * (1 - z), -(1 - x) * y};
      dn[4] = {-(1 - y) * z, -(1 - x) * z, (1 - x) * (1 - y)};
      dn[5] = {(1 - y) * z, -x * z, x * (1 - y)};
      dn[6] = {y * z, x * z, x * y};
      dn[7] = {-y * z, (1 - x) * z, (1 - x) * y};
      break;
  }
}

void shape_hessians(CellKind kind, const Vec3& r, Mat3 h[kMaxCellNodes]) {
  const double x = r[0], y = r[1], z = r[2];
  const int npc = nodes_per_cell(kind);
  for (int a = 0; a < npc; ++a) h[a] = zero_mat3();
  if (kind == CellKind::Tri3) return;
  if (kind == CellKind::Quad4) {
    const double sxy[4] = {1, -1, 1, -1};  // d2/dxdy of the four bilinears
    for (int a = 0; a < 4; ++a) h[a][0][1] = h[a][1][0] = sxy[a];
    return;
  }
  // hex8: mixed second derivatives of the trilinear basis
  const double sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
  const double sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
  const double sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
  const double ox[8] = {1, 0, 0, 1, 1, 0, 0, 1};  // the (1-x) vs x factor at x=0
  for (int a = 0; a < 8; ++a) {
    const double fx = ox[a] == 1 ? 1 - x : x;
    const double fy = sy[a] < 0 ? 1 - y : y;
    const double fz = sz[a] < 0 ? 1 - z : z;
    h[a][0][1] = h[a][1][0] = sx[a] * sy[a] * fz;
    h[a][0][2] = h[a][2][0] = sx[a] * sz[a] * fy;
    h[a][1][2] = h[a][2][1] = sy[a] * sz[a] * fx;
  }
}

MappedPoint map_point(const Mesh& mesh, int cell, const Vec3& ref) {
  MappedPoint mp;
  const int npc = nodes_per_cell(mesh.kind);
  Vec3 dn[kMaxCellNodes];
  shape_values(mesh.kind, ref, mp.shape);
  shape_gradients(mesh.kind, ref, dn);

  Mat3 j = zero_mat3();
  for (int a = 0; a < npc; ++a) {
    const Vec3& p = mesh.nodes[mesh.cell_node(cell, a)];
    mp.x = mp.x + mp.shape[a] * p;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) j[r][c] += p[r] * dn[a][c];
  }
  if (mesh.dim == 2) j[2][2] = 1.0;  // pad so the 3x3 inverse is usable

  const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                     j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                     j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  if (det <= 0.0) throw std::runtime_error("map_point: non-positive Jacobian determinant");
  mp.detj = det;

  Mat3& inv = mp.jac_inv;
  inv[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / det;
  inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det;
  inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det;
  inv[1][0] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / det;
  inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det;
  inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det;
  inv[2][0] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / det;
  inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det;
  inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det;

  for (int a = 0; a < npc; ++a)
    for (int r = 0; r < 3; ++r)
      mp.grad[a][r] = inv[0][r] * dn[a][0] + inv[1][r] * dn[a][1] + inv[2][r] * dn[a][2];
  return mp;
}

void physical_hessians(const Mesh& mesh, CellKind kind, const MappedPoint& mp, const Vec3& ref,
                       Mat3 h[kMaxCellNodes]) {
  Mat3 href[kMaxCellNodes];
  shape_hessians(kind, ref, href);
  const int npc = nodes_per_cell(kind);
  const Mat3& ji = mp.jac_inv;
  for (int a = 0; a < npc; ++a) {
    Mat3 out = zero_mat3();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) s += ji[p][r] * href[a][p][q] * ji[q][c];
        out[r][c] = s;
      }
    h[a] = out;
  }
}

Vec3 inverse_map(const Mesh& mesh, int cell, const Vec3& x) {
  Vec3 ref = mesh.kind == CellKind::Tri3 ? Vec3{1.0 / 3.0, 1.0 / 3.0, 0} : Vec3{0.5, 0.5, mesh.dim == 3 ? 0.5 : 0.0};
  for (int it = 0; it < 30; ++it) {
    const MappedPoint mp = map_point(mesh, cell, ref);
    Vec3 r = x - mp.x;
    if (mesh.dim == 2) r[2] = 0.0;
    if (norm(r) < 1e-13) return ref;
    // ref += J^{-1} r
    for (int c = 0; c < 3; ++c)
      ref[c] += mp.jac_inv[c][0] * r[0] + mp.jac_inv[c][1] * r[1] + mp.jac_inv[c][2] * r[2];
  }
  throw std::runtime_error("inverse_map: Newton iteration did not converge");
}

}  // namespace vifem
