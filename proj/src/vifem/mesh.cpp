#include "vifem/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace vifem {

int nodes_per_cell(CellKind kind) {
  switch (kind) {
    case CellKind::Tri3: return 3;
    case CellKind::Quad4: return 4;
    case CellKind::Hex8: return 8;
  }
  return 0;
}

int faces_per_cell(CellKind kind) {
  switch (kind) {
    case CellKind::Tri3: return 3;
    case CellKind::Quad4: return 4;
    case CellKind::Hex8: return 6;
  }
  return 0;
}

int nodes_per_face(CellKind kind) { return kind == CellKind::Hex8 ? 4 : 2; }

namespace {
constexpr int kTriFaces[3][2] = {{0, 1}, {1, 2}, {2, 0}};
constexpr int kQuadFaces[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
// VTK hexahedron numbering: 0-3 bottom quad, 4-7 top quad.
constexpr int kHexFaces[6][4] = {
    {0, 3, 2, 1},  // bottom
    {4, 5, 6, 7},  // top
    {0, 1, 5, 4},  // front  (y-)
    {1, 2, 6, 5},  // right  (x+)
    {2, 3, 7, 6},  // back   (y+)
    {3, 0, 4, 7},  // left   (x-)
};
}  // namespace

const int* local_face_nodes(CellKind kind, int face) {
  switch (kind) {
    case CellKind::Tri3: return kTriFaces[face];
    case CellKind::Quad4: return kQuadFaces[face];
    case CellKind::Hex8: return kHexFaces[face];
  }
  return nullptr;
}

Vec3 Mesh::cell_centroid(int cell) const {
  const int npc = nodes_per_cell(kind);
  Vec3 c = {0, 0, 0};
  for (int a = 0; a < npc; ++a) c = c + nodes[cell_node(cell, a)];
  return (1.0 / npc) * c;
}

double Mesh::cell_diameter(int cell) const {
  const int npc = nodes_per_cell(kind);
  double d2 = 0.0;
  for (int a = 0; a < npc; ++a)
    for (int b = a + 1; b < npc; ++b) {
      const Vec3 e = nodes[cell_node(cell, a)] - nodes[cell_node(cell, b)];
      d2 = std::max(d2, dot(e, e));
    }
  return std::sqrt(d2);
}

Mesh build_structured_quad_mesh(int nx, int ny, const Rect& extent) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("structured quad mesh: cell counts must be >= 1");
  if (extent.x1 <= extent.x0 || extent.y1 <= extent.y0)
    throw std::invalid_argument("structured quad mesh: extent must have positive side lengths");

  Mesh m;
  m.dim = 2;
  m.kind = CellKind::Quad4;
  const double hx = (extent.x1 - extent.x0) / nx;
  const double hy = (extent.y1 - extent.y0) / ny;
  m.structured_h = std::max(hx, hy);

  m.nodes.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.push_back({extent.x0 + i * hx, extent.y0 + j * hy, 0.0});

  auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.cell_nodes.reserve(4 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.cell_nodes.push_back(node(i, j));
      m.cell_nodes.push_back(node(i + 1, j));
      m.cell_nodes.push_back(node(i + 1, j + 1));
      m.cell_nodes.push_back(node(i, j + 1));
    }

  auto cell = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j < ny; ++j) {
    m.boundary_faces.push_back({cell(0, j), {node(0, j + 1), node(0, j)}, 1});
    m.boundary_faces.push_back({cell(nx - 1, j), {node(nx, j), node(nx, j + 1)}, 2});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary_faces.push_back({cell(i, 0), {node(i, 0), node(i + 1, 0)}, 3});
    m.boundary_faces.push_back({cell(i, ny - 1), {node(i + 1, ny), node(i, ny)}, 4});
  }
  for (int t = 1; t <= 4; ++t) m.tags.push_back({t, 1, TagRole::OuterBoundary, ""});

  build_interior_faces(m);
  return m;
}

Mesh extrude_to_hex(const Mesh& base, int nz, double height) {
  if (base.kind != CellKind::Quad4) throw std::invalid_argument("extrude_to_hex: base mesh must be quad4");
  if (nz < 1) throw std::invalid_argument("extrude_to_hex: layer count must be >= 1");
  if (height <= 0) throw std::invalid_argument("extrude_to_hex: height must be positive");

  Mesh m;
  m.dim = 3;
  m.kind = CellKind::Hex8;
  const double hz = height / nz;
  m.structured_h = std::max(base.structured_h, hz);

  const int npl = base.node_count();
  m.nodes.reserve(static_cast<size_t>(npl) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int i = 0; i < npl; ++i)
      m.nodes.push_back({base.nodes[i][0], base.nodes[i][1], k * hz});

  const int ncells = base.cell_count();
  m.cell_nodes.reserve(static_cast<size_t>(8) * ncells * nz);
  for (int k = 0; k < nz; ++k)
    for (int c = 0; c < ncells; ++c)
      for (int layer = 0; layer < 2; ++layer)
        for (int a = 0; a < 4; ++a)
          m.cell_nodes.push_back(base.cell_node(c, a) + (k + layer) * npl);

  // Lateral faces inherit the base edge tags; 5 = bottom, 6 = top.
  for (int k = 0; k < nz; ++k)
    for (const BoundaryFace& bf : base.boundary_faces) {
      BoundaryFace f;
      f.cell = k * ncells + bf.cell;
      f.tag = bf.tag;
      f.nodes = {bf.nodes[0] + k * npl, bf.nodes[1] + k * npl, bf.nodes[1] + (k + 1) * npl,
                 bf.nodes[0] + (k + 1) * npl};
      m.boundary_faces.push_back(std::move(f));
    }
  for (int c = 0; c < ncells; ++c) {
    BoundaryFace bot;
    bot.cell = c;
    bot.tag = 5;
    bot.nodes = {base.cell_node(c, 0), base.cell_node(c, 3), base.cell_node(c, 2), base.cell_node(c, 1)};
    m.boundary_faces.push_back(std::move(bot));
    BoundaryFace top;
    top.cell = (nz - 1) * ncells + c;
    top.tag = 6;
    const int off = nz * npl;
    top.nodes = {base.cell_node(c, 0) + off, base.cell_node(c, 1) + off, base.cell_node(c, 2) + off,
                 base.cell_node(c, 3) + off};
    m.boundary_faces.push_back(std::move(top));
  }

  m.tags = base.tags;
  m.tags.push_back({5, 2, TagRole::OuterBoundary, ""});
  m.tags.push_back({6, 2, TagRole::OuterBoundary, ""});

  build_interior_faces(m);
  return m;
}

Vec3 face_centroid(const Mesh& mesh, const std::vector<int>& face_nodes) {
  Vec3 c = {0, 0, 0};
  for (int n : face_nodes) c = c + mesh.nodes[n];
  return (1.0 / face_nodes.size()) * c;
}

double face_area(const Mesh& mesh, const std::vector<int>& face_nodes) {
  if (face_nodes.size() == 2) return norm(mesh.nodes[face_nodes[1]] - mesh.nodes[face_nodes[0]]);
  // planar quad: split into two triangles
  const Vec3 a = mesh.nodes[face_nodes[0]], b = mesh.nodes[face_nodes[1]];
  const Vec3 c = mesh.nodes[face_nodes[2]], d = mesh.nodes[face_nodes[3]];
  return 0.5 * (norm(cross(b - a, c - a)) + norm(cross(c - a, d - a)));
}

Vec3 face_unit_normal(const Mesh& mesh, const std::vector<int>& face_nodes, const Vec3& owner_centroid) {
  Vec3 n;
  if (face_nodes.size() == 2) {
    const Vec3 t = mesh.nodes[face_nodes[1]] - mesh.nodes[face_nodes[0]];
    n = {t[1], -t[0], 0.0};
  } else {
    n = cross(mesh.nodes[face_nodes[2]] - mesh.nodes[face_nodes[0]],
              mesh.nodes[face_nodes[3]] - mesh.nodes[face_nodes[1]]);
  }
  const double len = norm(n);
  if (len == 0.0) throw std::runtime_error("degenerate face");
  n = (1.0 / len) * n;
  if (dot(n, face_centroid(mesh, face_nodes) - owner_centroid) < 0.0) n = -1.0 * n;
  return n;
}

void build_interior_faces(Mesh& mesh) {
  mesh.interior_faces.clear();
  const int npc = nodes_per_cell(mesh.kind);
  const int nfc = faces_per_cell(mesh.kind);
  const int npf = nodes_per_face(mesh.kind);

  for (int c = 0; c < mesh.cell_count(); ++c)
    for (int a = 0; a < npc; ++a)
      if (mesh.cell_node(c, a) < 0 || mesh.cell_node(c, a) >= mesh.node_count())
        throw std::runtime_error("cell references a nonexistent node");

  struct FaceUse {
    int cell;
    int local;
  };
  std::map<std::vector<int>, std::vector<FaceUse>> face_map;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    for (int f = 0; f < nfc; ++f) {
      const int* lf = local_face_nodes(mesh.kind, f);
      std::vector<int> key(npf);
      for (int a = 0; a < npf; ++a) key[a] = mesh.cell_node(c, lf[a]);
      std::sort(key.begin(), key.end());
      face_map[key].push_back({c, f});
    }
  }

  for (const auto& [key, uses] : face_map) {
    if (uses.size() > 2) throw std::runtime_error("non-conforming mesh: face shared by more than two cells");
    if (uses.size() != 2) continue;
    FaceUse left = uses[0], right = uses[1];
    if (left.cell > right.cell) std::swap(left, right);
    InteriorFace f;
    f.left_cell = left.cell;
    f.right_cell = right.cell;
    const int* lf = local_face_nodes(mesh.kind, left.local);
    f.nodes.resize(npf);
    for (int a = 0; a < npf; ++a) f.nodes[a] = mesh.cell_node(left.cell, lf[a]);
    f.normal = face_unit_normal(mesh, f.nodes, mesh.cell_centroid(left.cell));
    mesh.interior_faces.push_back(std::move(f));
  }
}

Mesh build_square_hole_tri_mesh(int n, double jitter) {
  if (n < 9 || n % 9 != 0) throw std::invalid_argument("square-hole mesh: n must be a positive multiple of 9");

  Mesh m;
  m.dim = 2;
  m.kind = CellKind::Tri3;
  const double h = 1.0 / n;
  const int hole_lo = n / 9 * 4, hole_hi = n / 9 * 5;

  auto on_hole_edge = [&](int i, int j) {
    const bool in_x = i >= hole_lo && i <= hole_hi, in_y = j >= hole_lo && j <= hole_hi;
    return (in_x && (j == hole_lo || j == hole_hi)) || (in_y && (i == hole_lo || i == hole_hi));
  };
  auto in_hole_interior = [&](int i, int j) {
    return i > hole_lo && i < hole_hi && j > hole_lo && j < hole_hi;
  };

  // Jitter from a splitmix-style integer hash so the file is reproducible.
  auto hash_unit = [](uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
    return (double)(x >> 11) / 9007199254740992.0 - 0.5;  // in [-0.5, 0.5)
  };

  std::vector<int> node_id(static_cast<size_t>(n + 1) * (n + 1), -1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      if (in_hole_interior(i, j)) continue;
      double x = i * h, y = j * h;
      const bool boundary = i == 0 || i == n || j == 0 || j == n || on_hole_edge(i, j);
      if (!boundary && jitter > 0.0) {
        const uint64_t key = static_cast<uint64_t>(j) * (n + 1) + i;
        x += jitter * h * hash_unit(2 * key);
        y += jitter * h * hash_unit(2 * key + 1);
      }
      node_id[static_cast<size_t>(j) * (n + 1) + i] = m.node_count();
      m.nodes.push_back({x, y, 0.0});
    }
  auto node = [&](int i, int j) { return node_id[static_cast<size_t>(j) * (n + 1) + i]; };

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i >= hole_lo && i < hole_hi && j >= hole_lo && j < hole_hi) continue;
      const int p00 = node(i, j), p10 = node(i + 1, j), p11 = node(i + 1, j + 1), p01 = node(i, j + 1);
      if ((i + j) % 2 == 0) {
        m.cell_nodes.insert(m.cell_nodes.end(), {p00, p10, p11});
        m.cell_nodes.insert(m.cell_nodes.end(), {p00, p11, p01});
      } else {
        m.cell_nodes.insert(m.cell_nodes.end(), {p00, p10, p01});
        m.cell_nodes.insert(m.cell_nodes.end(), {p10, p11, p01});
      }
    }

  // Boundary tags follow the benchmark geometry file: outer left 12, bottom 13,
  // right 14, top 15; hole top 16, right 17, bottom 18, left 19.
  std::map<std::pair<int, int>, int> edge_owner;
  for (int c = 0; c < m.cell_count(); ++c)
    for (int f = 0; f < 3; ++f) {
      const int* lf = local_face_nodes(CellKind::Tri3, f);
      int a = m.cell_node(c, lf[0]), b = m.cell_node(c, lf[1]);
      edge_owner[{std::min(a, b), std::max(a, b)}] = c;
    }
  auto add_edge = [&](int a, int b, int tag) {
    m.boundary_faces.push_back({edge_owner.at({std::min(a, b), std::max(a, b)}), {a, b}, tag});
  };
  for (int j = 0; j < n; ++j) {
    add_edge(node(0, j), node(0, j + 1), 12);
    add_edge(node(n, j), node(n, j + 1), 14);
  }
  for (int i = 0; i < n; ++i) {
    add_edge(node(i, 0), node(i + 1, 0), 13);
    add_edge(node(i, n), node(i + 1, n), 15);
  }
  for (int i = hole_lo; i < hole_hi; ++i) {
    add_edge(node(i, hole_hi), node(i + 1, hole_hi), 16);
    add_edge(node(i, hole_lo), node(i + 1, hole_lo), 18);
  }
  for (int j = hole_lo; j < hole_hi; ++j) {
    add_edge(node(hole_hi, j), node(hole_hi, j + 1), 17);
    add_edge(node(hole_lo, j), node(hole_lo, j + 1), 19);
  }
  for (int t = 12; t <= 15; ++t) m.tags.push_back({t, 1, TagRole::OuterBoundary, ""});
  for (int t = 16; t <= 19; ++t) m.tags.push_back({t, 1, TagRole::HoleBoundary, ""});
  m.tags.push_back({20, 2, TagRole::Volume, ""});

  build_interior_faces(m);
  return m;
}

}  // namespace vifem
