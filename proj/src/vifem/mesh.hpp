#pragma once

#include <string>
#include <vector>

#include "vifem/geometry.hpp"

namespace vifem {

enum class CellKind { Tri3, Quad4, Hex8 };

int nodes_per_cell(CellKind kind);
int faces_per_cell(CellKind kind);
int nodes_per_face(CellKind kind);

// Local face connectivity, ordered so the implied normal points out of the
// cell (right-hand rule in 3D, left-to-right traversal in 2D).
const int* local_face_nodes(CellKind kind, int face);

struct BoundaryFace {
  int cell = -1;
  std::vector<int> nodes;
  int tag = 0;
};

struct InteriorFace {
  int left_cell = -1;   // smaller cell index; owns the stored normal
  int right_cell = -1;
  std::vector<int> nodes;
  Vec3 normal = {0, 0, 0};  // unit outward normal of left_cell
};

enum class TagRole { OuterBoundary, HoleBoundary, Volume };

struct PhysicalTag {
  int id = 0;
  int dim = 0;
  TagRole role = TagRole::Volume;
  std::string name;
};

struct Mesh {
  int dim = 2;
  CellKind kind = CellKind::Quad4;
  std::vector<Vec3> nodes;
  std::vector<int> cell_nodes;  // flattened, nodes_per_cell(kind) per cell
  std::vector<BoundaryFace> boundary_faces;
  std::vector<InteriorFace> interior_faces;
  std::vector<PhysicalTag> tags;

  // Structured meshes record their grid spacing; 0 means unstructured.
  double structured_h = 0.0;

  int cell_count() const { return static_cast<int>(cell_nodes.size()) / nodes_per_cell(kind); }
  int node_count() const { return static_cast<int>(nodes.size()); }
  int cell_node(int cell, int local) const { return cell_nodes[cell * nodes_per_cell(kind) + local]; }

  Vec3 cell_centroid(int cell) const;
  double cell_diameter(int cell) const;
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

// Structured quadrilateral grid, nodes numbered lexicographically (x fastest).
// Boundary tags: 1 left, 2 right, 3 bottom, 4 top.
Mesh build_structured_quad_mesh(int nx, int ny, const Rect& extent = {});

// Extrudes a quad mesh into nz layers of hexahedra. Lateral faces keep the
// base tags; bottom is tagged 5 and top 6.
Mesh extrude_to_hex(const Mesh& base, int nz, double height);

// Fills mesh.interior_faces from cell connectivity. Throws on non-conforming
// input (a face shared by more than two cells).
void build_interior_faces(Mesh& mesh);

Vec3 face_centroid(const Mesh& mesh, const std::vector<int>& face_nodes);
double face_area(const Mesh& mesh, const std::vector<int>& face_nodes);
Vec3 face_unit_normal(const Mesh& mesh, const std::vector<int>& face_nodes, const Vec3& owner_centroid);

// Triangulation of the unit square with a [4/9,5/9]^2 hole, written in the
// benchmark's tag convention (outer 12..15, hole 16..19, surface 20). n must
// be divisible by 9; interior nodes are jittered deterministically to break
// the structured symmetry.
Mesh build_square_hole_tri_mesh(int n, double jitter = 0.2);

}  // namespace vifem
