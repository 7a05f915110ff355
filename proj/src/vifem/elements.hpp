#pragma once

#include <vector>

#include "vifem/geometry.hpp"
#include "vifem/mesh.hpp"

namespace vifem {

constexpr int kMaxCellNodes = 8;

// Shape function values/derivatives of the linear (tri) and bi/trilinear
// (quad/hex) Lagrange elements at a reference point.
void shape_values(CellKind kind, const Vec3& ref, double n[kMaxCellNodes]);
void shape_gradients(CellKind kind, const Vec3& ref, Vec3 dn[kMaxCellNodes]);
// Reference-space Hessians; only the entries that can be nonzero for the
// nodal basis (all zero for tri3).
void shape_hessians(CellKind kind, const Vec3& ref, Mat3 h[kMaxCellNodes]);

// Geometry evaluation for one cell at one reference point.
struct MappedPoint {
  Vec3 x = {0, 0, 0};
  double detj = 0.0;
  double shape[kMaxCellNodes] = {};
  Vec3 grad[kMaxCellNodes] = {};   // physical gradients
  Mat3 jac_inv = {};               // J^{-1}, padded with identity in unused dims
};

MappedPoint map_point(const Mesh& mesh, int cell, const Vec3& ref);

// Physical Hessians of the shape functions under the affine part of the map:
// H_x = J^{-T} H_ref J^{-1}. Exact for simplices and axis-aligned boxes.
void physical_hessians(const Mesh& mesh, CellKind kind, const MappedPoint& mp, const Vec3& ref,
                       Mat3 h[kMaxCellNodes]);

// Inverse of the geometric map by Newton iteration (exact in one step for
// affine cells).
Vec3 inverse_map(const Mesh& mesh, int cell, const Vec3& x);

}  // namespace vifem
