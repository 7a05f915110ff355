#pragma once

#include <vector>

#include "vifem/geometry.hpp"
#include "vifem/mesh.hpp"

namespace vifem {

struct QuadPoint {
  Vec3 ref = {0, 0, 0};
  double weight = 0.0;
};

// Gauss-Legendre points on [0,1]; exact for polynomials of degree 2n-1.
std::vector<QuadPoint> gauss_1d(int n);

// Tensor-product rule on the reference square/cube, n points per direction.
std::vector<QuadPoint> cell_quadrature(CellKind kind, int points_per_dir);

// Degree-2 rule on the reference triangle (weights sum to 1/2).
std::vector<QuadPoint> triangle_quadrature();

}  // namespace vifem
