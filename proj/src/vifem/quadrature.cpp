#include "vifem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace vifem {

std::vector<QuadPoint> gauss_1d(int n) {
  // abscissas on [-1,1], mapped to [0,1]
  std::vector<double> x, w;
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2:
      x = {-0.5773502691896257645, 0.5773502691896257645};
      w = {1.0, 1.0};
      break;
    case 3:
      x = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4:
      x = {-0.8611363115940525752, -0.3399810435848562648, 0.3399810435848562648, 0.8611363115940525752};
      w = {0.3478548451374538574, 0.6521451548625461426, 0.6521451548625461426, 0.3478548451374538574};
      break;
    case 5:
      x = {-0.9061798459386639928, -0.5384693101056830910, 0.0, 0.5384693101056830910,
           0.9061798459386639928};
      w = {0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889, 0.4786286704993664680,
           0.2369268850561890875};
      break;
    default: throw std::invalid_argument("gauss_1d: unsupported point count");
  }
  std::vector<QuadPoint> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = {{0.5 * (x[i] + 1.0), 0, 0}, 0.5 * w[i]};
  return pts;
}

std::vector<QuadPoint> triangle_quadrature() {
  const double a = 1.0 / 6.0, b = 2.0 / 3.0;
  return {{{a, a, 0}, 1.0 / 6.0}, {{b, a, 0}, 1.0 / 6.0}, {{a, b, 0}, 1.0 / 6.0}};
}

std::vector<QuadPoint> cell_quadrature(CellKind kind, int points_per_dir) {
  if (kind == CellKind::Tri3) return triangle_quadrature();
  const auto line = gauss_1d(points_per_dir);
  std::vector<QuadPoint> pts;
  if (kind == CellKind::Quad4) {
    for (const auto& qy : line)
      for (const auto& qx : line) pts.push_back({{qx.ref[0], qy.ref[0], 0}, qx.weight * qy.weight});
  } else {
    for (const auto& qz : line)
      for (const auto& qy : line)
        for (const auto& qx : line)
          pts.push_back({{qx.ref[0], qy.ref[0], qz.ref[0]}, qx.weight * qy.weight * qz.weight});
  }
  return pts;
}

}  // namespace vifem
