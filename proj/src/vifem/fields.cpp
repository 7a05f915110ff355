#include "vifem/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "vifem/elements.hpp"

namespace vifem {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ScalarField constant_field(double v) {
  return [v](const EvalPoint&) { return v; };
}

DiffusivityField isotropic_diffusivity(double d) {
  DiffusivityField f;
  f.value = [d](const EvalPoint&) {
    Mat3 m = zero_mat3();
    m[0][0] = m[1][1] = m[2][2] = d;
    return m;
  };
  f.divergence = [](const EvalPoint&) { return Vec3{0, 0, 0}; };
  return f;
}

DiffusivityField lepotier_diffusivity(double eps) {
  DiffusivityField f;
  f.value = [eps](const EvalPoint& p) {
    const double x = p.x[0], y = p.x[1];
    Mat3 m = zero_mat3();
    m[0][0] = y * y + eps * x * x;
    m[0][1] = m[1][0] = -(1.0 - eps) * x * y;
    m[1][1] = x * x + eps * y * y;
    m[2][2] = 1.0;
    return m;
  };
  f.divergence = [eps](const EvalPoint& p) {
    const double x = p.x[0], y = p.x[1];
    return Vec3{2.0 * eps * x - (1.0 - eps) * x, -(1.0 - eps) * y + 2.0 * eps * y, 0.0};
  };
  return f;
}

Mat3 dispersion_tensor(const Vec3& v, double alpha_l, double alpha_t, double alpha_d, int dim,
                       double velocity_floor) {
  if (alpha_l < 0 || alpha_t < 0 || alpha_d < 0)
    throw std::invalid_argument("dispersion_tensor: dispersivities must be non-negative");
  Mat3 m = zero_mat3();
  const double s = norm(v);
  if (s < velocity_floor) {
    for (int i = 0; i < dim; ++i) m[i][i] = alpha_d;
  } else {
    const double iso = alpha_d + alpha_t * s;
    const double aniso = (alpha_l - alpha_t) / s;
    for (int i = 0; i < dim; ++i) {
      m[i][i] = iso;
      for (int j = 0; j < dim; ++j) m[i][j] += aniso * (v[i] * v[j]);
    }
  }
  for (int i = dim; i < 3; ++i) m[i][i] = 1.0;
  return m;
}

DiffusivityField dispersion_field(const VectorField& velocity, double alpha_l, double alpha_t, double alpha_d,
                                  int dim, double velocity_floor) {
  DiffusivityField f;
  auto vel = velocity.value;
  f.value = [=](const EvalPoint& p) { return dispersion_tensor(vel(p), alpha_l, alpha_t, alpha_d, dim, velocity_floor); };
  if (velocity.gradient) {
    auto grad = velocity.gradient;
    f.divergence = [=](const EvalPoint& p) {
      const Vec3 v = vel(p);
      const double s = norm(v);
      if (s < velocity_floor) return Vec3{0, 0, 0};
      const Mat3 g = grad(p);
      Vec3 ds = {0, 0, 0};  // ds/dx_c = (v . dv/dx_c) / s
      for (int c = 0; c < dim; ++c) {
        double t = 0.0;
        for (int k = 0; k < dim; ++k) t += v[k] * g[k][c];
        ds[c] = t / s;
      }
      double trg = 0.0, vds = 0.0;
      for (int j = 0; j < dim; ++j) {
        trg += g[j][j];
        vds += v[j] * ds[j];
      }
      Vec3 out = {0, 0, 0};
      for (int i = 0; i < dim; ++i) {
        double gv = 0.0;
        for (int j = 0; j < dim; ++j) gv += g[i][j] * v[j];
        out[i] = alpha_t * ds[i] + (alpha_l - alpha_t) * ((gv + v[i] * trg) / s - v[i] * vds / (s * s));
      }
      return out;
    };
  }
  return f;
}

Vec3 abc_velocity(const Vec3& p) {
  const double x = p[0], y = p[1], z = p[2];
  return {0.3 * std::sin(2 * kPi * z) + std::cos(3 * kPi * y),
          0.65 * std::sin(2 * kPi * x) + 0.3 * std::cos(5 * kPi * z),
          std::sin(4 * kPi * y) + 0.65 * std::cos(6 * kPi * x)};
}

Mat3 abc_velocity_gradient(const Vec3& p) {
  const double x = p[0], y = p[1], z = p[2];
  Mat3 g = zero_mat3();
  g[0][1] = -3 * kPi * std::sin(3 * kPi * y);
  g[0][2] = 0.6 * kPi * std::cos(2 * kPi * z);
  g[1][0] = 1.3 * kPi * std::cos(2 * kPi * x);
  g[1][2] = -1.5 * kPi * std::sin(5 * kPi * z);
  g[2][0] = -3.9 * kPi * std::sin(6 * kPi * x);
  g[2][1] = 4 * kPi * std::cos(4 * kPi * y);
  return g;
}

Vec3 vortex_velocity_2d(const Vec3& p) {
  const double x = p[0], y = p[1];
  return {std::cos(2 * kPi * y * y), std::sin(2 * kPi * x) + std::cos(2 * kPi * x * x), 0.0};
}

Mat3 vortex_velocity_2d_gradient(const Vec3& p) {
  const double x = p[0], y = p[1];
  Mat3 g = zero_mat3();
  g[0][1] = -4 * kPi * y * std::sin(2 * kPi * y * y);
  g[1][0] = 2 * kPi * std::cos(2 * kPi * x) - 4 * kPi * x * std::sin(2 * kPi * x * x);
  return g;
}

VectorField abc_velocity_field() {
  VectorField f;
  f.value = [](const EvalPoint& p) { return abc_velocity(p.x); };
  f.gradient = [](const EvalPoint& p) { return abc_velocity_gradient(p.x); };
  return f;
}

VectorField vortex_velocity_field() {
  VectorField f;
  f.value = [](const EvalPoint& p) { return vortex_velocity_2d(p.x); };
  f.gradient = [](const EvalPoint& p) { return vortex_velocity_2d_gradient(p.x); };
  return f;
}

VectorField nodal_interpolant(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f) {
  auto values = std::make_shared<std::vector<Vec3>>();
  values->reserve(mesh.node_count());
  for (const Vec3& p : mesh.nodes) values->push_back(f(p));

  const Mesh* m = &mesh;
  VectorField out;
  out.value = [m, values](const EvalPoint& p) {
    double n[kMaxCellNodes];
    shape_values(m->kind, p.ref, n);
    Vec3 v = {0, 0, 0};
    for (int a = 0; a < nodes_per_cell(m->kind); ++a) v = v + n[a] * (*values)[m->cell_node(p.cell, a)];
    return v;
  };
  out.gradient = [m, values](const EvalPoint& p) {
    const MappedPoint mp = map_point(*m, p.cell, p.ref);
    Mat3 g = zero_mat3();
    for (int a = 0; a < nodes_per_cell(m->kind); ++a) {
      const Vec3& va = (*values)[m->cell_node(p.cell, a)];
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) g[r][c] += va[r] * mp.grad[a][c];
    }
    return g;
  };
  return out;
}

ScalarField nodal_scalar_interpolant(const Mesh& mesh, const std::function<double(const Vec3&)>& f) {
  auto values = std::make_shared<std::vector<double>>();
  values->reserve(mesh.node_count());
  for (const Vec3& p : mesh.nodes) values->push_back(f(p));
  const Mesh* m = &mesh;
  return [m, values](const EvalPoint& p) {
    double n[kMaxCellNodes];
    shape_values(m->kind, p.ref, n);
    double v = 0.0;
    for (int a = 0; a < nodes_per_cell(m->kind); ++a) v += n[a] * (*values)[m->cell_node(p.cell, a)];
    return v;
  };
}

double point_source_forcing_3d(const Vec3& p) {
  static const double boxes[8][6] = {
      {0.4, 0.5, 0.2, 0.3, 0.1, 0.2}, {0.8, 0.9, 0.4, 0.5, 0.2, 0.3}, {0.5, 0.6, 0.7, 0.8, 0.3, 0.4},
      {0.3, 0.4, 0.5, 0.6, 0.2, 0.3}, {0.5, 0.6, 0.2, 0.3, 0.6, 0.7}, {0.6, 0.7, 0.5, 0.6, 0.7, 0.8},
      {0.4, 0.5, 0.7, 0.8, 0.8, 0.9}, {0.1, 0.2, 0.4, 0.5, 0.7, 0.8}};
  double f = 0.0;
  for (const double* b : boxes)
    if (p[0] >= b[0] && p[0] <= b[1] && p[1] >= b[2] && p[1] <= b[3] && p[2] >= b[4] && p[2] <= b[5]) f += 1.0;
  return f;
}

double box_source_2d(const Vec3& p, const Box2& box) {
  return (p[0] >= box.x0 && p[0] <= box.x1 && p[1] >= box.y0 && p[1] <= box.y1) ? 1.0 : 0.0;
}

ScalarField point_source_field_3d() {
  return [](const EvalPoint& p) { return point_source_forcing_3d(p.x); };
}

ScalarField box_source_field_2d(const Box2& box) {
  return [box](const EvalPoint& p) { return box_source_2d(p.x, box); };
}

FieldStats field_stats(std::span<const double> values, double cmin, double cmax) {
  FieldStats s;
  s.total_dofs = static_cast<long>(values.size());
  if (values.empty()) return s;
  s.min_value = values[0];
  s.max_value = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("field_stats: non-finite value");
    s.min_value = std::min(s.min_value, v);
    s.max_value = std::max(s.max_value, v);
    if (v < cmin || v > cmax) ++s.violating_dofs;
  }
  return s;
}

}  // namespace vifem
