#pragma once

#include <functional>
#include <memory>
#include <span>

#include "vifem/geometry.hpp"
#include "vifem/mesh.hpp"

namespace vifem {

// Evaluation context handed to coefficient callbacks. `cell` and `ref` let a
// field reconstruct itself from nodal samples; purely pointwise fields only
// look at `x`.
struct EvalPoint {
  Vec3 x = {0, 0, 0};
  int cell = -1;
  Vec3 ref = {0, 0, 0};
};

using ScalarField = std::function<double(const EvalPoint&)>;

struct VectorField {
  std::function<Vec3(const EvalPoint&)> value;
  // Spatial gradient (row r = component, col c = d/dx_c); optional.
  std::function<Mat3(const EvalPoint&)> gradient;
  explicit operator bool() const { return static_cast<bool>(value); }
};

struct DiffusivityField {
  std::function<Mat3(const EvalPoint&)> value;
  // Row-wise divergence div[D]_i = sum_j dD_ij/dx_j; optional, used by the
  // stabilized residual term when requested.
  std::function<Vec3(const EvalPoint&)> divergence;
};

ScalarField constant_field(double v);
DiffusivityField isotropic_diffusivity(double d);

// Heterogeneous anisotropic tensor of the 2D diffusion benchmark.
DiffusivityField lepotier_diffusivity(double eps = 1e-4);

// D = (alphaD + alphaT |v|) I + (alphaL - alphaT) v (x) v / |v|.
// Below `velocity_floor` on |v| the tensor falls back to alphaD I.
Mat3 dispersion_tensor(const Vec3& v, double alpha_l, double alpha_t, double alpha_d, int dim,
                       double velocity_floor = 1e-12);

DiffusivityField dispersion_field(const VectorField& velocity, double alpha_l, double alpha_t, double alpha_d,
                                  int dim, double velocity_floor = 1e-12);

// Benchmark velocity fields (pointwise formulas).
Vec3 abc_velocity(const Vec3& x);
Mat3 abc_velocity_gradient(const Vec3& x);
Vec3 vortex_velocity_2d(const Vec3& x);
Mat3 vortex_velocity_2d_gradient(const Vec3& x);

VectorField abc_velocity_field();
VectorField vortex_velocity_field();

// First-order nodal interpolant of an analytic vector field: values are
// sampled at the mesh nodes and re-evaluated through the cell shape
// functions, matching the behaviour of interpolated coefficient fields in
// the reference runs.
VectorField nodal_interpolant(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f);
ScalarField nodal_scalar_interpolant(const Mesh& mesh, const std::function<double(const Vec3&)>& f);

// Benchmark sources. The 3D forcing sums eight closed unit-strength boxes;
// the 2D source is a single box indicator.
double point_source_forcing_3d(const Vec3& x);
struct Box2 {
  double x0, x1, y0, y1;
};
double box_source_2d(const Vec3& x, const Box2& box);
ScalarField point_source_field_3d();
ScalarField box_source_field_2d(const Box2& box);

struct FieldStats {
  double min_value = 0.0;
  double max_value = 0.0;
  long violating_dofs = 0;
  long total_dofs = 0;
};

// Counts entries strictly below cmin or strictly above cmax.
FieldStats field_stats(std::span<const double> values, double cmin, double cmax);

}  // namespace vifem
