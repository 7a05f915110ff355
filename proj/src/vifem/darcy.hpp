#pragma once

#include <functional>
#include <vector>

#include "vifem/csr.hpp"
#include "vifem/fields.hpp"
#include "vifem/krylov.hpp"
#include "vifem/mesh.hpp"

namespace vifem {

// Face-based velocity dofs of the lowest-order Raviart-Thomas space on
// axis-aligned quads/hexes. The dof is the (constant) normal velocity on the
// face; the global face normal points along the positive axis, i.e. from the
// lower to the higher cell index for structured numbering.
struct DarcyFaceDofs {
  struct Face {
    int axis;            // 0/1/2
    double area;
    Vec3 centroid;
    int cell_minus = -1;  // cell on the negative-axis side (face is its + side)
    int cell_plus = -1;
    int tag = 0;          // boundary tag when one side is missing
  };
  std::vector<Face> faces;
  // per cell: dof index of the lower/upper face per axis
  std::vector<std::array<int, 6>> cell_faces;
  int count() const { return static_cast<int>(faces.size()); }
};

struct DarcyFields {
  ScalarField permeability;   // m^2, > 0
  ScalarField viscosity;      // Pa s, > 0
  double density = 0.0;       // kg/m^3
  Vec3 body_force = {0, 0, 0};  // m/s^2
  std::vector<int> pressure_tags;       // natural pressure boundary
  ScalarField pressure_value;           // p^p on those tags
  std::vector<int> normal_velocity_tags;  // strongly imposed v.n
  ScalarField normal_velocity_value;
};

struct DarcyBlockSystem {
  CsrMatrix k_vv;  // weighted velocity mass
  CsrMatrix k_vp;  // -(div w, p)
  CsrMatrix k_pv;  // -(q, div v)
  std::vector<double> f_v;
  std::vector<double> f_p;
  DarcyFaceDofs dofs;
  const Mesh* mesh = nullptr;
  std::vector<int> constrained_velocity_dofs;
  std::vector<double> constrained_velocity_values;

  int n_velocity() const { return k_vv.nrows; }
  int n_pressure() const { return k_pv.nrows; }
};

DarcyFaceDofs build_darcy_face_dofs(const Mesh& mesh);

DarcyBlockSystem assemble_rt0_darcy(const Mesh& mesh, const DarcyFields& fields);

struct DarcySolveOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-50;
  int max_iters = 5000;
  int restart = 50;
  bool use_schur_preconditioner = true;
  double inner_schur_rel_tol = 1e-2;  // CG tolerance on the lumped Schur complement
};

struct DarcySolution {
  std::vector<double> velocity;  // face normal velocities
  std::vector<double> pressure;  // per-cell
  SolveReport report;
};

// Outer flexible GMRES on the full block system; the preconditioner is the
// full Schur factorization with one ILU(0) sweep on K_vv and ILU(0)-CG on
// S_p = -K_pv diag(K_vv)^{-1} K_vp. x0 (velocity dofs then pressures) seeds
// the outer iteration when given.
DarcySolution solve_darcy_schur(const DarcyBlockSystem& sys, const DarcySolveOptions& opts = {},
                                std::span<const double> x0 = {});

// Integral of div v over each cell via signed face fluxes.
std::vector<double> cell_divergence(std::span<const double> velocity, const DarcyBlockSystem& sys);

// Cell-average velocity vector reconstructed from the face dofs.
std::vector<Vec3> cell_velocity(std::span<const double> velocity, const DarcyBlockSystem& sys);

}  // namespace vifem
