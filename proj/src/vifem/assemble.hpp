#pragma once

#include <optional>
#include <vector>

#include "vifem/csr.hpp"
#include "vifem/fields.hpp"
#include "vifem/spaces.hpp"

namespace vifem {

struct DirichletBC {
  std::vector<int> tags;
  ScalarField value;
};

struct AssembledSystem {
  CsrMatrix k;
  std::vector<double> rhs;
  FunctionSpace space;
  std::vector<int> constrained_dofs;
  std::vector<double> constrained_values;
};

struct AssemblyOptions {
  // Gauss points per direction on quads/hexes (triangles use the fixed
  // degree-2 rule); face rule is one point richer for the DG penalty terms.
  int volume_quad_pts = 2;
  int face_quad_pts = 3;
};

struct SupgOptions {
  AssemblyOptions quad;
  double velocity_floor = 1e-12;
  bool stabilization = true;
  // Include the div[D] grad(c) part of div[D grad c] in the residual term.
  // Requires the diffusivity to provide a divergence evaluator.
  bool coefficient_divergence = false;
  double h_override = 0.0;  // 0: structured spacing if present, else cell diameter
};

struct DgOptions {
  AssemblyOptions quad;
  int epsilon = -1;      // -1 symmetric, 0 incomplete, +1 non-symmetric
  double gamma = 0.0;    // 0: 2(d+1)/d
  double h_override = 0.0;
  bool swap_face_sides = false;  // test hook: reverse the +/- convention
  double velocity_floor = 1e-12;
};

// Symmetric elimination with lifting: rhs -= K g, constrained rows and
// columns are zeroed with a unit diagonal, rhs_i = g_i.
void apply_dirichlet(CsrMatrix& k, std::vector<double>& rhs, const std::vector<int>& dofs,
                     const std::vector<double>& values);

AssembledSystem assemble_galerkin_diffusion(const FunctionSpace& space, const DiffusivityField& d,
                                            const ScalarField& f, const std::vector<DirichletBC>& bcs,
                                            const AssemblyOptions& opts = {});

// SUPG-stabilized advection-diffusion; with `stabilization` off this is the
// plain Galerkin advection-diffusion operator.
AssembledSystem assemble_supg(const FunctionSpace& space, const DiffusivityField& d, const VectorField& v,
                              const ScalarField& f, const std::vector<DirichletBC>& bcs,
                              const SupgOptions& opts = {});

// Interior-penalty DG; pass an empty velocity for pure diffusion. Dirichlet
// values are imposed strongly on boundary-face dofs.
AssembledSystem assemble_dg(const FunctionSpace& space, const DiffusivityField& d,
                            const std::optional<VectorField>& v, const ScalarField& f,
                            const std::vector<DirichletBC>& bcs, const DgOptions& opts = {});

// DG mass matrix (block diagonal, no boundary conditions).
CsrMatrix assemble_dg_mass(const FunctionSpace& space, const AssemblyOptions& opts = {});

// Variants of assemble_dg that leave the system raw (no Dirichlet
// elimination); used by the transient driver to combine with a mass term
// before applying boundary conditions.
struct RawSystem {
  CsrMatrix k;
  std::vector<double> rhs;
};
RawSystem assemble_dg_raw(const FunctionSpace& space, const DiffusivityField& d,
                          const std::optional<VectorField>& v, const ScalarField& f, const DgOptions& opts = {});

std::vector<ConstrainedDof> collect_bc_dofs(const FunctionSpace& space, const std::vector<DirichletBC>& bcs,
                                            std::vector<double>* values);

}  // namespace vifem
