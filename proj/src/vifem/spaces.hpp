#pragma once

#include <vector>

#include "vifem/mesh.hpp"

namespace vifem {

enum class SpaceKind { CG1, DG1 };

// Nodal first-order space: CG1 shares dofs at mesh nodes, DG1 keeps an
// independent copy per cell.
struct FunctionSpace {
  const Mesh* mesh = nullptr;
  SpaceKind kind = SpaceKind::CG1;
  int dof_count = 0;

  int dofs_per_cell() const { return nodes_per_cell(mesh->kind); }
  int cell_dof(int cell, int local) const {
    return kind == SpaceKind::CG1 ? mesh->cell_node(cell, local) : cell * dofs_per_cell() + local;
  }
};

FunctionSpace make_space(const Mesh& mesh, SpaceKind kind);

// Dofs constrained by Dirichlet data on the given boundary tags, with the dof
// coordinates needed to evaluate the prescribed value.
struct ConstrainedDof {
  int dof;
  int cell;
  Vec3 x;
};
std::vector<ConstrainedDof> boundary_dofs(const FunctionSpace& space, const std::vector<int>& tags);

}  // namespace vifem
