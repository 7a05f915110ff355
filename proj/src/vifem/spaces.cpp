#include "vifem/spaces.hpp"

#include <algorithm>
#include <set>

namespace vifem {

FunctionSpace make_space(const Mesh& mesh, SpaceKind kind) {
  FunctionSpace s;
  s.mesh = &mesh;
  s.kind = kind;
  s.dof_count = kind == SpaceKind::CG1 ? mesh.node_count() : mesh.cell_count() * nodes_per_cell(mesh.kind);
  return s;
}

std::vector<ConstrainedDof> boundary_dofs(const FunctionSpace& space, const std::vector<int>& tags) {
  const Mesh& mesh = *space.mesh;
  const std::set<int> tag_set(tags.begin(), tags.end());
  const int npc = nodes_per_cell(mesh.kind);

  std::set<std::pair<int, int>> seen;  // (dof, cell) pairs for DG, (dof, -1) for CG
  std::vector<ConstrainedDof> out;
  for (const BoundaryFace& bf : mesh.boundary_faces) {
    if (!tag_set.count(bf.tag)) continue;
    for (int n : bf.nodes) {
      if (space.kind == SpaceKind::CG1) {
        if (seen.insert({n, -1}).second) out.push_back({n, bf.cell, mesh.nodes[n]});
      } else {
        for (int a = 0; a < npc; ++a)
          if (mesh.cell_node(bf.cell, a) == n) {
            const int dof = space.cell_dof(bf.cell, a);
            if (seen.insert({dof, bf.cell}).second) out.push_back({dof, bf.cell, mesh.nodes[n]});
          }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ConstrainedDof& a, const ConstrainedDof& b) { return a.dof < b.dof; });
  return out;
}

}  // namespace vifem
