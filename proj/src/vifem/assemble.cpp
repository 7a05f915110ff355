#include "vifem/assemble.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "vifem/elements.hpp"
#include "vifem/quadrature.hpp"

namespace vifem {

namespace {

double face_h(const Mesh& mesh, int left, int right, double h_override) {
  if (h_override > 0) return h_override;
  if (mesh.structured_h > 0) return mesh.structured_h;
  return 0.5 * (mesh.cell_diameter(left) + mesh.cell_diameter(right));
}

double cell_h(const Mesh& mesh, int cell, double h_override) {
  if (h_override > 0) return h_override;
  if (mesh.structured_h > 0) return mesh.structured_h;
  return mesh.cell_diameter(cell);
}

// Quadrature points on a stored face (2-node segment or 4-node bilinear
// patch): physical position and surface measure times weight.
struct FaceQuadPoint {
  Vec3 x;
  double wds;
};

std::vector<FaceQuadPoint> face_quadrature(const Mesh& mesh, const std::vector<int>& fnodes, int pts_per_dir) {
  std::vector<FaceQuadPoint> out;
  const auto line = gauss_1d(pts_per_dir);
  if (fnodes.size() == 2) {
    const Vec3 a = mesh.nodes[fnodes[0]], b = mesh.nodes[fnodes[1]];
    const double len = norm(b - a);
    for (const auto& q : line) out.push_back({a + q.ref[0] * (b - a), q.weight * len});
  } else {
    const Vec3 p0 = mesh.nodes[fnodes[0]], p1 = mesh.nodes[fnodes[1]], p2 = mesh.nodes[fnodes[2]],
               p3 = mesh.nodes[fnodes[3]];
    for (const auto& qu : line)
      for (const auto& qv : line) {
        const double u = qu.ref[0], v = qv.ref[0];
        const Vec3 x = ((1 - u) * (1 - v)) * p0 + (u * (1 - v)) * p1 + (u * v) * p2 + ((1 - u) * v) * p3;
        const Vec3 xu = (-(1 - v)) * p0 + ((1 - v)) * p1 + v * p2 + (-v) * p3;
        const Vec3 xv = (-(1 - u)) * p0 + (-u) * p1 + u * p2 + ((1 - u)) * p3;
        out.push_back({x, qu.weight * qv.weight * norm(cross(xu, xv))});
      }
  }
  return out;
}

struct ElementBuffers {
  double ke[kMaxCellNodes * kMaxCellNodes];
  double fe[kMaxCellNodes];
  void clear(int n) {
    for (int i = 0; i < n * n; ++i) ke[i] = 0.0;
    for (int i = 0; i < n; ++i) fe[i] = 0.0;
  }
};

void scatter(CooBuilder& kb, std::vector<double>& rhs, const FunctionSpace& space, int cell,
             const ElementBuffers& buf) {
  const int npc = space.dofs_per_cell();
  for (int a = 0; a < npc; ++a) {
    const int ga = space.cell_dof(cell, a);
    rhs[ga] += buf.fe[a];
    for (int b = 0; b < npc; ++b) kb.add(ga, space.cell_dof(cell, b), buf.ke[a * npc + b]);
  }
}

void add_zero_diagonal(CooBuilder& kb, int n) {
  for (int i = 0; i < n; ++i) kb.add(i, i, 0.0);
}

}  // namespace

std::vector<ConstrainedDof> collect_bc_dofs(const FunctionSpace& space, const std::vector<DirichletBC>& bcs,
                                            std::vector<double>* values) {
  std::map<int, std::pair<ConstrainedDof, double>> merged;
  for (const DirichletBC& bc : bcs)
    for (const ConstrainedDof& cd : boundary_dofs(space, bc.tags)) {
      EvalPoint p{cd.x, cd.cell, {0, 0, 0}};
      merged[cd.dof] = {cd, bc.value(p)};
    }
  std::vector<ConstrainedDof> out;
  if (values) values->clear();
  for (const auto& [dof, entry] : merged) {
    out.push_back(entry.first);
    if (values) values->push_back(entry.second);
  }
  return out;
}

void apply_dirichlet(CsrMatrix& k, std::vector<double>& rhs, const std::vector<int>& dofs,
                     const std::vector<double>& values) {
  const int n = k.nrows;
  std::vector<char> constrained(n, 0);
  std::vector<double> g(n, 0.0);
  for (size_t i = 0; i < dofs.size(); ++i) {
    constrained[dofs[i]] = 1;
    g[dofs[i]] = values[i];
  }
  // lifting: move prescribed-column contributions to the right-hand side
  std::vector<double> kg = spmv(k, g);
  for (int i = 0; i < n; ++i)
    if (!constrained[i]) rhs[i] -= kg[i];
  for (int i = 0; i < n; ++i) {
    for (int p = k.row_offsets[i]; p < k.row_offsets[i + 1]; ++p) {
      const int j = k.col_indices[p];
      if (constrained[i]) k.values[p] = (i == j) ? 1.0 : 0.0;
      else if (constrained[j]) k.values[p] = 0.0;
    }
    if (constrained[i]) rhs[i] = g[i];
  }
}

namespace {

AssembledSystem finish_system(CooBuilder& kb, std::vector<double>& rhs, const FunctionSpace& space,
                              const std::vector<DirichletBC>& bcs) {
  AssembledSystem sys;
  sys.space = space;
  sys.k = kb.to_csr();
  sys.rhs = std::move(rhs);
  std::vector<double> vals;
  const auto dofs = collect_bc_dofs(space, bcs, &vals);
  sys.constrained_dofs.reserve(dofs.size());
  for (const auto& cd : dofs) sys.constrained_dofs.push_back(cd.dof);
  sys.constrained_values = std::move(vals);
  apply_dirichlet(sys.k, sys.rhs, sys.constrained_dofs, sys.constrained_values);
  return sys;
}

}  // namespace

AssembledSystem assemble_galerkin_diffusion(const FunctionSpace& space, const DiffusivityField& d,
                                            const ScalarField& f, const std::vector<DirichletBC>& bcs,
                                            const AssemblyOptions& opts) {
  const Mesh& mesh = *space.mesh;
  const int npc = space.dofs_per_cell();
  const auto quad = cell_quadrature(mesh.kind, opts.volume_quad_pts);

  CooBuilder kb(space.dof_count, space.dof_count);
  kb.reserve(static_cast<size_t>(npc) * npc * mesh.cell_count() + space.dof_count);
  std::vector<double> rhs(space.dof_count, 0.0);
  ElementBuffers buf;

  for (int c = 0; c < mesh.cell_count(); ++c) {
    buf.clear(npc);
    try {
      for (const QuadPoint& q : quad) {
        const MappedPoint mp = map_point(mesh, c, q.ref);
        const EvalPoint ep{mp.x, c, q.ref};
        const Mat3 dq = d.value(ep);
        const double fq = f(ep);
        const double w = q.weight * mp.detj;
        for (int a = 0; a < npc; ++a) {
          const Vec3 dga = matvec(dq, mp.grad[a]);
          for (int b = 0; b < npc; ++b) buf.ke[a * npc + b] += w * dot(mp.grad[b], dga);
          buf.fe[a] += w * mp.shape[a] * fq;
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("assembly failed in cell " + std::to_string(c) + ": " + e.what());
    }
    scatter(kb, rhs, space, c, buf);
  }
  add_zero_diagonal(kb, space.dof_count);
  return finish_system(kb, rhs, space, bcs);
}

AssembledSystem assemble_supg(const FunctionSpace& space, const DiffusivityField& d, const VectorField& v,
                              const ScalarField& f, const std::vector<DirichletBC>& bcs,
                              const SupgOptions& opts) {
  const Mesh& mesh = *space.mesh;
  const int npc = space.dofs_per_cell();
  const auto quad = cell_quadrature(mesh.kind, opts.quad.volume_quad_pts);
  if (opts.coefficient_divergence && !d.divergence)
    throw std::invalid_argument("assemble_supg: diffusivity provides no divergence evaluator");

  CooBuilder kb(space.dof_count, space.dof_count);
  kb.reserve(static_cast<size_t>(npc) * npc * mesh.cell_count() + space.dof_count);
  std::vector<double> rhs(space.dof_count, 0.0);
  ElementBuffers buf;
  Mat3 hess[kMaxCellNodes];
  const bool need_hessian = mesh.kind != CellKind::Tri3;

  for (int c = 0; c < mesh.cell_count(); ++c) {
    buf.clear(npc);
    const double h = cell_h(mesh, c, opts.h_override);
    for (const QuadPoint& q : quad) {
      const MappedPoint mp = map_point(mesh, c, q.ref);
      const EvalPoint ep{mp.x, c, q.ref};
      const Mat3 dq = d.value(ep);
      const Vec3 vq = v.value(ep);
      const double fq = f(ep);
      const double w = q.weight * mp.detj;
      const double speed = norm(vq);

      double tau = 0.0;
      if (opts.stabilization) {
        if (speed < opts.velocity_floor)
          throw std::runtime_error("assemble_supg: velocity below floor in cell " + std::to_string(c) +
                                   "; disable stabilization or raise the floor");
        tau = h / (2.0 * speed);
      }
      if (tau != 0.0 && need_hessian) physical_hessians(mesh, mesh.kind, mp, q.ref, hess);

      Vec3 div_d = {0, 0, 0};
      if (tau != 0.0 && opts.coefficient_divergence) div_d = d.divergence(ep);

      for (int a = 0; a < npc; ++a) {
        const Vec3 dga = matvec(dq, mp.grad[a]);
        const double vga = dot(vq, mp.grad[a]);
        for (int b = 0; b < npc; ++b) {
          double entry = dot(mp.grad[b], dga) + mp.shape[a] * dot(vq, mp.grad[b]);
          if (tau != 0.0) {
            double div_dgrad = 0.0;
            if (need_hessian)
              for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) div_dgrad += dq[r][s] * hess[b][r][s];
            if (opts.coefficient_divergence) div_dgrad += dot(div_d, mp.grad[b]);
            entry += tau * vga * (dot(vq, mp.grad[b]) - div_dgrad);
          }
          buf.ke[a * npc + b] += w * entry;
        }
        buf.fe[a] += w * (mp.shape[a] + tau * vga) * fq;
      }
    }
    scatter(kb, rhs, space, c, buf);
  }
  add_zero_diagonal(kb, space.dof_count);
  return finish_system(kb, rhs, space, bcs);
}

namespace {

// Per-side data at one face quadrature point.
struct SideEval {
  int cell;
  double shape[kMaxCellNodes];
  Vec3 grad[kMaxCellNodes];
  Mat3 diffusivity;
  Vec3 velocity = {0, 0, 0};
};

SideEval eval_side(const Mesh& mesh, int cell, const Vec3& x, const DiffusivityField& d,
                   const std::optional<VectorField>& v) {
  SideEval s;
  s.cell = cell;
  const Vec3 ref = inverse_map(mesh, cell, x);
  const MappedPoint mp = map_point(mesh, cell, ref);
  for (int a = 0; a < kMaxCellNodes; ++a) {
    s.shape[a] = mp.shape[a];
    s.grad[a] = mp.grad[a];
  }
  const EvalPoint ep{x, cell, ref};
  s.diffusivity = d.value(ep);
  if (v) s.velocity = v->value(ep);
  return s;
}

}  // namespace

RawSystem assemble_dg_raw(const FunctionSpace& space, const DiffusivityField& d,
                          const std::optional<VectorField>& v, const ScalarField& f, const DgOptions& opts) {
  if (space.kind != SpaceKind::DG1) throw std::invalid_argument("assemble_dg: space must be DG1");
  const Mesh& mesh = *space.mesh;
  if (mesh.cell_count() > 1 && mesh.interior_faces.empty())
    throw std::invalid_argument("assemble_dg: interior faces are not built");

  const int npc = space.dofs_per_cell();
  const int dim = mesh.dim;
  const double gamma = opts.gamma > 0 ? opts.gamma : 2.0 * (dim + 1) / dim;
  const auto quad = cell_quadrature(mesh.kind, opts.quad.volume_quad_pts);

  CooBuilder kb(space.dof_count, space.dof_count);
  kb.reserve(static_cast<size_t>(npc) * npc * (mesh.cell_count() + 4 * mesh.interior_faces.size()) +
             space.dof_count);
  std::vector<double> rhs(space.dof_count, 0.0);
  ElementBuffers buf;

  // volume terms
  for (int c = 0; c < mesh.cell_count(); ++c) {
    buf.clear(npc);
    for (const QuadPoint& q : quad) {
      const MappedPoint mp = map_point(mesh, c, q.ref);
      const EvalPoint ep{mp.x, c, q.ref};
      const Mat3 dq = d.value(ep);
      const double fq = f(ep);
      const double w = q.weight * mp.detj;
      Vec3 vq = {0, 0, 0};
      if (v) vq = v->value(ep);
      for (int a = 0; a < npc; ++a) {
        const Vec3 dga = matvec(dq, mp.grad[a]);
        const double vga = v ? dot(vq, mp.grad[a]) : 0.0;
        for (int b = 0; b < npc; ++b) {
          double entry = dot(mp.grad[b], dga);
          if (v) entry -= vga * mp.shape[b];  // advection, integrated by parts
          buf.ke[a * npc + b] += w * entry;
        }
        buf.fe[a] += w * mp.shape[a] * fq;
      }
    }
    scatter(kb, rhs, space, c, buf);
  }

  // interior faces: consistency, symmetry, penalty, upwind
  for (const InteriorFace& iface : mesh.interior_faces) {
    int cl = iface.left_cell, cr = iface.right_cell;
    Vec3 n = iface.normal;
    if (opts.swap_face_sides) {
      std::swap(cl, cr);
      n = -1.0 * n;
    }
    const double h = face_h(mesh, cl, cr, opts.h_override);
    for (const FaceQuadPoint& fq : face_quadrature(mesh, iface.nodes, opts.quad.face_quad_pts)) {
      const SideEval sides[2] = {eval_side(mesh, cl, fq.x, d, v), eval_side(mesh, cr, fq.x, d, v)};
      const double sgn[2] = {1.0, -1.0};
      double vn[2] = {0, 0};
      if (v) {
        vn[0] = 0.5 * (dot(sides[0].velocity, n) + std::abs(dot(sides[0].velocity, n)));
        vn[1] = 0.5 * (-dot(sides[1].velocity, n) + std::abs(dot(sides[1].velocity, n)));
      }
      for (int sa = 0; sa < 2; ++sa)
        for (int a = 0; a < npc; ++a) {
          const int ga = space.cell_dof(sides[sa].cell, a);
          const double jump_a = sgn[sa] * sides[sa].shape[a];
          const double flux_a = 0.5 * dot(n, matvec(sides[sa].diffusivity, sides[sa].grad[a]));
          for (int sb = 0; sb < 2; ++sb)
            for (int b = 0; b < npc; ++b) {
              const int gb = space.cell_dof(sides[sb].cell, b);
              const double jump_b = sgn[sb] * sides[sb].shape[b];
              const double flux_b = 0.5 * dot(n, matvec(sides[sb].diffusivity, sides[sb].grad[b]));
              double entry = -jump_a * flux_b + opts.epsilon * flux_a * jump_b + gamma / h * jump_a * jump_b;
              if (v) entry += jump_a * sgn[sb] * vn[sb] * sides[sb].shape[b];
              kb.add(ga, gb, fq.wds * entry);
            }
        }
    }
  }

  // outflow boundary term
  if (v) {
    for (const BoundaryFace& bf : mesh.boundary_faces) {
      const Vec3 n = face_unit_normal(mesh, bf.nodes, mesh.cell_centroid(bf.cell));
      for (const FaceQuadPoint& fq : face_quadrature(mesh, bf.nodes, opts.quad.face_quad_pts)) {
        const SideEval s = eval_side(mesh, bf.cell, fq.x, d, v);
        const double vn = 0.5 * (dot(s.velocity, n) + std::abs(dot(s.velocity, n)));
        if (vn == 0.0) continue;
        for (int a = 0; a < npc; ++a)
          for (int b = 0; b < npc; ++b)
            kb.add(space.cell_dof(bf.cell, a), space.cell_dof(bf.cell, b),
                   fq.wds * s.shape[a] * vn * s.shape[b]);
      }
    }
  }

  add_zero_diagonal(kb, space.dof_count);
  RawSystem out;
  out.k = kb.to_csr();
  out.rhs = std::move(rhs);
  return out;
}

AssembledSystem assemble_dg(const FunctionSpace& space, const DiffusivityField& d,
                            const std::optional<VectorField>& v, const ScalarField& f,
                            const std::vector<DirichletBC>& bcs, const DgOptions& opts) {
  RawSystem raw = assemble_dg_raw(space, d, v, f, opts);
  AssembledSystem sys;
  sys.space = space;
  sys.k = std::move(raw.k);
  sys.rhs = std::move(raw.rhs);
  std::vector<double> vals;
  const auto dofs = collect_bc_dofs(space, bcs, &vals);
  for (const auto& cd : dofs) sys.constrained_dofs.push_back(cd.dof);
  sys.constrained_values = std::move(vals);
  apply_dirichlet(sys.k, sys.rhs, sys.constrained_dofs, sys.constrained_values);
  return sys;
}

CsrMatrix assemble_dg_mass(const FunctionSpace& space, const AssemblyOptions& opts) {
  if (space.kind != SpaceKind::DG1) throw std::invalid_argument("assemble_dg_mass: space must be DG1");
  const Mesh& mesh = *space.mesh;
  const int npc = space.dofs_per_cell();
  const auto quad = cell_quadrature(mesh.kind, opts.volume_quad_pts);
  CooBuilder kb(space.dof_count, space.dof_count);
  ElementBuffers buf;
  std::vector<double> dummy(space.dof_count, 0.0);
  for (int c = 0; c < mesh.cell_count(); ++c) {
    buf.clear(npc);
    for (const QuadPoint& q : quad) {
      const MappedPoint mp = map_point(mesh, c, q.ref);
      const double w = q.weight * mp.detj;
      for (int a = 0; a < npc; ++a)
        for (int b = 0; b < npc; ++b) buf.ke[a * npc + b] += w * mp.shape[a] * mp.shape[b];
    }
    scatter(kb, dummy, space, c, buf);
  }
  return kb.to_csr();
}

}  // namespace vifem
