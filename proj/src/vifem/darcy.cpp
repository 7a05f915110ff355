#include "vifem/darcy.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "vifem/quadrature.hpp"

namespace vifem {

namespace {

int dominant_axis(const Vec3& n, int dim) {
  int axis = 0;
  double best = std::abs(n[0]);
  for (int a = 1; a < dim; ++a)
    if (std::abs(n[a]) > best) {
      best = std::abs(n[a]);
      axis = a;
    }
  if (best < 1.0 - 1e-10)
    throw std::invalid_argument("darcy: mesh cells must be axis-aligned boxes (tilted face normal)");
  return axis;
}

struct CellBox {
  Vec3 lo, hi;
};

CellBox cell_box(const Mesh& mesh, int cell) {
  CellBox b;
  b.lo = b.hi = mesh.nodes[mesh.cell_node(cell, 0)];
  const int npc = nodes_per_cell(mesh.kind);
  for (int a = 1; a < npc; ++a) {
    const Vec3& p = mesh.nodes[mesh.cell_node(cell, a)];
    for (int d = 0; d < 3; ++d) {
      b.lo[d] = std::min(b.lo[d], p[d]);
      b.hi[d] = std::max(b.hi[d], p[d]);
    }
  }
  return b;
}

}  // namespace

DarcyFaceDofs build_darcy_face_dofs(const Mesh& mesh) {
  if (mesh.kind != CellKind::Quad4 && mesh.kind != CellKind::Hex8)
    throw std::invalid_argument("darcy: unsupported element kind (RT0 needs quad4 or hex8)");
  const int dim = mesh.dim;

  DarcyFaceDofs dofs;
  dofs.cell_faces.assign(mesh.cell_count(), {-1, -1, -1, -1, -1, -1});

  auto add_face = [&](const std::vector<int>& nodes, int owner, int other, const Vec3& outward_of_owner,
                      int tag) {
    DarcyFaceDofs::Face f;
    f.axis = dominant_axis(outward_of_owner, dim);
    f.area = face_area(mesh, nodes);
    f.centroid = face_centroid(mesh, nodes);
    f.tag = tag;
    if (outward_of_owner[f.axis] > 0) {
      f.cell_minus = owner;  // face sits on the owner's positive side
      f.cell_plus = other;
    } else {
      f.cell_minus = other;
      f.cell_plus = owner;
    }
    const int id = dofs.count();
    dofs.faces.push_back(f);
    if (f.cell_minus >= 0) dofs.cell_faces[f.cell_minus][2 * f.axis + 1] = id;
    if (f.cell_plus >= 0) dofs.cell_faces[f.cell_plus][2 * f.axis + 0] = id;
  };

  for (const InteriorFace& f : mesh.interior_faces) add_face(f.nodes, f.left_cell, f.right_cell, f.normal, 0);
  for (const BoundaryFace& f : mesh.boundary_faces) {
    const Vec3 n = face_unit_normal(mesh, f.nodes, mesh.cell_centroid(f.cell));
    add_face(f.nodes, f.cell, -1, n, f.tag);
  }

  for (int c = 0; c < mesh.cell_count(); ++c)
    for (int a = 0; a < 2 * dim; ++a)
      if (dofs.cell_faces[c][a] < 0) throw std::runtime_error("darcy: cell is missing a face dof");
  return dofs;
}

DarcyBlockSystem assemble_rt0_darcy(const Mesh& mesh, const DarcyFields& fields) {
  DarcyBlockSystem sys;
  sys.mesh = &mesh;
  sys.dofs = build_darcy_face_dofs(mesh);
  const int dim = mesh.dim;
  const int n_v = sys.dofs.count();
  const int n_p = mesh.cell_count();

  CooBuilder bvv(n_v, n_v), bvp(n_v, n_p), bpv(n_p, n_v);
  sys.f_v.assign(n_v, 0.0);
  sys.f_p.assign(n_p, 0.0);

  const auto quad = cell_quadrature(mesh.kind, 2);
  for (int c = 0; c < n_p; ++c) {
    const CellBox box = cell_box(mesh, c);
    Vec3 h;
    double volume = 1.0;
    for (int d = 0; d < dim; ++d) {
      h[d] = box.hi[d] - box.lo[d];
      volume *= h[d];
    }
    for (int axis = 0; axis < dim; ++axis) {
      const int lo_dof = sys.dofs.cell_faces[c][2 * axis + 0];
      const int up_dof = sys.dofs.cell_faces[c][2 * axis + 1];
      double m[2][2] = {{0, 0}, {0, 0}};
      double body[2] = {0, 0};
      for (const QuadPoint& q : quad) {
        Vec3 x = box.lo;
        for (int d = 0; d < dim; ++d) x[d] += q.ref[d] * h[d];
        const EvalPoint ep{x, c, q.ref};
        const double k = fields.permeability(ep);
        const double mu = fields.viscosity(ep);
        if (!(k > 0.0) || !(mu > 0.0))
          throw std::runtime_error("darcy: permeability and viscosity must be positive (cell " +
                                   std::to_string(c) + ")");
        const double w = q.weight * volume * mu / k;
        const double phi_lo = 1.0 - q.ref[axis];
        const double phi_up = q.ref[axis];
        m[0][0] += w * phi_lo * phi_lo;
        m[0][1] += w * phi_lo * phi_up;
        m[1][0] += w * phi_up * phi_lo;
        m[1][1] += w * phi_up * phi_up;
        const double wb = q.weight * volume * fields.density * fields.body_force[axis];
        body[0] += wb * phi_lo;
        body[1] += wb * phi_up;
      }
      bvv.add(lo_dof, lo_dof, m[0][0]);
      bvv.add(lo_dof, up_dof, m[0][1]);
      bvv.add(up_dof, lo_dof, m[1][0]);
      bvv.add(up_dof, up_dof, m[1][1]);
      sys.f_v[lo_dof] += body[0];
      sys.f_v[up_dof] += body[1];

      // integral of div(w) over the cell is the signed face area
      const double area_lo = sys.dofs.faces[lo_dof].area;
      const double area_up = sys.dofs.faces[up_dof].area;
      bvp.add(lo_dof, c, area_lo);   // -(div w, p): div contribution of the lower face is -area
      bvp.add(up_dof, c, -area_up);
      bpv.add(c, lo_dof, area_lo);
      bpv.add(c, up_dof, -area_up);
    }
  }

  // natural pressure boundary and strong normal-velocity boundary
  const std::set<int> ptags(fields.pressure_tags.begin(), fields.pressure_tags.end());
  const std::set<int> vtags(fields.normal_velocity_tags.begin(), fields.normal_velocity_tags.end());
  for (int f = 0; f < sys.dofs.count(); ++f) {
    const auto& face = sys.dofs.faces[f];
    const bool boundary = face.cell_minus < 0 || face.cell_plus < 0;
    if (!boundary) continue;
    const double sign_out = face.cell_minus >= 0 ? 1.0 : -1.0;  // owner outward vs +axis
    if (ptags.count(face.tag)) {
      const EvalPoint ep{face.centroid, face.cell_minus >= 0 ? face.cell_minus : face.cell_plus, {0, 0, 0}};
      sys.f_v[f] -= fields.pressure_value(ep) * sign_out * face.area;
    } else if (vtags.count(face.tag)) {
      const EvalPoint ep{face.centroid, face.cell_minus >= 0 ? face.cell_minus : face.cell_plus, {0, 0, 0}};
      sys.constrained_velocity_dofs.push_back(f);
      sys.constrained_velocity_values.push_back(sign_out * fields.normal_velocity_value(ep));
    }
  }

  sys.k_vv = bvv.to_csr();
  sys.k_vp = bvp.to_csr();
  sys.k_pv = bpv.to_csr();

  // symmetric elimination of the strong velocity dofs
  if (!sys.constrained_velocity_dofs.empty()) {
    std::vector<char> fixed(n_v, 0);
    std::vector<double> g(n_v, 0.0);
    for (size_t i = 0; i < sys.constrained_velocity_dofs.size(); ++i) {
      fixed[sys.constrained_velocity_dofs[i]] = 1;
      g[sys.constrained_velocity_dofs[i]] = sys.constrained_velocity_values[i];
    }
    const auto kvv_g = spmv(sys.k_vv, g);
    const auto kpv_g = spmv(sys.k_pv, g);
    for (int i = 0; i < n_v; ++i)
      if (!fixed[i]) sys.f_v[i] -= kvv_g[i];
    for (int i = 0; i < n_p; ++i) sys.f_p[i] -= kpv_g[i];
    for (int i = 0; i < n_v; ++i) {
      for (int p = sys.k_vv.row_offsets[i]; p < sys.k_vv.row_offsets[i + 1]; ++p) {
        const int j = sys.k_vv.col_indices[p];
        if (fixed[i]) sys.k_vv.values[p] = i == j ? 1.0 : 0.0;
        else if (fixed[j]) sys.k_vv.values[p] = 0.0;
      }
      if (fixed[i]) {
        sys.f_v[i] = g[i];
        for (int p = sys.k_vp.row_offsets[i]; p < sys.k_vp.row_offsets[i + 1]; ++p) sys.k_vp.values[p] = 0.0;
      }
    }
    for (int c = 0; c < n_p; ++c)
      for (int p = sys.k_pv.row_offsets[c]; p < sys.k_pv.row_offsets[c + 1]; ++p)
        if (fixed[sys.k_pv.col_indices[p]]) sys.k_pv.values[p] = 0.0;
  }
  return sys;
}

DarcySolution solve_darcy_schur(const DarcyBlockSystem& sys, const DarcySolveOptions& opts,
                                std::span<const double> x0) {
  const int n_v = sys.n_velocity(), n_p = sys.n_pressure();
  const int n = n_v + n_p;
  if (!x0.empty() && static_cast<int>(x0.size()) != n)
    throw std::invalid_argument("solve_darcy_schur: x0 size mismatch");

  const LinearOperator block_op = [&](std::span<const double> x, std::span<double> y) {
    const std::span<const double> xv = x.subspan(0, n_v), xp = x.subspan(n_v, n_p);
    spmv(sys.k_vv, xv, y.subspan(0, n_v));
    const auto kvp_xp = spmv(sys.k_vp, xp);
    for (int i = 0; i < n_v; ++i) y[i] += kvp_xp[i];
    spmv(sys.k_pv, xv, y.subspan(n_v, n_p));
  };

  LinearOperator precond = [n](std::span<const double> r, std::span<double> z) {
    std::copy(r.begin(), r.end(), z.begin());
  };

  std::unique_ptr<Preconditioner> ilu_vv;
  CsrMatrix s_neg;  // -S_p = K_pv diag(K_vv)^{-1} K_vp, positive definite
  std::unique_ptr<Preconditioner> ilu_s;
  if (opts.use_schur_preconditioner) {
    ilu_vv = ilu0_factor(sys.k_vv);
    std::vector<double> inv_diag(n_v);
    for (int i = 0; i < n_v; ++i) {
      const double d = sys.k_vv.at(i, i);
      if (d == 0.0) throw std::runtime_error("darcy: zero diagonal in K_vv during mass lumping (dof " +
                                             std::to_string(i) + ")");
      inv_diag[i] = 1.0 / d;
    }
    CooBuilder sb(n_p, n_p);
    for (int c = 0; c < n_p; ++c)
      for (int p = sys.k_pv.row_offsets[c]; p < sys.k_pv.row_offsets[c + 1]; ++p) {
        const int f = sys.k_pv.col_indices[p];
        const double w = sys.k_pv.values[p] * inv_diag[f];
        for (int q = sys.k_vp.row_offsets[f]; q < sys.k_vp.row_offsets[f + 1]; ++q)
          sb.add(c, sys.k_vp.col_indices[q], w * sys.k_vp.values[q]);
      }
    s_neg = sb.to_csr();
    ilu_s = ilu0_factor(s_neg);

    precond = [&, n_v, n_p](std::span<const double> r, std::span<double> z) {
      std::vector<double> y(n_v);
      ilu_vv->apply(r.subspan(0, n_v), y);
      std::vector<double> t(n_p);
      spmv(sys.k_pv, y, t);
      for (int i = 0; i < n_p; ++i) t[i] = -(r[n_v + i] - t[i]);  // solve (-S_p) z_p = -(r_p - K_pv y)
      KrylovOptions cg_opts;
      cg_opts.rel_tol = opts.inner_schur_rel_tol;
      cg_opts.max_iters = 400;
      auto [zp, rep] = cg_solve(s_neg, t, std::vector<double>(n_p, 0.0), cg_opts, ilu_s.get());
      const auto kvp_zp = spmv(sys.k_vp, zp);
      std::vector<double> corr(n_v);
      ilu_vv->apply(kvp_zp, corr);
      for (int i = 0; i < n_v; ++i) z[i] = y[i] - corr[i];
      for (int i = 0; i < n_p; ++i) z[n_v + i] = zp[i];
    };
  }

  std::vector<double> rhs(n);
  std::copy(sys.f_v.begin(), sys.f_v.end(), rhs.begin());
  std::copy(sys.f_p.begin(), sys.f_p.end(), rhs.begin() + n_v);

  KrylovOptions outer;
  outer.rel_tol = opts.rel_tol;
  outer.abs_tol = opts.abs_tol;
  outer.max_iters = opts.max_iters;
  outer.restart = opts.restart;
  std::vector<double> start(n, 0.0);
  if (!x0.empty()) start.assign(x0.begin(), x0.end());
  auto [x, report] = fgmres_solve(block_op, n, rhs, start, outer, precond);

  DarcySolution sol;
  sol.velocity.assign(x.begin(), x.begin() + n_v);
  sol.pressure.assign(x.begin() + n_v, x.end());
  sol.report = std::move(report);
  return sol;
}

std::vector<double> cell_divergence(std::span<const double> velocity, const DarcyBlockSystem& sys) {
  const int dim = sys.mesh->dim;
  std::vector<double> div(sys.n_pressure(), 0.0);
  for (int c = 0; c < sys.n_pressure(); ++c)
    for (int axis = 0; axis < dim; ++axis) {
      const int lo = sys.dofs.cell_faces[c][2 * axis + 0];
      const int up = sys.dofs.cell_faces[c][2 * axis + 1];
      div[c] += velocity[up] * sys.dofs.faces[up].area - velocity[lo] * sys.dofs.faces[lo].area;
    }
  return div;
}

std::vector<Vec3> cell_velocity(std::span<const double> velocity, const DarcyBlockSystem& sys) {
  const int dim = sys.mesh->dim;
  std::vector<Vec3> v(sys.n_pressure(), {0, 0, 0});
  for (int c = 0; c < sys.n_pressure(); ++c)
    for (int axis = 0; axis < dim; ++axis) {
      const int lo = sys.dofs.cell_faces[c][2 * axis + 0];
      const int up = sys.dofs.cell_faces[c][2 * axis + 1];
      v[c][axis] = 0.5 * (velocity[lo] + velocity[up]);
    }
  return v;
}

}  // namespace vifem
