#include "vifem.h"

#include <cstring>
#include <limits>
#include <set>
#include <string>

#include "vifem/bench.hpp"
#include "vifem/gmsh_io.hpp"
#include "vifem/mesh.hpp"
#include "vifem/vi.hpp"
#include "vifem/vtk_io.hpp"

struct vifem_mesh {
  vifem::Mesh m;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(VIFEM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(VIFEM_ERR_RUNTIME, e.what());
  }
}

}  // namespace

extern "C" {

const char* vifem_last_error(void) { return g_last_error.c_str(); }

int vifem_mesh_create_structured_quad(int nx, int ny, double x0, double y0, double x1, double y1,
                                      vifem_mesh** out) {
  if (!out) return fail(VIFEM_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = new vifem_mesh{vifem::build_structured_quad_mesh(nx, ny, {x0, y0, x1, y1})};
    return VIFEM_OK;
  });
}

int vifem_mesh_extrude(const vifem_mesh* base, int nz, double height, vifem_mesh** out) {
  if (!base || !out) return fail(VIFEM_ERR_INVALID_ARGUMENT, "mesh or out is NULL");
  return guarded([&] {
    *out = new vifem_mesh{vifem::extrude_to_hex(base->m, nz, height)};
    return VIFEM_OK;
  });
}

int vifem_mesh_read_gmsh(const char* path, vifem_mesh** out) {
  if (!path || !out) return fail(VIFEM_ERR_INVALID_ARGUMENT, "path or out is NULL");
  return guarded([&] {
    *out = new vifem_mesh{vifem::read_gmsh(path)};
    return VIFEM_OK;
  });
}

int vifem_mesh_create_square_hole(int n, vifem_mesh** out) {
  if (!out) return fail(VIFEM_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = new vifem_mesh{vifem::build_square_hole_tri_mesh(n)};
    return VIFEM_OK;
  });
}

int vifem_mesh_write_vtk(const vifem_mesh* mesh, const char* path) {
  if (!mesh || !path) return fail(VIFEM_ERR_INVALID_ARGUMENT, "mesh or path is NULL");
  return guarded([&] {
    vifem::write_vtk(mesh->m, path);
    return VIFEM_OK;
  });
}

int vifem_mesh_write_gmsh(const vifem_mesh* mesh, const char* path) {
  if (!mesh || !path) return fail(VIFEM_ERR_INVALID_ARGUMENT, "mesh or path is NULL");
  return guarded([&] {
    vifem::write_gmsh(mesh->m, path);
    return VIFEM_OK;
  });
}

void vifem_mesh_destroy(vifem_mesh* mesh) { delete mesh; }

int vifem_mesh_get_info(const vifem_mesh* mesh, vifem_mesh_info* out) {
  if (!mesh || !out) return fail(VIFEM_ERR_INVALID_ARGUMENT, "mesh or out is NULL");
  out->dim = mesh->m.dim;
  out->nodes = mesh->m.node_count();
  out->cells = mesh->m.cell_count();
  out->boundary_faces = static_cast<long>(mesh->m.boundary_faces.size());
  out->interior_faces = static_cast<long>(mesh->m.interior_faces.size());
  return VIFEM_OK;
}

int vifem_mesh_get_tags(const vifem_mesh* mesh, int* tags, int cap, int* count) {
  if (!mesh || !count) return fail(VIFEM_ERR_INVALID_ARGUMENT, "mesh or count is NULL");
  std::set<int> ids;
  for (const auto& t : mesh->m.tags) ids.insert(t.id);
  for (const auto& f : mesh->m.boundary_faces) ids.insert(f.tag);
  *count = static_cast<int>(ids.size());
  int i = 0;
  for (int id : ids) {
    if (!tags || i >= cap) break;
    tags[i++] = id;
  }
  return VIFEM_OK;
}

int vifem_vi_solve(int n, const int* row_offsets, const int* col_indices, const double* values,
                   const double* f, const double* lb, const double* ub, const char* solver, double abs_tol,
                   double* x, vifem_vi_report* report) {
  if (n <= 0 || !row_offsets || !col_indices || !values || !f || !solver || !x)
    return fail(VIFEM_ERR_INVALID_ARGUMENT, "missing argument");
  return guarded([&]() -> int {
    const double inf = std::numeric_limits<double>::infinity();
    vifem::BoxConstrainedSystem sys;
    sys.k.nrows = sys.k.ncols = n;
    sys.k.row_offsets.assign(row_offsets, row_offsets + n + 1);
    sys.k.col_indices.assign(col_indices, col_indices + row_offsets[n]);
    sys.k.values.assign(values, values + row_offsets[n]);
    sys.f.assign(f, f + n);
    sys.lb.assign(n, -inf);
    sys.ub.assign(n, inf);
    if (lb) sys.lb.assign(lb, lb + n);
    if (ub) sys.ub.assign(ub, ub + n);

    vifem::ViOptions opts;
    if (abs_tol > 0) opts.abs_tol = abs_tol;
    const std::vector<double> start(x, x + n);
    std::pair<std::vector<double>, vifem::ComplementarityReport> sol;
    switch (vifem::parse_solver(solver)) {
      case vifem::ViSolverKind::Semismooth: sol = vifem::solve_semismooth(sys, start, opts); break;
      case vifem::ViSolverKind::ReducedSpace: sol = vifem::solve_reduced_space(sys, start, opts); break;
      case vifem::ViSolverKind::Tron: sol = vifem::solve_tron(sys, start, opts); break;
      default: return fail(VIFEM_ERR_INVALID_ARGUMENT, "solver must be ss, rs or tron");
    }
    std::memcpy(x, sol.first.data(), sizeof(double) * n);
    if (report) {
      report->merit = sol.second.merit;
      report->max_bound_violation = sol.second.max_bound_violation;
      report->max_sign_violation = sol.second.max_sign_violation;
      report->outer_iterations = sol.second.outer_iterations;
      report->inner_krylov_total = sol.second.inner_krylov_total;
      report->converged = sol.second.converged ? 1 : 0;
      report->wall_time = sol.second.wall_time;
    }
    return sol.second.converged ? VIFEM_OK : fail(VIFEM_ERR_NO_CONVERGENCE, sol.second.termination);
  });
}

void vifem_bench_spec_init(vifem_bench_spec* spec) {
  if (!spec) return;
  std::memset(spec, 0, sizeof(*spec));
  spec->problem = "diff3d";
  spec->formulation = "gal";
  spec->solver = "none";
  spec->h = 10;
  spec->cmin = 0.0;
  spec->cmax = std::numeric_limits<double>::infinity();
  spec->krylov_rel_tol = 1e-7;
  spec->vi_abs_tol = 1e-8;
  spec->write_artifacts = 1;
}

int vifem_bench_run(const vifem_bench_spec* spec, vifem_bench_result* out) {
  if (!spec || !out) return fail(VIFEM_ERR_INVALID_ARGUMENT, "spec or out is NULL");
  return guarded([&]() -> int {
    vifem::BenchmarkSpec s;
    s.problem = vifem::parse_problem(spec->problem ? spec->problem : "");
    s.formulation = vifem::parse_formulation(spec->formulation ? spec->formulation : "");
    s.solver = vifem::parse_solver(spec->solver ? spec->solver : "none");
    s.h = spec->h;
    s.cmin = spec->cmin;
    s.cmax = spec->cmax;
    s.bounds_overridden = spec->bounds_overridden != 0;
    if (spec->output_dir) s.output_dir = spec->output_dir;
    if (spec->mesh_path) s.mesh_path = spec->mesh_path;
    if (spec->config_path) s.config_path = spec->config_path;
    if (spec->krylov_rel_tol > 0) s.krylov_rel_tol = spec->krylov_rel_tol;
    if (spec->vi_abs_tol > 0) s.vi_abs_tol = spec->vi_abs_tol;
    s.write_artifacts = spec->write_artifacts != 0;

    const vifem::BenchmarkResult r = vifem::run_benchmark(s);
    out->min_value = r.stats.min_value;
    out->max_value = r.stats.max_value;
    out->violating = r.stats.violating_dofs;
    out->total = r.stats.total_dofs;
    out->krylov_iterations = r.krylov_iterations;
    out->vi_iterations = r.vi_outer_iterations;
    out->vi_merit = r.vi_merit;
    out->converged = r.converged ? 1 : 0;
    out->wall_time = r.wall_time;
    std::strncpy(out->output_dir, r.output_dir.c_str(), sizeof(out->output_dir) - 1);
    out->output_dir[sizeof(out->output_dir) - 1] = '\0';
    return r.converged ? VIFEM_OK : fail(VIFEM_ERR_NO_CONVERGENCE, "a sub-solver did not converge");
  });
}

int vifem_compare_runs(const char* dir_a, const char* dir_b, const char* out_dir, double* linf, long* dofs) {
  if (!dir_a || !dir_b) return fail(VIFEM_ERR_INVALID_ARGUMENT, "run directories are NULL");
  return guarded([&] {
    const vifem::CompareResult r = vifem::compare_runs(dir_a, dir_b, out_dir ? out_dir : "");
    if (linf) *linf = r.linf;
    if (dofs) *dofs = r.dofs;
    return VIFEM_OK;
  });
}

}  // extern "C"
