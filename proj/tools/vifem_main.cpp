// Benchmark command-line front end; talks to the solver library through the
// C interface only.
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vifem.h"

namespace {

int die(int rc, const char* what) {
  std::fprintf(stderr, "vifem: %s: %s\n", what, vifem_last_error());
  return rc;
}

struct MeshHandle {
  vifem_mesh* m = nullptr;
  ~MeshHandle() { vifem_mesh_destroy(m); }
};

int cmd_bench(const std::string& problem, const std::string& formulation, const std::string& solver, int h,
              double cmin, double cmax, bool bounds_set, const std::string& out,
              const std::string& mesh_path, const std::string& config, double rtol, double vi_tol) {
  vifem_bench_spec spec;
  vifem_bench_spec_init(&spec);
  spec.problem = problem.c_str();
  spec.formulation = formulation.c_str();
  spec.solver = solver.c_str();
  spec.h = h;
  spec.cmin = cmin;
  spec.cmax = cmax;
  spec.bounds_overridden = bounds_set ? 1 : 0;
  if (!out.empty()) spec.output_dir = out.c_str();
  if (!mesh_path.empty()) spec.mesh_path = mesh_path.c_str();
  if (!config.empty()) spec.config_path = config.c_str();
  spec.krylov_rel_tol = rtol;
  spec.vi_abs_tol = vi_tol;

  vifem_bench_result result;
  const int rc = vifem_bench_run(&spec, &result);
  if (rc != VIFEM_OK && rc != VIFEM_ERR_NO_CONVERGENCE) return die(rc, "bench failed");
  std::printf("%s %s %s h=%d: min %.7g max %.7g violating %ld/%ld krylov %d vi %d wall %.3fs\n",
              problem.c_str(), formulation.c_str(), solver.c_str(), h, result.min_value, result.max_value,
              result.violating, result.total, result.krylov_iterations, result.vi_iterations,
              result.wall_time);
  std::printf("artifacts: %s\n", result.output_dir);
  if (rc == VIFEM_ERR_NO_CONVERGENCE) {
    std::fprintf(stderr, "vifem: warning: a sub-solver did not converge\n");
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element transport benchmarks with bound enforcement via variational inequalities"};
  app.set_help_flag("--help", "print help");  // frees -h for the mesh parameter
  app.require_subcommand(1);

  // bench
  std::string problem = "diff3d", formulation = "gal", solver = "none";
  int h = 10;
  double cmin = 0.0, cmax = std::numeric_limits<double>::infinity();
  std::string out, mesh_path, config;
  double rtol = 1e-7, vi_tol = 1e-8;
  bool cmin_set = false, cmax_set = false;
  auto* bench = app.add_subcommand(
      "bench",
      "Run one benchmark. Writes summary.csv (columns problem, formulation, solver, h, dofs, min, max, "
      "violating, total, krylov_iterations, vi_iterations, vi_merit, converged, wall_time_s; wall time is "
      "informational and not reproducible), solution.vtk and solution.mm. Exit status is nonzero when any "
      "sub-solver reports non-convergence.");
  bench->add_option("--problem", problem, "diff2d | adr2d | diff3d | adr3d | miscible2d");
  bench->add_option("--formulation", formulation, "gal | supg | dg");
  bench->add_option("--solver", solver, "none | clip | ss | rs | tron");
  bench->add_option("--h", h, "cells per direction (structured problems)");
  bench->add_option("--cmin", cmin, "lower bound")->each([&](const std::string&) { cmin_set = true; });
  bench->add_option("--cmax", cmax, "upper bound")->each([&](const std::string&) { cmax_set = true; });
  bench->add_option("--out", out, "output directory (default <root>/<problem>/<formulation>-<solver>-h<h>; "
                                  "root from VIFEM_OUTPUT_ROOT or ./out)");
  bench->add_option("--mesh", mesh_path, "gmsh mesh for adr2d (default data/square_hole.msh)");
  bench->add_option("--config", config, "key = value config file for miscible2d");
  bench->add_option("--rtol", rtol, "relative tolerance of the unconstrained Krylov solve");
  bench->add_option("--vi-tol", vi_tol, "absolute merit tolerance of the VI/QP solvers");

  // compare
  std::string dir_a, dir_b, cmp_out;
  auto* compare = app.add_subcommand("compare",
                                     "Compare two run directories; writes diff.csv and diff.vtk and prints "
                                     "the max-norm difference.");
  compare->add_option("dirA", dir_a)->required();
  compare->add_option("dirB", dir_b)->required();
  compare->add_option("--out", cmp_out, "directory for the difference artifacts (default dirA)");

  // mesh-info
  std::string info_mesh;
  int info_n = 0, info_nz = 0;
  auto* mesh_info = app.add_subcommand("mesh-info", "Print node/cell/face counts and boundary tags.");
  mesh_info->add_option("--mesh", info_mesh, "gmsh file to inspect");
  mesh_info->add_option("--n", info_n, "structured quad mesh with n x n cells instead of a file");
  mesh_info->add_option("--nz", info_nz, "extrude the structured mesh into nz layers");

  // gen-mesh
  int gen_n = 90;
  std::string gen_out = "data/square_hole.msh";
  auto* gen = app.add_subcommand("gen-mesh", "Regenerate the holed-square benchmark mesh (gmsh v2.2).");
  gen->add_option("--n", gen_n, "cells per direction, multiple of 9");
  gen->add_option("--out", gen_out, "output path");

  CLI11_PARSE(app, argc, argv);

  if (bench->parsed())
    return cmd_bench(problem, formulation, solver, h, cmin, cmax, cmin_set || cmax_set, out, mesh_path,
                     config, rtol, vi_tol);

  if (compare->parsed()) {
    double linf = 0.0;
    long dofs = 0;
    const int rc = vifem_compare_runs(dir_a.c_str(), dir_b.c_str(), cmp_out.empty() ? nullptr : cmp_out.c_str(),
                                      &linf, &dofs);
    if (rc != VIFEM_OK) return die(1, "compare failed");
    std::printf("dofs %ld  linf %.17g\n", dofs, linf);
    return 0;
  }

  if (mesh_info->parsed()) {
    MeshHandle mh;
    int rc;
    if (!info_mesh.empty()) {
      rc = vifem_mesh_read_gmsh(info_mesh.c_str(), &mh.m);
    } else if (info_n > 0) {
      rc = vifem_mesh_create_structured_quad(info_n, info_n, 0, 0, 1, 1, &mh.m);
      if (rc == VIFEM_OK && info_nz > 0) {
        vifem_mesh* hexes = nullptr;
        rc = vifem_mesh_extrude(mh.m, info_nz, 1.0, &hexes);
        if (rc == VIFEM_OK) {
          vifem_mesh_destroy(mh.m);
          mh.m = hexes;
        }
      }
    } else {
      std::fprintf(stderr, "vifem: mesh-info needs --mesh or --n\n");
      return 1;
    }
    if (rc != VIFEM_OK) return die(1, "mesh-info failed");
    vifem_mesh_info info;
    vifem_mesh_get_info(mh.m, &info);
    std::printf("dim %d  nodes %ld  cells %ld  boundary_faces %ld  interior_faces %ld\n", info.dim,
                info.nodes, info.cells, info.boundary_faces, info.interior_faces);
    int count = 0;
    std::vector<int> tags(64);
    vifem_mesh_get_tags(mh.m, tags.data(), static_cast<int>(tags.size()), &count);
    std::printf("tags:");
    for (int i = 0; i < count && i < 64; ++i) std::printf(" %d", tags[i]);
    std::printf("\n");
    return 0;
  }

  if (gen->parsed()) {
    MeshHandle mh;
    if (vifem_mesh_create_square_hole(gen_n, &mh.m) != VIFEM_OK) return die(1, "gen-mesh failed");
    if (vifem_mesh_write_gmsh(mh.m, gen_out.c_str()) != VIFEM_OK) return die(1, "gen-mesh write failed");
    vifem_mesh_info info;
    vifem_mesh_get_info(mh.m, &info);
    std::printf("wrote %s: %ld triangles, %ld nodes\n", gen_out.c_str(), info.cells, info.nodes);
    return 0;
  }
  return 0;
}
