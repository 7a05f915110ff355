/* C interface to the vifem solver library.
 *
 * All functions return VIFEM_OK or an error code; vifem_last_error() gives a
 * message for the most recent failure on the calling thread. Objects returned
 * through handle pointers are owned by the caller and released with the
 * matching _destroy function.
 */
#ifndef VIFEM_H
#define VIFEM_H

#ifdef __cplusplus
extern "C" {
#endif

enum {
  VIFEM_OK = 0,
  VIFEM_ERR_INVALID_ARGUMENT = 1,
  VIFEM_ERR_RUNTIME = 2,
  VIFEM_ERR_NO_CONVERGENCE = 3
};

const char* vifem_last_error(void);

/* ---- meshes ---- */

typedef struct vifem_mesh vifem_mesh;

int vifem_mesh_create_structured_quad(int nx, int ny, double x0, double y0, double x1, double y1,
                                      vifem_mesh** out);
int vifem_mesh_extrude(const vifem_mesh* base, int nz, double height, vifem_mesh** out);
int vifem_mesh_read_gmsh(const char* path, vifem_mesh** out);
/* Unit square with a [4/9,5/9]^2 hole, triangulated; n must be a positive
 * multiple of 9. Tags: outer 12..15, hole 16..19, surface 20. */
int vifem_mesh_create_square_hole(int n, vifem_mesh** out);
int vifem_mesh_write_vtk(const vifem_mesh* mesh, const char* path);
int vifem_mesh_write_gmsh(const vifem_mesh* mesh, const char* path);
void vifem_mesh_destroy(vifem_mesh* mesh);

typedef struct {
  int dim;
  long nodes;
  long cells;
  long boundary_faces;
  long interior_faces;
} vifem_mesh_info;
int vifem_mesh_get_info(const vifem_mesh* mesh, vifem_mesh_info* out);
/* Writes up to cap distinct boundary/volume tag ids; *count receives the
 * total number available. */
int vifem_mesh_get_tags(const vifem_mesh* mesh, int* tags, int cap, int* count);

/* ---- box-constrained variational-inequality solve on a CSR system ---- */

typedef struct {
  double merit;                /* 0.5 ||Phi(c)||^2 at the returned point */
  double max_bound_violation;
  double max_sign_violation;
  int outer_iterations;
  long inner_krylov_total;
  int converged;
  double wall_time;
} vifem_vi_report;

/* Solves the mixed complementarity problem for K c = f with bounds lb/ub
 * (pass NULL for an unbounded side). solver is one of "ss", "rs", "tron".
 * x carries the initial guess in and the solution out. */
int vifem_vi_solve(int n, const int* row_offsets, const int* col_indices, const double* values,
                   const double* f, const double* lb, const double* ub, const char* solver, double abs_tol,
                   double* x, vifem_vi_report* report);

/* ---- benchmark harness ---- */

typedef struct {
  const char* problem;      /* diff2d | adr2d | diff3d | adr3d | miscible2d */
  const char* formulation;  /* gal | supg | dg */
  const char* solver;       /* none | clip | ss | rs | tron */
  int h;                    /* cells per direction */
  double cmin, cmax;
  int bounds_overridden;    /* 0: problem defaults */
  const char* output_dir;   /* NULL: <root>/<problem>/<formulation>-<solver>-h<h> */
  const char* mesh_path;    /* adr2d; NULL: data/square_hole.msh */
  const char* config_path;  /* miscible2d */
  double krylov_rel_tol;
  double vi_abs_tol;
  int write_artifacts;
} vifem_bench_spec;

void vifem_bench_spec_init(vifem_bench_spec* spec);

typedef struct {
  double min_value, max_value;
  long violating, total;
  int krylov_iterations;
  int vi_iterations;
  double vi_merit;
  int converged;
  double wall_time;
  char output_dir[512];
} vifem_bench_result;

int vifem_bench_run(const vifem_bench_spec* spec, vifem_bench_result* out);

int vifem_compare_runs(const char* dir_a, const char* dir_b, const char* out_dir, double* linf, long* dofs);

#ifdef __cplusplus
}
#endif

#endif /* VIFEM_H */
