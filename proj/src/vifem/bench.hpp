#pragma once

#include <optional>
#include <string>

#include "vifem/assemble.hpp"
#include "vifem/vi.hpp"

namespace vifem {

enum class Problem { Diff2d, Adr2d, Diff3d, Adr3d, Miscible2d };
enum class Formulation { Gal, Supg, Dg };

Problem parse_problem(const std::string& name);
Formulation parse_formulation(const std::string& name);
std::string problem_name(Problem p);
std::string formulation_name(Formulation f);

// One steady benchmark run: problem geometry and coefficients are fixed by
// the benchmark definitions; h is the cells-per-direction parameter.
struct BenchmarkSpec {
  Problem problem = Problem::Diff3d;
  Formulation formulation = Formulation::Gal;
  ViSolverKind solver = ViSolverKind::None;
  int h = 10;                   // cells per direction (ignored for adr2d)
  double cmin = 0.0;
  double cmax = std::numeric_limits<double>::infinity();
  bool bounds_overridden = false;  // when false, adr2d uses [0,1]
  std::string output_dir;       // empty: <root>/<problem>/<formulation>-<solver>-h<h>
  std::string mesh_path;        // adr2d only; empty: data/square_hole.msh
  std::string config_path;      // miscible2d only
  double krylov_rel_tol = 1e-7;
  double vi_abs_tol = 1e-8;
  bool write_artifacts = true;
};

void validate_pair(Problem p, Formulation f, ViSolverKind s);

struct BenchmarkResult {
  FieldStats stats;
  int krylov_iterations = 0;
  int vi_outer_iterations = 0;
  double vi_merit = 0.0;
  bool converged = true;
  double wall_time = 0.0;
  std::string output_dir;
  // in-process access for tests and comparisons
  std::vector<double> solution;
  SpaceKind space_kind = SpaceKind::CG1;
};

// Assembles the spec'd system without solving; exposed so the VI layer can be
// driven directly on benchmark operators.
AssembledSystem assemble_benchmark(const BenchmarkSpec& spec, Mesh& mesh_out);

BenchmarkResult run_benchmark(const BenchmarkSpec& spec);

struct CompareResult {
  double linf = 0.0;
  long dofs = 0;
  std::string diff_vtk;
  std::string diff_csv;
};

// Difference report between two completed run directories.
CompareResult compare_runs(const std::string& dir_a, const std::string& dir_b, const std::string& out_dir = "");

std::string default_output_root();

}  // namespace vifem
