#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vifem/csr.hpp"
#include "vifem/krylov.hpp"

namespace vifem {

// Box-constrained linear complementarity data: find lb <= c <= ub with
// h(c) = K c - f satisfying h_i >= 0 at the lower bound, h_i <= 0 at the
// upper bound and h_i = 0 in between. Either bound may be +-infinity.
struct BoxConstrainedSystem {
  CsrMatrix k;
  std::vector<double> f;
  std::vector<double> lb;
  std::vector<double> ub;

  int size() const { return static_cast<int>(f.size()); }
  std::vector<double> residual(std::span<const double> c) const;  // K c - f
  void validate() const;
};

BoxConstrainedSystem make_box_system(CsrMatrix k, std::vector<double> f, double cmin, double cmax);

struct ViOptions {
  double abs_tol = 1e-8;        // bound on the merit 0.5 ||Phi||^2
  double residual_tol = 1e-10;  // bound on ||Phi||_inf; keeps solvers comparable to 1e-6
  int max_outer = 500;
  double inner_rel_tol = 1e-3;  // Krylov tolerance for descent directions
  int inner_max_iters = 20000;
  PrecondKind inner_precond = PrecondKind::Ilu0;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-12;
};

struct ViTraceRow {
  int iteration;
  double merit;
  double step_length;
  int active_count;
};

struct ComplementarityReport {
  double merit = 0.0;                 // 0.5 ||Phi(c)||^2
  double max_bound_violation = 0.0;
  double max_sign_violation = 0.0;    // worst violated MCP sign condition
  int outer_iterations = 0;
  long inner_krylov_total = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::string termination;
  std::vector<ViTraceRow> trace;
};

// Fischer-Burmeister function: zero exactly on {a >= 0, b >= 0, ab = 0}.
double fb(double a, double b);

// Componentwise semi-smooth reformulation Phi(c) of the MCP, switching on the
// finiteness pattern of the bounds (nested fb for two-sided bounds).
std::vector<double> fb_residual(const BoxConstrainedSystem& sys, std::span<const double> c);

std::vector<double> clip(std::span<const double> c, std::span<const double> lb, std::span<const double> ub);

std::pair<std::vector<double>, ComplementarityReport> solve_semismooth(const BoxConstrainedSystem& sys,
                                                                       std::span<const double> c0,
                                                                       const ViOptions& opts = {});

std::pair<std::vector<double>, ComplementarityReport> solve_reduced_space(const BoxConstrainedSystem& sys,
                                                                          std::span<const double> c0,
                                                                          const ViOptions& opts = {});

// Trust-region Newton for the bound-constrained quadratic program; requires a
// symmetric operator.
std::pair<std::vector<double>, ComplementarityReport> solve_tron(const BoxConstrainedSystem& sys,
                                                                 std::span<const double> c0,
                                                                 const ViOptions& opts = {});

enum class ViSolverKind { None, Clip, Semismooth, ReducedSpace, Tron };
ViSolverKind parse_solver(const std::string& name);  // none|clip|ss|rs|tron
std::string solver_name(ViSolverKind kind);

// Exhaustive oracle for tiny systems: tries every {lower, interior, upper}
// assignment and returns the unique consistent one. Dense linear algebra
// only; independent of the Krylov solvers above.
std::vector<double> brute_force_mcp(const BoxConstrainedSystem& sys, double tol = 1e-10);

ComplementarityReport check_complementarity(const BoxConstrainedSystem& sys, std::span<const double> c,
                                            double tol = 1e-10);

}  // namespace vifem
