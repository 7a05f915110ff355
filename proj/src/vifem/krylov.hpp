#pragma once

#include <functional>
#include <memory>
#include <string>

#include "vifem/csr.hpp"

namespace vifem {

enum class PrecondKind { None, Jacobi, Ilu0 };

enum class Termination {
  ConvergedRel,
  ConvergedAbs,
  MaxIterations,
  Stagnated,
  Breakdown,
};

struct KrylovOptions {
  double rel_tol = 1e-7;
  double abs_tol = 1e-50;
  int max_iters = 10000;
  int restart = 30;  // GMRES only
  PrecondKind preconditioner = PrecondKind::None;
};

struct SolveReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  Termination termination = Termination::MaxIterations;
  std::vector<double> residual_history;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& a);
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  std::vector<double> inv_diag_;
};

// Incomplete LU with zero fill: the factors keep exactly the sparsity of A,
// so application is an exact solve for triangular and diagonal matrices.
class Ilu0Preconditioner final : public Preconditioner {
 public:
  explicit Ilu0Preconditioner(const CsrMatrix& a);
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  CsrMatrix lu_;
  std::vector<int> diag_pos_;
};

std::unique_ptr<Preconditioner> make_preconditioner(PrecondKind kind, const CsrMatrix& a);
std::unique_ptr<Preconditioner> ilu0_factor(const CsrMatrix& a);

struct BreakdownError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Preconditioned conjugate gradients. Requires a symmetric matrix (checked to
// 1e-10 relative) with positive-definite behaviour along the search
// directions; indefiniteness raises BreakdownError.
std::pair<std::vector<double>, SolveReport> cg_solve(const CsrMatrix& a, std::span<const double> b,
                                                     std::span<const double> x0, const KrylovOptions& opts,
                                                     const Preconditioner* precond = nullptr);

// Restarted GMRES with right preconditioning; residual norms in the report are
// true residuals of the original system.
std::pair<std::vector<double>, SolveReport> gmres_solve(const CsrMatrix& a, std::span<const double> b,
                                                        std::span<const double> x0, const KrylovOptions& opts,
                                                        const Preconditioner* precond = nullptr);

// Flexible GMRES over a user-supplied operator, used for block systems whose
// preconditioner is itself an inner iteration.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;
std::pair<std::vector<double>, SolveReport> fgmres_solve(const LinearOperator& op, int n,
                                                         std::span<const double> b, std::span<const double> x0,
                                                         const KrylovOptions& opts,
                                                         const LinearOperator& precond);

}  // namespace vifem
