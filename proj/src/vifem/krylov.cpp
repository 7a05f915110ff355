#include "vifem/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vifem {

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& a) {
  inv_diag_.resize(a.nrows);
  for (int i = 0; i < a.nrows; ++i) {
    const double d = a.at(i, i);
    if (d == 0.0) throw std::runtime_error("Jacobi preconditioner: zero diagonal at row " + std::to_string(i));
    inv_diag_[i] = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

Ilu0Preconditioner::Ilu0Preconditioner(const CsrMatrix& a) {
  if (a.nrows != a.ncols) throw std::invalid_argument("ILU(0): matrix must be square");
  lu_ = a;
  diag_pos_.assign(a.nrows, -1);
  for (int i = 0; i < a.nrows; ++i) diag_pos_[i] = lu_.find(i, i);

  // IKJ variant restricted to the pattern of A.
  for (int i = 0; i < lu_.nrows; ++i) {
    for (int kk = lu_.row_offsets[i]; kk < lu_.row_offsets[i + 1]; ++kk) {
      const int k = lu_.col_indices[kk];
      if (k >= i) break;
      if (diag_pos_[k] < 0 || lu_.values[diag_pos_[k]] == 0.0)
        throw std::runtime_error("ILU(0): zero pivot at row " + std::to_string(k));
      const double factor = lu_.values[kk] / lu_.values[diag_pos_[k]];
      lu_.values[kk] = factor;
      for (int jj = kk + 1; jj < lu_.row_offsets[i + 1]; ++jj) {
        const int pos = lu_.find(k, lu_.col_indices[jj]);
        if (pos >= 0) lu_.values[jj] -= factor * lu_.values[pos];
      }
    }
    if (diag_pos_[i] < 0 || lu_.values[diag_pos_[i]] == 0.0)
      throw std::runtime_error("ILU(0): zero pivot at row " + std::to_string(i));
  }
}

void Ilu0Preconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const int n = lu_.nrows;
  // L z = r (unit lower triangular)
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int k = lu_.row_offsets[i]; k < lu_.row_offsets[i + 1] && lu_.col_indices[k] < i; ++k)
      s -= lu_.values[k] * z[lu_.col_indices[k]];
    z[i] = s;
  }
  // U z = z
  for (int i = n - 1; i >= 0; --i) {
    double s = z[i];
    for (int k = lu_.row_offsets[i + 1] - 1; k >= lu_.row_offsets[i] && lu_.col_indices[k] > i; --k)
      s -= lu_.values[k] * z[lu_.col_indices[k]];
    z[i] = s / lu_.values[diag_pos_[i]];
  }
}

std::unique_ptr<Preconditioner> make_preconditioner(PrecondKind kind, const CsrMatrix& a) {
  switch (kind) {
    case PrecondKind::None: return std::make_unique<IdentityPreconditioner>();
    case PrecondKind::Jacobi: return std::make_unique<JacobiPreconditioner>(a);
    case PrecondKind::Ilu0: return std::make_unique<Ilu0Preconditioner>(a);
  }
  return nullptr;
}

std::unique_ptr<Preconditioner> ilu0_factor(const CsrMatrix& a) { return std::make_unique<Ilu0Preconditioner>(a); }

std::pair<std::vector<double>, SolveReport> cg_solve(const CsrMatrix& a, std::span<const double> b,
                                                     std::span<const double> x0, const KrylovOptions& opts,
                                                     const Preconditioner* precond) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.nrows != a.ncols || static_cast<int>(b.size()) != a.nrows)
    throw std::invalid_argument("cg_solve: dimension mismatch");
  if (!is_symmetric(a, 1e-10)) throw std::invalid_argument("cg_solve: matrix is not symmetric");

  std::unique_ptr<Preconditioner> owned;
  if (!precond) {
    owned = make_preconditioner(opts.preconditioner, a);
    precond = owned.get();
  }

  const int n = a.nrows;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> r(n), z(n), p(n), ap(n);
  spmv(a, x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];

  const double bnorm = norm2(b);
  const double target = std::max(opts.rel_tol * bnorm, opts.abs_tol);

  SolveReport rep;
  double rnorm = norm2(r);
  rep.residual_history.push_back(rnorm);
  if (rnorm <= target) {
    rep.converged = true;
    rep.termination = rnorm <= opts.rel_tol * bnorm ? Termination::ConvergedRel : Termination::ConvergedAbs;
    rep.final_residual_norm = rnorm;
    rep.wall_time = seconds_since(t0);
    return {x, rep};
  }

  precond->apply(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < opts.max_iters; ++it) {
    spmv(a, p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) throw BreakdownError("cg_solve: operator not positive-definite (p^T A p <= 0)");
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    rnorm = norm2(r);
    rep.residual_history.push_back(rnorm);
    rep.iterations = it + 1;
    if (rnorm <= target) {
      rep.converged = true;
      rep.termination = rnorm <= opts.rel_tol * bnorm ? Termination::ConvergedRel : Termination::ConvergedAbs;
      break;
    }
    precond->apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.final_residual_norm = rnorm;
  rep.wall_time = seconds_since(t0);
  return {x, rep};
}

namespace {

// Shared GMRES driver. When `flexible` the preconditioned vectors are stored
// so the preconditioner may change between applications.
std::pair<std::vector<double>, SolveReport> gmres_impl(const LinearOperator& op, int n,
                                                       std::span<const double> b, std::span<const double> x0,
                                                       const KrylovOptions& opts, const LinearOperator& precond,
                                                       bool flexible) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = std::max(1, opts.restart);
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> r(n), w(n);

  const double bnorm = norm2(b);
  const double target = std::max(opts.rel_tol * bnorm, opts.abs_tol);

  SolveReport rep;
  int total_it = 0;
  double prev_cycle_res = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> z(flexible ? m : 1, std::vector<double>(n));
  std::vector<double> h((m + 1) * m, 0.0), cs(m), sn(m), g(m + 1);

  while (true) {
    op(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = norm2(r);
    if (rep.residual_history.empty()) rep.residual_history.push_back(beta);
    if (beta <= target) {
      rep.converged = true;
      rep.termination = beta <= opts.rel_tol * bnorm ? Termination::ConvergedRel : Termination::ConvergedAbs;
      rep.final_residual_norm = beta;
      break;
    }
    if (total_it >= opts.max_iters) {
      rep.termination = Termination::MaxIterations;
      rep.final_residual_norm = beta;
      break;
    }
    if (beta > prev_cycle_res * (1.0 - 1e-12)) {
      rep.termination = Termination::Stagnated;
      rep.final_residual_norm = beta;
      break;
    }
    prev_cycle_res = beta;

    for (int i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::fill(h.begin(), h.end(), 0.0);

    int k = 0;
    for (; k < m && total_it < opts.max_iters; ++k, ++total_it) {
      std::vector<double>& zk = flexible ? z[k] : z[0];
      precond(v[k], zk);
      op(zk, w);
      // modified Gram-Schmidt
      for (int i = 0; i <= k; ++i) {
        const double hik = dot(w, v[i]);
        h[i * m + k] = hik;
        axpy(-hik, v[i], w);
      }
      const double hk1 = norm2(w);
      if (hk1 > 0.0)
        for (int i = 0; i < n; ++i) v[k + 1][i] = w[i] / hk1;
      // apply stored Givens rotations
      for (int i = 0; i < k; ++i) {
        const double t1 = cs[i] * h[i * m + k] + sn[i] * h[(i + 1) * m + k];
        const double t2 = -sn[i] * h[i * m + k] + cs[i] * h[(i + 1) * m + k];
        h[i * m + k] = t1;
        h[(i + 1) * m + k] = t2;
      }
      const double denom = std::hypot(h[k * m + k], hk1);
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = h[k * m + k] / denom;
        sn[k] = hk1 / denom;
      }
      h[k * m + k] = cs[k] * h[k * m + k] + sn[k] * hk1;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      rep.residual_history.push_back(std::abs(g[k + 1]));
      if (std::abs(g[k + 1]) <= target || hk1 == 0.0) {
        ++k;
        ++total_it;
        break;
      }
    }

    // y = H^{-1} g, then x += sum z_i y_i (flexible) or M^{-1} V y.
    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[i * m + j] * y[j];
      y[i] = s / h[i * m + i];
    }
    if (flexible) {
      for (int i = 0; i < k; ++i) axpy(y[i], z[i], x);
    } else {
      std::vector<double> vy(n, 0.0);
      for (int i = 0; i < k; ++i) axpy(y[i], v[i], vy);
      precond(vy, w);
      axpy(1.0, w, x);
    }
  }
  rep.iterations = total_it;
  rep.wall_time = seconds_since(t0);
  return {x, rep};
}

}  // namespace

std::pair<std::vector<double>, SolveReport> gmres_solve(const CsrMatrix& a, std::span<const double> b,
                                                        std::span<const double> x0, const KrylovOptions& opts,
                                                        const Preconditioner* precond) {
  if (a.nrows != a.ncols || static_cast<int>(b.size()) != a.nrows)
    throw std::invalid_argument("gmres_solve: dimension mismatch");
  std::unique_ptr<Preconditioner> owned;
  if (!precond) {
    owned = make_preconditioner(opts.preconditioner, a);
    precond = owned.get();
  }
  const LinearOperator op = [&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); };
  const LinearOperator pc = [precond](std::span<const double> in, std::span<double> out) {
    precond->apply(in, out);
  };
  return gmres_impl(op, a.nrows, b, x0, opts, pc, false);
}

std::pair<std::vector<double>, SolveReport> fgmres_solve(const LinearOperator& op, int n,
                                                         std::span<const double> b, std::span<const double> x0,
                                                         const KrylovOptions& opts,
                                                         const LinearOperator& precond) {
  return gmres_impl(op, n, b, x0, opts, precond, true);
}

}  // namespace vifem
