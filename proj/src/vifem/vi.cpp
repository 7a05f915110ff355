#include "vifem/vi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace vifem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundTol = 1e-10;  // at-bound membership tolerance

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double merit_of(std::span<const double> phi) {
  double s = 0.0;
  for (double v : phi) s += v * v;
  return 0.5 * s;
}

int count_active(const BoxConstrainedSystem& sys, std::span<const double> c) {
  int n = 0;
  for (int i = 0; i < sys.size(); ++i)
    if ((std::isfinite(sys.lb[i]) && c[i] <= sys.lb[i] + kBoundTol) ||
        (std::isfinite(sys.ub[i]) && c[i] >= sys.ub[i] - kBoundTol))
      ++n;
  return n;
}

void fill_violations(const BoxConstrainedSystem& sys, std::span<const double> c, ComplementarityReport& rep) {
  const auto h = sys.residual(c);
  double bound = 0.0, sign = 0.0;
  for (int i = 0; i < sys.size(); ++i) {
    if (std::isfinite(sys.lb[i])) bound = std::max(bound, sys.lb[i] - c[i]);
    if (std::isfinite(sys.ub[i])) bound = std::max(bound, c[i] - sys.ub[i]);
    const bool at_lo = std::isfinite(sys.lb[i]) && std::abs(c[i] - sys.lb[i]) <= kBoundTol;
    const bool at_up = std::isfinite(sys.ub[i]) && std::abs(c[i] - sys.ub[i]) <= kBoundTol;
    if (at_lo && at_up) continue;
    if (at_lo) sign = std::max(sign, -h[i]);
    else if (at_up) sign = std::max(sign, h[i]);
    else sign = std::max(sign, std::abs(h[i]));
  }
  rep.max_bound_violation = bound;
  rep.max_sign_violation = std::max(sign, 0.0);
  rep.merit = merit_of(fb_residual(sys, c));
}

}  // namespace

void BoxConstrainedSystem::validate() const {
  const int n = size();
  if (k.nrows != n || k.ncols != n) throw std::invalid_argument("box system: K must be square and match f");
  if (static_cast<int>(lb.size()) != n || static_cast<int>(ub.size()) != n)
    throw std::invalid_argument("box system: bounds must match f");
  for (int i = 0; i < n; ++i)
    if (!(lb[i] <= ub[i])) throw std::invalid_argument("box system: lb > ub at index " + std::to_string(i));
}

std::vector<double> BoxConstrainedSystem::residual(std::span<const double> c) const {
  auto h = spmv(k, c);
  for (int i = 0; i < size(); ++i) h[i] -= f[i];
  return h;
}

BoxConstrainedSystem make_box_system(CsrMatrix k, std::vector<double> f, double cmin, double cmax) {
  BoxConstrainedSystem sys;
  const int n = static_cast<int>(f.size());
  sys.k = std::move(k);
  sys.f = std::move(f);
  sys.lb.assign(n, cmin);
  sys.ub.assign(n, cmax);
  sys.validate();
  return sys;
}

double fb(double a, double b) { return std::sqrt(a * a + b * b) - a - b; }

namespace {

// Limiting-element derivatives of fb; (-1,-1) at the kink.
std::pair<double, double> fb_derivatives(double a, double b) {
  const double r = std::sqrt(a * a + b * b);
  if (r < 1e-300) return {-1.0, -1.0};
  return {a / r - 1.0, b / r - 1.0};
}

}  // namespace

std::vector<double> fb_residual(const BoxConstrainedSystem& sys, std::span<const double> c) {
  const auto h = sys.residual(c);
  const int n = sys.size();
  std::vector<double> phi(n);
  for (int i = 0; i < n; ++i) {
    const bool lo = std::isfinite(sys.lb[i]), up = std::isfinite(sys.ub[i]);
    if (lo && !up) phi[i] = fb(c[i] - sys.lb[i], h[i]);
    else if (!lo && up) phi[i] = fb(sys.ub[i] - c[i], -h[i]);
    else if (lo && up && sys.lb[i] < sys.ub[i]) phi[i] = fb(c[i] - sys.lb[i], fb(sys.ub[i] - c[i], -h[i]));
    else if (!lo && !up) phi[i] = -h[i];
    else phi[i] = sys.lb[i] - c[i];  // lb == ub
  }
  return phi;
}

std::vector<double> clip(std::span<const double> c, std::span<const double> lb, std::span<const double> ub) {
  std::vector<double> out(c.size());
  for (size_t i = 0; i < c.size(); ++i) out[i] = std::min(std::max(c[i], lb[i]), ub[i]);
  return out;
}

ViSolverKind parse_solver(const std::string& name) {
  if (name == "none") return ViSolverKind::None;
  if (name == "clip") return ViSolverKind::Clip;
  if (name == "ss") return ViSolverKind::Semismooth;
  if (name == "rs") return ViSolverKind::ReducedSpace;
  if (name == "tron") return ViSolverKind::Tron;
  throw std::invalid_argument("unknown solver '" + name + "' (expected none|clip|ss|rs|tron)");
}

std::string solver_name(ViSolverKind kind) {
  switch (kind) {
    case ViSolverKind::None: return "none";
    case ViSolverKind::Clip: return "clip";
    case ViSolverKind::Semismooth: return "ss";
    case ViSolverKind::ReducedSpace: return "rs";
    case ViSolverKind::Tron: return "tron";
  }
  return "?";
}

namespace {

// Row scaling of the generalized Jacobian J = diag(alpha) + diag(beta) K.
// Pattern is K with a guaranteed diagonal; kmap[p] indexes the K entry that
// backs J entry p (-1 for the inserted diagonal).
struct JacobianWorkspace {
  CsrMatrix j;
  std::vector<int> kmap;

  explicit JacobianWorkspace(const CsrMatrix& k) {
    CooBuilder b(k.nrows, k.ncols);
    for (int i = 0; i < k.nrows; ++i) {
      b.add(i, i, 0.0);
      for (int p = k.row_offsets[i]; p < k.row_offsets[i + 1]; ++p) b.add(i, k.col_indices[p], 0.0);
    }
    j = b.to_csr();
    kmap.assign(j.nnz(), -1);
    for (int i = 0; i < k.nrows; ++i)
      for (int p = k.row_offsets[i]; p < k.row_offsets[i + 1]; ++p)
        kmap[j.find(i, k.col_indices[p])] = p;
  }

  void fill(const CsrMatrix& k, std::span<const double> alpha, std::span<const double> beta) {
    for (int i = 0; i < j.nrows; ++i)
      for (int p = j.row_offsets[i]; p < j.row_offsets[i + 1]; ++p) {
        double v = kmap[p] >= 0 ? beta[i] * k.values[kmap[p]] : 0.0;
        if (j.col_indices[p] == i) v += alpha[i];
        j.values[p] = v;
      }
  }
};

// alpha/beta of the five bound patterns at the current iterate.
void fb_jacobian_rows(const BoxConstrainedSystem& sys, std::span<const double> c, std::span<const double> h,
                      std::span<double> alpha, std::span<double> beta) {
  for (int i = 0; i < sys.size(); ++i) {
    const bool lo = std::isfinite(sys.lb[i]), up = std::isfinite(sys.ub[i]);
    if (lo && !up) {
      const auto [da, db] = fb_derivatives(c[i] - sys.lb[i], h[i]);
      alpha[i] = da;
      beta[i] = db;
    } else if (!lo && up) {
      const auto [da, db] = fb_derivatives(sys.ub[i] - c[i], -h[i]);
      alpha[i] = -da;
      beta[i] = -db;
    } else if (lo && up && sys.lb[i] < sys.ub[i]) {
      const double inner = fb(sys.ub[i] - c[i], -h[i]);
      const auto [dai, dbi] = fb_derivatives(sys.ub[i] - c[i], -h[i]);
      const auto [dao, dbo] = fb_derivatives(c[i] - sys.lb[i], inner);
      alpha[i] = dao - dbo * dai;
      beta[i] = -dbo * dbi;
    } else if (!lo && !up) {
      alpha[i] = 0.0;
      beta[i] = -1.0;
    } else {
      alpha[i] = -1.0;
      beta[i] = 0.0;
    }
  }
}

KrylovOptions inner_options(const ViOptions& opts) {
  KrylovOptions k;
  k.rel_tol = opts.inner_rel_tol;
  k.max_iters = opts.inner_max_iters;
  k.preconditioner = opts.inner_precond;
  return k;
}

std::unique_ptr<Preconditioner> factor_with_shift(CsrMatrix& m, bool* regularized) {
  const double scale = std::max(max_abs_value(m), 1e-30);
  for (double shift : {0.0, 1e-12, 1e-8, 1e-4}) {
    try {
      if (shift > 0.0) {
        for (int i = 0; i < m.nrows; ++i) {
          const int p = m.find(i, i);
          if (p >= 0) m.values[p] += shift * scale;
        }
        if (regularized) *regularized = true;
      }
      return ilu0_factor(m);
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  return std::make_unique<JacobiPreconditioner>(m);
}

bool vi_converged(const ViOptions& opts, double merit, double phi_inf) {
  return merit <= opts.abs_tol && phi_inf <= opts.residual_tol;
}

ComplementarityReport finish_report(const BoxConstrainedSystem& sys, std::span<const double> c,
                                    ComplementarityReport rep, std::chrono::steady_clock::time_point t0) {
  fill_violations(sys, c, rep);
  rep.wall_time = seconds_since(t0);
  return rep;
}

}  // namespace

std::pair<std::vector<double>, ComplementarityReport> solve_semismooth(const BoxConstrainedSystem& sys,
                                                                       std::span<const double> c0,
                                                                       const ViOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  sys.validate();
  const int n = sys.size();
  std::vector<double> c = clip(c0, sys.lb, sys.ub);

  ComplementarityReport rep;
  JacobianWorkspace jw(sys.k);
  std::vector<double> alpha(n), beta(n), rhs(n), zeros(n, 0.0);
  const KrylovOptions inner = inner_options(opts);
  bool regularized = false;

  std::vector<double> phi = fb_residual(sys, c);
  double merit = merit_of(phi);

  for (int it = 0; it < opts.max_outer; ++it) {
    if (vi_converged(opts, merit, norm_inf(phi))) {
      rep.converged = true;
      rep.termination = "converged";
      break;
    }
    const auto h = sys.residual(c);
    fb_jacobian_rows(sys, c, h, alpha, beta);
    jw.fill(sys.k, alpha, beta);

    auto precond = opts.inner_precond == PrecondKind::Ilu0 ? factor_with_shift(jw.j, &regularized)
                                                            : make_preconditioner(opts.inner_precond, jw.j);
    for (int i = 0; i < n; ++i) rhs[i] = -phi[i];
    auto [d, krep] = gmres_solve(jw.j, rhs, zeros, inner, precond.get());
    rep.inner_krylov_total += krep.iterations;

    // directional derivative of the merit along d
    auto jd = spmv(jw.j, d);
    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += phi[i] * jd[i];
    if (!(slope < 0.0)) {
      // fall back to the steepest-descent direction of the merit
      const CsrMatrix jt = transpose(jw.j);
      d = spmv(jt, phi);
      for (double& v : d) v = -v;
      jd = spmv(jw.j, d);
      slope = 0.0;
      for (int i = 0; i < n; ++i) slope += phi[i] * jd[i];
      if (!(slope < 0.0)) {
        rep.termination = "stationary_nondescent";
        break;
      }
    }

    // projected Armijo line search keeps the iterate inside the box
    double step = 1.0;
    bool accepted = false;
    while (step >= opts.min_step) {
      std::vector<double> trial(n);
      for (int i = 0; i < n; ++i) trial[i] = c[i] + step * d[i];
      trial = clip(trial, sys.lb, sys.ub);
      const auto phi_t = fb_residual(sys, trial);
      const double merit_t = merit_of(phi_t);
      if (merit_t <= merit + opts.armijo_slope * step * slope) {
        c = std::move(trial);
        phi = phi_t;
        merit = merit_t;
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    rep.outer_iterations = it + 1;
    rep.trace.push_back({it + 1, merit, accepted ? step : 0.0, count_active(sys, c)});
    if (!accepted) {
      rep.termination = "line_search_failure";
      break;
    }
  }
  if (rep.termination.empty())
    rep.termination = vi_converged(opts, merit, norm_inf(phi)) ? "converged" : "max_outer";
  rep.converged = rep.termination == "converged";
  if (regularized) rep.termination += "+regularized";
  return {c, finish_report(sys, c, std::move(rep), t0)};
}

std::pair<std::vector<double>, ComplementarityReport> solve_reduced_space(const BoxConstrainedSystem& sys,
                                                                          std::span<const double> c0,
                                                                          const ViOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  sys.validate();
  const int n = sys.size();
  std::vector<double> c = clip(c0, sys.lb, sys.ub);

  ComplementarityReport rep;
  const bool symmetric = is_symmetric(sys.k, 1e-10);
  const KrylovOptions inner = inner_options(opts);

  std::map<std::vector<char>, int> visited;
  int forced_steps = 0;

  for (int it = 0; it < opts.max_outer; ++it) {
    const auto phi = fb_residual(sys, c);
    const double merit = merit_of(phi);
    if (vi_converged(opts, merit, norm_inf(phi))) {
      rep.converged = true;
      rep.termination = "converged";
      break;
    }

    // active set: at a bound with the residual pushing outward
    const auto h = sys.residual(c);
    std::vector<char> active(n, 0);
    std::vector<int> reduced_index(n, -1);
    int n_inactive = 0;
    for (int i = 0; i < n; ++i) {
      const bool at_lo = std::isfinite(sys.lb[i]) && c[i] <= sys.lb[i] + kBoundTol;
      const bool at_up = std::isfinite(sys.ub[i]) && c[i] >= sys.ub[i] - kBoundTol;
      if ((at_lo && h[i] > 0.0) || (at_up && h[i] < 0.0)) active[i] = 1;
      else reduced_index[i] = n_inactive++;
    }
    // the final active set legitimately repeats while the inexact inner
    // solves polish the solution, so the cycling cap is generous
    if (++visited[active] > 40) {
      rep.termination = "cycling";
      break;
    }
    if (n_inactive == 0) {
      rep.termination = "all_active_stall";
      break;
    }

    const CsrMatrix kred = extract_submatrix(sys.k, reduced_index, n_inactive);
    std::vector<double> rhs(n_inactive), zred(n_inactive, 0.0);
    for (int i = 0; i < n; ++i)
      if (reduced_index[i] >= 0) rhs[reduced_index[i]] = -h[i];

    std::vector<double> dred;
    try {
      auto precond = make_preconditioner(opts.inner_precond, kred);
      auto [sol, krep] =
          symmetric ? cg_solve(kred, rhs, zred, inner, precond.get()) : gmres_solve(kred, rhs, zred, inner, precond.get());
      dred = std::move(sol);
      rep.inner_krylov_total += krep.iterations;
    } catch (const std::runtime_error&) {
      // retry unpreconditioned before giving up
      auto [sol, krep] = gmres_solve(kred, rhs, zred, inner);
      dred = std::move(sol);
      rep.inner_krylov_total += krep.iterations;
    }

    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (reduced_index[i] >= 0) d[i] = dred[reduced_index[i]];

    // projected line search on the merit; a non-decreasing full step is still
    // taken occasionally so a changing active set can make progress
    double step = 1.0;
    bool accepted = false;
    std::vector<double> full_trial;
    while (step >= opts.min_step) {
      std::vector<double> trial(n);
      for (int i = 0; i < n; ++i) trial[i] = c[i] + step * d[i];
      trial = clip(trial, sys.lb, sys.ub);
      if (step == 1.0) full_trial = trial;
      if (merit_of(fb_residual(sys, trial)) < merit) {
        c = std::move(trial);
        accepted = true;
        forced_steps = 0;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      if (++forced_steps > 3) {
        rep.termination = "line_search_failure";
        break;
      }
      c = std::move(full_trial);
      step = 1.0;
    }
    rep.outer_iterations = it + 1;
    rep.trace.push_back({it + 1, merit_of(fb_residual(sys, c)), step, count_active(sys, c)});
  }
  if (rep.termination.empty()) {
    const auto phi = fb_residual(sys, c);
    rep.termination = vi_converged(opts, merit_of(phi), norm_inf(phi)) ? "converged" : "max_outer";
  }
  rep.converged = rep.termination == "converged";
  return {c, finish_report(sys, c, std::move(rep), t0)};
}

namespace {

double quadratic_objective(const BoxConstrainedSystem& sys, std::span<const double> c) {
  const auto kc = spmv(sys.k, c);
  double q = 0.0;
  for (int i = 0; i < sys.size(); ++i) q += 0.5 * c[i] * kc[i] - c[i] * sys.f[i];
  return q;
}

// Steihaug truncated CG on the free block: minimizes g'd + d'Kd/2 within the
// trust radius. Returns the step in reduced coordinates.
std::vector<double> steihaug_cg(const CsrMatrix& kred, std::span<const double> g, double radius, double rel_tol,
                                int max_iters, long* iters) {
  const int m = static_cast<int>(g.size());
  std::vector<double> d(m, 0.0), r(m), p(m), kp(m);
  for (int i = 0; i < m; ++i) r[i] = -g[i];
  const double r0 = norm2(r);
  if (r0 == 0.0) return d;
  p = r;
  for (int it = 0; it < max_iters; ++it) {
    if (iters) ++(*iters);
    spmv(kred, p, kp);
    const double pkp = dot(p, kp);
    auto to_boundary = [&](double extra_sign) {
      // tau >= 0 with ||d + tau p|| = radius
      const double dd = dot(d, d), dp = dot(d, p), pp = dot(p, p);
      const double disc = std::max(0.0, dp * dp + pp * (radius * radius - dd));
      return (-dp + extra_sign * std::sqrt(disc)) / pp;
    };
    if (pkp <= 0.0) {
      const double tau = to_boundary(1.0);
      axpy(tau, p, d);
      return d;
    }
    const double rr = dot(r, r);
    const double alpha = rr / pkp;
    std::vector<double> d_next = d;
    axpy(alpha, p, d_next);
    if (norm2(d_next) >= radius) {
      const double tau = to_boundary(1.0);
      axpy(tau, p, d);
      return d;
    }
    d = std::move(d_next);
    axpy(-alpha, kp, r);
    if (norm2(r) <= rel_tol * r0) return d;
    const double beta = dot(r, r) / rr;
    for (int i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
  }
  return d;
}

}  // namespace

std::pair<std::vector<double>, ComplementarityReport> solve_tron(const BoxConstrainedSystem& sys,
                                                                 std::span<const double> c0,
                                                                 const ViOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  sys.validate();
  if (!is_symmetric(sys.k, 1e-10))
    throw std::invalid_argument("solve_tron: operator must be symmetric (minimization form)");
  const int n = sys.size();
  std::vector<double> c = clip(c0, sys.lb, sys.ub);

  ComplementarityReport rep;
  auto grad = [&](std::span<const double> x) { return sys.residual(x); };

  std::vector<double> g = grad(c);
  std::vector<double> pg(n);
  for (int i = 0; i < n; ++i) pg[i] = c[i] - std::min(std::max(c[i] - g[i], sys.lb[i]), sys.ub[i]);
  double radius = std::max(norm2(pg), 1e-12);
  double cauchy_step = 1.0;

  for (int it = 0; it < opts.max_outer; ++it) {
    const auto phi = fb_residual(sys, c);
    const double merit = merit_of(phi);
    if (vi_converged(opts, merit, norm_inf(phi))) {
      rep.converged = true;
      rep.termination = "converged";
      break;
    }
    if (radius < 1e-16 * std::max(1.0, norm2(c))) {
      rep.termination = "trust_region_collapse";
      break;
    }

    g = grad(c);
    const double qc = quadratic_objective(sys, c);

    // gradient-projection (Cauchy) step with sufficient decrease
    double t = cauchy_step;
    std::vector<double> cc;
    for (int tries = 0; tries < 60; ++tries) {
      std::vector<double> cand(n);
      for (int i = 0; i < n; ++i) cand[i] = c[i] - t * g[i];
      cand = clip(cand, sys.lb, sys.ub);
      double gstep = 0.0, len2 = 0.0;
      for (int i = 0; i < n; ++i) {
        gstep += g[i] * (cand[i] - c[i]);
        len2 += (cand[i] - c[i]) * (cand[i] - c[i]);
      }
      if (std::sqrt(len2) <= radius && quadratic_objective(sys, cand) <= qc + 0.1 * gstep) {
        cc = std::move(cand);
        break;
      }
      t *= 0.5;
    }
    if (cc.empty()) cc = c;  // no usable Cauchy step at this radius
    cauchy_step = std::min(std::max(2.0 * t, 1e-10), 1e10);

    // free variables strictly inside the box at the Cauchy point
    std::vector<int> reduced_index(n, -1);
    int m = 0;
    for (int i = 0; i < n; ++i) {
      const bool at_lo = std::isfinite(sys.lb[i]) && cc[i] <= sys.lb[i] + kBoundTol;
      const bool at_up = std::isfinite(sys.ub[i]) && cc[i] >= sys.ub[i] - kBoundTol;
      if (!at_lo && !at_up) reduced_index[i] = m++;
    }

    std::vector<double> trial = cc;
    double q_model = quadratic_objective(sys, cc);
    if (m > 0) {
      const CsrMatrix kred = extract_submatrix(sys.k, reduced_index, m);
      const auto gc = grad(cc);
      std::vector<double> gred(m);
      for (int i = 0; i < n; ++i)
        if (reduced_index[i] >= 0) gred[reduced_index[i]] = gc[i];
      const auto dred =
          steihaug_cg(kred, gred, radius, opts.inner_rel_tol, opts.inner_max_iters, &rep.inner_krylov_total);
      std::vector<double> unclipped = cc;
      for (int i = 0; i < n; ++i)
        if (reduced_index[i] >= 0) unclipped[i] += dred[reduced_index[i]];
      q_model = quadratic_objective(sys, unclipped);
      trial = clip(unclipped, sys.lb, sys.ub);
    }

    const double pred = qc - q_model;
    const double actual = qc - quadratic_objective(sys, trial);
    double step_len = 0.0;
    for (int i = 0; i < n; ++i) step_len += (trial[i] - c[i]) * (trial[i] - c[i]);
    step_len = std::sqrt(step_len);

    // once the reduction drops below the rounding floor of q the ratio test
    // is noise; take the step, the merit test decides convergence
    const double q_floor = 1e-13 * (std::abs(qc) + std::abs(q_model) + 1.0);
    const double ratio = pred > 0.0 ? actual / pred : (actual > 0.0 ? 1.0 : -1.0);
    if ((pred <= q_floor && actual >= -q_floor) || (ratio >= 0.1 && actual >= 0.0)) {
      c = trial;
      if (ratio >= 0.75 && step_len >= 0.99 * radius) radius *= 2.0;
    } else {
      radius = 0.25 * std::max(step_len, 0.25 * radius);
    }
    rep.outer_iterations = it + 1;
    rep.trace.push_back({it + 1, merit_of(fb_residual(sys, c)), step_len, count_active(sys, c)});
  }
  if (rep.termination.empty()) {
    const auto phi = fb_residual(sys, c);
    rep.termination = vi_converged(opts, merit_of(phi), norm_inf(phi)) ? "converged" : "max_outer";
  }
  rep.converged = rep.termination == "converged";
  return {c, finish_report(sys, c, std::move(rep), t0)};
}

std::vector<double> brute_force_mcp(const BoxConstrainedSystem& sys, double tol) {
  sys.validate();
  const int n = sys.size();
  if (n > 12) throw std::invalid_argument("brute_force_mcp: limited to n <= 12");

  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;

  std::vector<std::vector<double>> solutions;
  std::vector<int> state(n);
  const double scale = std::max(1.0, norm_inf(sys.f));

  for (long code = 0; code < total; ++code) {
    long rem = code;
    bool feasible_assignment = true;
    for (int i = 0; i < n; ++i) {
      state[i] = rem % 3;  // 0 lower, 1 interior, 2 upper
      rem /= 3;
      if (state[i] == 0 && !std::isfinite(sys.lb[i])) feasible_assignment = false;
      if (state[i] == 2 && !std::isfinite(sys.ub[i])) feasible_assignment = false;
    }
    if (!feasible_assignment) continue;

    std::vector<double> c(n, 0.0);
    std::vector<int> free_ix;
    for (int i = 0; i < n; ++i) {
      if (state[i] == 0) c[i] = sys.lb[i];
      else if (state[i] == 2) c[i] = sys.ub[i];
      else free_ix.push_back(i);
    }
    const int m = static_cast<int>(free_ix.size());
    if (m > 0) {
      std::vector<double> a(m * m), b(m);
      for (int r = 0; r < m; ++r) {
        const int i = free_ix[r];
        double rhs = sys.f[i];
        for (int p = sys.k.row_offsets[i]; p < sys.k.row_offsets[i + 1]; ++p) {
          const int jcol = sys.k.col_indices[p];
          auto it = std::lower_bound(free_ix.begin(), free_ix.end(), jcol);
          if (it != free_ix.end() && *it == jcol) a[r * m + (it - free_ix.begin())] = sys.k.values[p];
          else rhs -= sys.k.values[p] * c[jcol];
        }
        b[r] = rhs;
      }
      if (!dense_solve_inplace(a, b, m)) continue;
      for (int r = 0; r < m; ++r) c[free_ix[r]] = b[r];
    }

    const auto h = sys.residual(c);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      switch (state[i]) {
        case 0: ok = h[i] >= -tol * scale; break;
        case 2: ok = h[i] <= tol * scale; break;
        default: ok = c[i] >= sys.lb[i] - tol && c[i] <= sys.ub[i] + tol; break;
      }
    }
    if (!ok) continue;

    bool duplicate = false;
    for (const auto& s : solutions) {
      double diff = 0.0;
      for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(s[i] - c[i]));
      if (diff <= 1e-8 * std::max(1.0, norm_inf(s))) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) solutions.push_back(std::move(c));
  }

  if (solutions.empty()) throw std::runtime_error("brute_force_mcp: no consistent active-set assignment");
  if (solutions.size() > 1) throw std::runtime_error("brute_force_mcp: multiple distinct solutions found");
  return solutions.front();
}

ComplementarityReport check_complementarity(const BoxConstrainedSystem& sys, std::span<const double> c,
                                            double tol) {
  ComplementarityReport rep;
  fill_violations(sys, c, rep);
  rep.converged = rep.merit <= tol;
  rep.termination = "check";
  return rep;
}

}  // namespace vifem
