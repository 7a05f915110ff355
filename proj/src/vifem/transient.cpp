#include "vifem/transient.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "vifem/elements.hpp"

namespace vifem {

double viscosity(double concentration, const MiscibleConfig& cfg) {
  switch (cfg.viscosity_model) {
    case 1: return cfg.mu0 * std::exp(cfg.log_mobility * concentration);
    case 2: return cfg.mu0 * std::exp(cfg.log_mobility * (1.0 - concentration));
  }
  throw std::invalid_argument("viscosity: model must be 1 or 2");
}

std::vector<double> lognormal_cell_field(int nx, int ny, double k0, double sigma, double corr_cells,
                                         unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> g(static_cast<size_t>(nx) * ny);
  for (double& v : g) v = gauss(rng);

  // three box-filter passes approximate a Gaussian of the requested width
  const int radius = std::max(0, static_cast<int>(std::lround(corr_cells)));
  std::vector<double> tmp(g.size());
  for (int pass = 0; pass < 3 && radius > 0; ++pass) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        int cnt = 0;
        for (int di = -radius; di <= radius; ++di) {
          const int ii = i + di;
          if (ii < 0 || ii >= nx) continue;
          s += g[static_cast<size_t>(j) * nx + ii];
          ++cnt;
        }
        tmp[static_cast<size_t>(j) * nx + i] = s / cnt;
      }
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        int cnt = 0;
        for (int dj = -radius; dj <= radius; ++dj) {
          const int jj = j + dj;
          if (jj < 0 || jj >= ny) continue;
          s += tmp[static_cast<size_t>(jj) * nx + i];
          ++cnt;
        }
        g[static_cast<size_t>(j) * nx + i] = s / cnt;
      }
  }
  // rescale to unit variance so sigma keeps its meaning after smoothing
  double mean = 0.0, var = 0.0;
  for (double v : g) mean += v;
  mean /= g.size();
  for (double v : g) var += (v - mean) * (v - mean);
  var = var / g.size();
  const double scale = var > 0 ? 1.0 / std::sqrt(var) : 1.0;
  std::vector<double> k(g.size());
  for (size_t i = 0; i < g.size(); ++i) k[i] = k0 * std::exp(sigma * scale * (g[i] - mean));
  return k;
}

MiscibleConfig MiscibleConfig::from_config(const Config& c) {
  MiscibleConfig m;
  m.mu0 = c.get_double("mu0", m.mu0);
  m.log_mobility = c.get_double("R_c", m.log_mobility);
  m.density = c.get_double("rho", m.density);
  m.alpha_l = c.get_double("alpha_l", m.alpha_l);
  m.alpha_t = c.get_double("alpha_t", m.alpha_t);
  m.alpha_d = c.get_double("alpha_d", m.alpha_d);
  m.dt = c.get_double("dt", m.dt);
  m.t_end = c.get_double("t_end", m.t_end);
  m.viscosity_model = c.get_int("viscosity_model", m.viscosity_model);
  const std::string perm = c.get_string("permeability", "lognormal");
  if (perm == "constant") m.perm_kind = PermeabilityKind::Constant;
  else if (perm == "lognormal") m.perm_kind = PermeabilityKind::LogNormal;
  else throw std::runtime_error("permeability must be constant or lognormal");
  m.perm_k0 = c.get_double("perm_k0", m.perm_k0);
  m.perm_seed = static_cast<unsigned>(c.get_int("perm_seed", static_cast<int>(m.perm_seed)));
  m.perm_sigma = c.get_double("perm_sigma", m.perm_sigma);
  m.perm_corr_len = c.get_double("perm_corr_len", m.perm_corr_len);
  m.domain_x = c.get_double("domain_x", m.domain_x);
  m.domain_y = c.get_double("domain_y", m.domain_y);
  m.nx = c.get_int("nx", m.nx);
  m.ny = c.get_int("ny", m.ny);
  m.cmin = c.get_double("cmin", m.cmin);
  m.cmax = c.get_double("cmax", m.cmax);
  m.pressure_in = c.get_double("pressure_in", m.pressure_in);
  m.pressure_out = c.get_double("pressure_out", m.pressure_out);
  m.body_force[0] = c.get_double("body_force_x", 0.0);
  m.body_force[1] = c.get_double("body_force_y", 0.0);
  m.initial_concentration = c.get_double("initial_concentration", m.initial_concentration);
  m.solver = parse_solver(c.get_string("solver", "rs"));
  m.vtk_every = c.get_int("vtk_every", m.vtk_every);
  m.output_dir = c.get_string("output_dir", m.output_dir);
  if (m.dt <= 0) throw std::runtime_error("dt must be positive");
  if (m.t_end < m.dt) throw std::runtime_error("t_end must be at least dt");
  if (m.log_mobility < 0) throw std::runtime_error("R_c must be non-negative");
  return m;
}

Config MiscibleConfig::to_config() const {
  Config c;
  c.set("mu0", std::to_string(mu0));
  c.set("R_c", std::to_string(log_mobility));
  c.set("rho", std::to_string(density));
  c.set("alpha_l", std::to_string(alpha_l));
  c.set("alpha_t", std::to_string(alpha_t));
  c.set("alpha_d", std::to_string(alpha_d));
  c.set("dt", std::to_string(dt));
  c.set("t_end", std::to_string(t_end));
  c.set("viscosity_model", std::to_string(viscosity_model));
  c.set("permeability", perm_kind == PermeabilityKind::Constant ? "constant" : "lognormal");
  c.set("perm_k0", std::to_string(perm_k0));
  c.set("perm_seed", std::to_string(perm_seed));
  c.set("perm_sigma", std::to_string(perm_sigma));
  c.set("perm_corr_len", std::to_string(perm_corr_len));
  c.set("domain_x", std::to_string(domain_x));
  c.set("domain_y", std::to_string(domain_y));
  c.set("nx", std::to_string(nx));
  c.set("ny", std::to_string(ny));
  c.set("cmin", std::to_string(cmin));
  c.set("cmax", std::to_string(cmax));
  c.set("pressure_in", std::to_string(pressure_in));
  c.set("pressure_out", std::to_string(pressure_out));
  c.set("solver", solver_name(solver));
  return c;
}

MiscibleDriver::MiscibleDriver(const MiscibleConfig& cfg) : cfg_(cfg) {
  mesh_ = build_structured_quad_mesh(cfg.nx, cfg.ny, {0, 0, cfg.domain_x, cfg.domain_y});
  space_ = make_space(mesh_, SpaceKind::DG1);
  if (cfg.perm_kind == PermeabilityKind::Constant) {
    cell_perm_.assign(mesh_.cell_count(), cfg.perm_k0);
  } else {
    const double hx = cfg.domain_x / cfg.nx;
    cell_perm_ = lognormal_cell_field(cfg.nx, cfg.ny, cfg.perm_k0, cfg.perm_sigma, cfg.perm_corr_len / hx,
                                      cfg.perm_seed);
  }
  mass_ = assemble_dg_mass(space_);
}

TransientState MiscibleDriver::initial_state() const {
  TransientState st;
  st.concentration.assign(space_.dof_count, cfg_.initial_concentration);
  return st;
}

StepStats MiscibleDriver::step(TransientState& state) const {
  const auto t0 = std::chrono::steady_clock::now();
  StepStats stats;
  stats.step = state.step + 1;
  stats.time = state.time + cfg_.dt;

  // flow solve with viscosity from the current concentration
  const std::vector<double>& c_prev = state.concentration;
  DarcyFields fields;
  const auto* perm = &cell_perm_;
  fields.permeability = [perm](const EvalPoint& p) { return (*perm)[p.cell]; };
  const MiscibleConfig* cfg = &cfg_;
  const FunctionSpace* space = &space_;
  fields.viscosity = [cfg, space, &c_prev](const EvalPoint& p) {
    double n[kMaxCellNodes];
    shape_values(space->mesh->kind, p.ref, n);
    double c = 0.0;
    for (int a = 0; a < space->dofs_per_cell(); ++a) c += n[a] * c_prev[space->cell_dof(p.cell, a)];
    return viscosity(c, *cfg);
  };
  fields.density = cfg_.density;
  fields.body_force = cfg_.body_force;
  fields.pressure_tags = {1, 2};
  const double p_in = cfg_.pressure_in, p_out = cfg_.pressure_out, lx = cfg_.domain_x;
  fields.pressure_value = [p_in, p_out, lx](const EvalPoint& p) { return p.x[0] < 0.5 * lx ? p_in : p_out; };
  fields.normal_velocity_tags = {3, 4};
  fields.normal_velocity_value = constant_field(0.0);

  const DarcyBlockSystem flow = assemble_rt0_darcy(mesh_, fields);
  const DarcySolution darcy = solve_darcy_schur(flow);
  if (!darcy.report.converged)
    throw std::runtime_error("miscible step " + std::to_string(stats.step) + ": Darcy solve failed (" +
                             std::to_string(darcy.report.final_residual_norm) + ")");
  stats.darcy_iterations = darcy.report.iterations;
  state.darcy_velocity = darcy.velocity;

  // transport operator: dispersion built from the cell-average velocity, the
  // advective face terms use the single-valued RT0 face flux
  auto vcell = std::make_shared<std::vector<Vec3>>(cell_velocity(darcy.velocity, flow));
  VectorField velocity;
  velocity.value = [vcell](const EvalPoint& p) { return (*vcell)[p.cell]; };
  const DiffusivityField d = dispersion_field(velocity, cfg_.alpha_l, cfg_.alpha_t, cfg_.alpha_d, 2);

  DgOptions dg_opts;
  RawSystem raw = assemble_dg_raw(space_, d, velocity, constant_field(0.0), dg_opts);

  // backward Euler: (M/dt + K) c = M c_prev / dt
  CsrMatrix k_sys;
  {
    CooBuilder b(space_.dof_count, space_.dof_count);
    for (int i = 0; i < raw.k.nrows; ++i)
      for (int p = raw.k.row_offsets[i]; p < raw.k.row_offsets[i + 1]; ++p)
        b.add(i, raw.k.col_indices[p], raw.k.values[p]);
    for (int i = 0; i < mass_.nrows; ++i)
      for (int p = mass_.row_offsets[i]; p < mass_.row_offsets[i + 1]; ++p)
        b.add(i, mass_.col_indices[p], mass_.values[p] / cfg_.dt);
    k_sys = b.to_csr();
  }
  std::vector<double> rhs = spmv(mass_, c_prev);
  for (double& v : rhs) v /= cfg_.dt;
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += raw.rhs[i];

  // inflow concentration pinned on the left side
  std::vector<double> bc_values;
  const auto bc_dofs = collect_bc_dofs(space_, {{{1}, constant_field(0.0)}}, &bc_values);
  std::vector<int> bc_ix;
  for (const auto& cd : bc_dofs) bc_ix.push_back(cd.dof);
  apply_dirichlet(k_sys, rhs, bc_ix, bc_values);

  KrylovOptions transport_opts;
  transport_opts.rel_tol = 1e-8;
  transport_opts.max_iters = 20000;
  transport_opts.restart = 60;
  transport_opts.preconditioner = PrecondKind::Ilu0;
  auto [c_unconstrained, transport_rep] =
      gmres_solve(k_sys, rhs, c_prev, transport_opts);
  if (!transport_rep.converged)
    throw std::runtime_error("miscible step " + std::to_string(stats.step) + ": transport solve failed");
  stats.transport_iterations = transport_rep.iterations;

  std::vector<double> c_next;
  if (cfg_.solver == ViSolverKind::None) {
    c_next = std::move(c_unconstrained);
  } else {
    const BoxConstrainedSystem box = make_box_system(k_sys, rhs, cfg_.cmin, cfg_.cmax);
    std::vector<double> c_clip = clip(c_unconstrained, box.lb, box.ub);
    if (cfg_.solver == ViSolverKind::Clip) {
      c_next = std::move(c_clip);
    } else {
      std::pair<std::vector<double>, ComplementarityReport> sol;
      switch (cfg_.solver) {
        case ViSolverKind::Semismooth: sol = solve_semismooth(box, c_clip); break;
        case ViSolverKind::Tron: sol = solve_tron(box, c_clip); break;
        default: sol = solve_reduced_space(box, c_clip); break;
      }
      if (!sol.second.converged)
        throw std::runtime_error("miscible step " + std::to_string(stats.step) + ": VI solve failed (" +
                                 sol.second.termination + ")");
      stats.vi_iterations = sol.second.outer_iterations;
      c_next = std::move(sol.first);
    }
  }
  stats.concentration = field_stats(c_next, cfg_.cmin, cfg_.cmax);

  state.concentration = std::move(c_next);
  state.step = stats.step;
  state.time = stats.time;
  stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  state.history.push_back(stats);
  return stats;
}

TransientState MiscibleDriver::run(
    const std::function<void(const StepStats&, const TransientState&)>& on_step) const {
  TransientState state = initial_state();
  const int nsteps = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));
  for (int s = 0; s < nsteps; ++s) {
    const StepStats st = step(state);
    if (on_step) on_step(st, state);
  }
  return state;
}

}  // namespace vifem
