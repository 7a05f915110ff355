#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "vifem/darcy.hpp"
#include "vifem/mesh.hpp"

using namespace vifem;

namespace {

DarcyFields uniform_flow_fields() {
  DarcyFields f;
  f.permeability = constant_field(1.0);
  f.viscosity = constant_field(1.0);
  f.density = 1.0;
  f.body_force = {0, 0, 0};
  f.pressure_tags = {1, 2};
  f.pressure_value = [](const EvalPoint& p) { return p.x[0] < 0.5 ? 1.0 : 0.0; };
  f.normal_velocity_tags = {3, 4};
  f.normal_velocity_value = constant_field(0.0);
  return f;
}

Eigen::MatrixXd block_dense(const DarcyBlockSystem& sys) {
  const int nv = sys.n_velocity(), np = sys.n_pressure();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nv + np, nv + np);
  for (int i = 0; i < nv; ++i) {
    for (int p = sys.k_vv.row_offsets[i]; p < sys.k_vv.row_offsets[i + 1]; ++p)
      k(i, sys.k_vv.col_indices[p]) = sys.k_vv.values[p];
    for (int p = sys.k_vp.row_offsets[i]; p < sys.k_vp.row_offsets[i + 1]; ++p)
      k(i, nv + sys.k_vp.col_indices[p]) = sys.k_vp.values[p];
  }
  for (int c = 0; c < np; ++c)
    for (int p = sys.k_pv.row_offsets[c]; p < sys.k_pv.row_offsets[c + 1]; ++p)
      k(nv + c, sys.k_pv.col_indices[p]) = sys.k_pv.values[p];
  return k;
}

double flux_scale(const std::vector<double>& v, const DarcyBlockSystem& sys) {
  double s = 0.0;
  for (int f = 0; f < sys.dofs.count(); ++f) s = std::max(s, std::abs(v[f]) * sys.dofs.faces[f].area);
  return std::max(s, 1e-30);
}

}  // namespace

TEST_CASE("face dof counts") {
  const Mesh one = build_structured_quad_mesh(1, 1);
  const auto dofs = build_darcy_face_dofs(one);
  CHECK(dofs.count() == 4);

  for (int n : {2, 5}) {
    const Mesh m = build_structured_quad_mesh(n, n);
    CHECK(build_darcy_face_dofs(m).count() == 2 * n * (n + 1));
  }

  // benchmark table: 250x125 cells carry 94,125 flow unknowns
  const Mesh miscible = build_structured_quad_mesh(250, 125, {0, 0, 50, 25});
  const auto d = build_darcy_face_dofs(miscible);
  CHECK(d.count() + miscible.cell_count() == 94125);

  const Mesh tri = build_square_hole_tri_mesh(9, 0.0);
  CHECK_THROWS_AS(build_darcy_face_dofs(tri), std::invalid_argument);
}

TEST_CASE("one-cell block structure") {
  const Mesh one = build_structured_quad_mesh(1, 1);
  DarcyFields fields = uniform_flow_fields();
  fields.normal_velocity_tags.clear();  // keep every block row intact
  fields.pressure_tags = {1, 2, 3, 4};
  const auto sys = assemble_rt0_darcy(one, fields);
  CHECK(sys.n_velocity() == 4);
  CHECK(sys.n_pressure() == 1);

  // K_pv row holds the signed face areas (unit square: +-1)
  double sum_abs = 0.0;
  for (int p = sys.k_pv.row_offsets[0]; p < sys.k_pv.row_offsets[1]; ++p) {
    CHECK(std::abs(std::abs(sys.k_pv.values[p]) - 1.0) < 1e-14);
    sum_abs += std::abs(sys.k_pv.values[p]);
  }
  CHECK(sum_abs == doctest::Approx(4.0));

  // velocity mass of the reference square: diag 1/3, coupling 1/6 per axis
  for (int axis = 0; axis < 2; ++axis) {
    const int lo = sys.dofs.cell_faces[0][2 * axis], up = sys.dofs.cell_faces[0][2 * axis + 1];
    CHECK(sys.k_vv.at(lo, lo) == doctest::Approx(1.0 / 3.0));
    CHECK(sys.k_vv.at(up, up) == doctest::Approx(1.0 / 3.0));
    CHECK(sys.k_vv.at(lo, up) == doctest::Approx(1.0 / 6.0));
  }
}

TEST_CASE("block system is symmetric") {
  const Mesh m = build_structured_quad_mesh(4, 3);
  const auto sys = assemble_rt0_darcy(m, uniform_flow_fields());
  CHECK(max_asymmetry(sys.k_vv) <= 1e-14 * max_abs_value(sys.k_vv));
  const auto kpv_t = transpose(sys.k_pv);
  REQUIRE(kpv_t.nnz() == sys.k_vp.nnz());
  for (int i = 0; i < kpv_t.nnz(); ++i) CHECK(kpv_t.values[i] == doctest::Approx(sys.k_vp.values[i]).epsilon(1e-14));
}

TEST_CASE("uniform flow is reproduced exactly") {
  for (int n : {1, 4, 7}) {
    const Mesh m = build_structured_quad_mesh(n, n);
    const auto sys = assemble_rt0_darcy(m, uniform_flow_fields());
    const auto sol = solve_darcy_schur(sys);
    REQUIRE(sol.report.converged);
    for (int f = 0; f < sys.dofs.count(); ++f) {
      const double expect = sys.dofs.faces[f].axis == 0 ? 1.0 : 0.0;
      CHECK(std::abs(sol.velocity[f] - expect) < 1e-8);
    }
    // pressure is linear in x: p = 1 - x at the cell centers
    for (int c = 0; c < m.cell_count(); ++c)
      CHECK(std::abs(sol.pressure[c] - (1.0 - m.cell_centroid(c)[0])) < 1e-8);
    const auto div = cell_divergence(sol.velocity, sys);
    for (double d : div) CHECK(std::abs(d) <= 1e-10 * flux_scale(sol.velocity, sys));
  }
}

TEST_CASE("body force balance with zero pressure boundary") {
  DarcyFields f = uniform_flow_fields();
  f.pressure_value = constant_field(0.0);
  f.density = 2.5;
  f.body_force = {0.3, 0.0, 0.0};  // along the flow axis; no-flow walls stay consistent
  f.permeability = constant_field(2.0);
  f.viscosity = constant_field(0.5);
  const Mesh m = build_structured_quad_mesh(5, 3);
  const auto sys = assemble_rt0_darcy(m, f);
  const auto sol = solve_darcy_schur(sys);
  REQUIRE(sol.report.converged);
  // (mu/k) v = rho b  =>  v = (k/mu) rho b = (2/0.5)*2.5*0.3 = 3 along x
  const auto vc = cell_velocity(sol.velocity, sys);
  for (const Vec3& v : vc) {
    CHECK(v[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(std::abs(v[1]) < 1e-8);
  }

  // dense oracle on the full block system
  const Eigen::MatrixXd k = block_dense(sys);
  Eigen::VectorXd rhs(sys.n_velocity() + sys.n_pressure());
  for (int i = 0; i < sys.n_velocity(); ++i) rhs(i) = sys.f_v[i];
  for (int c = 0; c < sys.n_pressure(); ++c) rhs(sys.n_velocity() + c) = sys.f_p[c];
  const Eigen::VectorXd x = k.fullPivLu().solve(rhs);
  for (int i = 0; i < sys.n_velocity(); ++i) CHECK(std::abs(sol.velocity[i] - x(i)) < 1e-8);
}

TEST_CASE("schur-preconditioned solve matches the dense oracle on heterogeneous cells") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(0.5, 3.0);
  std::vector<double> perm(16);
  for (double& v : perm) v = uni(rng);

  DarcyFields f = uniform_flow_fields();
  f.permeability = [&perm](const EvalPoint& p) { return perm[p.cell]; };
  f.viscosity = constant_field(1.3);
  const Mesh m = build_structured_quad_mesh(4, 4);
  const auto sys = assemble_rt0_darcy(m, f);
  const auto sol = solve_darcy_schur(sys);
  REQUIRE(sol.report.converged);

  const Eigen::MatrixXd k = block_dense(sys);
  Eigen::VectorXd rhs(sys.n_velocity() + sys.n_pressure());
  for (int i = 0; i < sys.n_velocity(); ++i) rhs(i) = sys.f_v[i];
  for (int c = 0; c < sys.n_pressure(); ++c) rhs(sys.n_velocity() + c) = sys.f_p[c];
  const Eigen::VectorXd x = k.fullPivLu().solve(rhs);
  for (int i = 0; i < sys.n_velocity(); ++i) CHECK(std::abs(sol.velocity[i] - x(i)) < 1e-8);
  for (int c = 0; c < sys.n_pressure(); ++c)
    CHECK(std::abs(sol.pressure[c] - x(sys.n_velocity() + c)) < 1e-8);

  const auto div = cell_divergence(sol.velocity, sys);
  for (double d : div) CHECK(std::abs(d) <= 1e-10 * flux_scale(sol.velocity, sys));
}

TEST_CASE("divergence check can fail on perturbed fields") {
  const Mesh m = build_structured_quad_mesh(3, 3);
  const auto sys = assemble_rt0_darcy(m, uniform_flow_fields());
  auto sol = solve_darcy_schur(sys);
  sol.velocity[sys.dofs.cell_faces[4][1]] += 0.37;
  const auto div = cell_divergence(sol.velocity, sys);
  double worst = 0.0;
  for (double d : div) worst = std::max(worst, std::abs(d));
  CHECK(worst > 0.1);
}

TEST_CASE("solves agree across initial guesses and preconditioners") {
  const Mesh m = build_structured_quad_mesh(6, 4);
  DarcyFields f = uniform_flow_fields();
  f.pressure_value = [](const EvalPoint& p) { return p.x[0] < 0.5 ? 2.0 : -1.0; };
  const auto sys = assemble_rt0_darcy(m, f);

  const auto a = solve_darcy_schur(sys);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> uni(-1, 1);
  std::vector<double> x0(sys.n_velocity() + sys.n_pressure());
  for (double& v : x0) v = uni(rng);
  const auto b = solve_darcy_schur(sys, {}, x0);
  REQUIRE(a.report.converged);
  REQUIRE(b.report.converged);
  for (int i = 0; i < sys.n_velocity(); ++i) CHECK(std::abs(a.velocity[i] - b.velocity[i]) < 1e-8);
  for (int c = 0; c < sys.n_pressure(); ++c) CHECK(std::abs(a.pressure[c] - b.pressure[c]) < 1e-8);

  DarcySolveOptions plain;
  plain.use_schur_preconditioner = false;
  plain.max_iters = 20000;
  plain.restart = 200;
  const auto u = solve_darcy_schur(sys, plain);
  REQUIRE(u.report.converged);
  for (int i = 0; i < sys.n_velocity(); ++i) CHECK(std::abs(a.velocity[i] - u.velocity[i]) < 1e-8);
  for (int c = 0; c < sys.n_pressure(); ++c) CHECK(std::abs(a.pressure[c] - u.pressure[c]) < 1e-8);
}

TEST_CASE("positivity of material fields is enforced") {
  DarcyFields f = uniform_flow_fields();
  f.permeability = constant_field(-1.0);
  const Mesh m = build_structured_quad_mesh(2, 2);
  CHECK_THROWS_WITH_AS(assemble_rt0_darcy(m, f), doctest::Contains("positive"), std::runtime_error);
}
