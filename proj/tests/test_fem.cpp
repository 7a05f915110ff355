#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "vifem/assemble.hpp"
#include "vifem/elements.hpp"
#include "vifem/krylov.hpp"
#include "vifem/mesh.hpp"
#include "vifem/quadrature.hpp"

using namespace vifem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> solve_assembled(const AssembledSystem& sys, bool symmetric) {
  KrylovOptions opts;
  opts.rel_tol = 1e-12;
  opts.max_iters = 50000;
  opts.preconditioner = PrecondKind::Ilu0;
  auto [x, rep] = symmetric ? cg_solve(sys.k, sys.rhs, std::vector<double>(sys.rhs.size(), 0.0), opts)
                            : gmres_solve(sys.k, sys.rhs, std::vector<double>(sys.rhs.size(), 0.0), opts);
  REQUIRE(rep.converged);
  return x;
}

// element stiffness of a bilinear rectangle with D = I, from the 1D
// closed-form stiffness/mass factors
Eigen::Matrix4d rect_stiffness(double hx, double hy) {
  const double s1[2][2] = {{1, -1}, {-1, 1}};
  const double m1[2][2] = {{1.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 3.0}};
  const int ix[4] = {0, 1, 1, 0}, iy[4] = {0, 0, 1, 1};
  Eigen::Matrix4d k;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      k(a, b) = (hy / hx) * s1[ix[a]][ix[b]] * m1[iy[a]][iy[b]] + (hx / hy) * m1[ix[a]][ix[b]] * s1[iy[a]][iy[b]];
  return k;
}

}  // namespace

TEST_CASE("galerkin stiffness matches the symbolic rectangle integral") {
  const Mesh strip = build_structured_quad_mesh(2, 1);  // two 0.5 x 1 cells
  const FunctionSpace space = make_space(strip, SpaceKind::CG1);
  const auto sys = assemble_galerkin_diffusion(space, isotropic_diffusivity(1.0), constant_field(0.0), {});

  const Eigen::Matrix4d ke = rect_stiffness(0.5, 1.0);
  Eigen::MatrixXd kref = Eigen::MatrixXd::Zero(6, 6);
  const int cells[2][4] = {{0, 1, 4, 3}, {1, 2, 5, 4}};
  for (const auto& cell : cells)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) kref(cell[a], cell[b]) += ke(a, b);

  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(sys.k.at(i, j) == doctest::Approx(kref(i, j)).epsilon(1e-13));
}

TEST_CASE("galerkin with zero source and homogeneous bcs is identically zero") {
  const Mesh mesh = build_structured_quad_mesh(6, 6);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  std::vector<DirichletBC> bcs = {{{1, 2, 3, 4}, constant_field(0.0)}};
  const auto sys = assemble_galerkin_diffusion(space, isotropic_diffusivity(1.0), constant_field(0.0), bcs);
  const auto x = solve_assembled(sys, true);
  for (double v : x) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("lepotier benchmark produces negative concentrations") {
  const Mesh mesh = build_structured_quad_mesh(200, 200);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  std::vector<DirichletBC> bcs = {{{1, 2, 3, 4}, constant_field(0.0)}};
  const Box2 box{3.0 / 8.0, 5.0 / 8.0, 3.0 / 5.0, 5.0 / 8.0};
  const auto sys =
      assemble_galerkin_diffusion(space, lepotier_diffusivity(), box_source_field_2d(box), bcs);
  KrylovOptions opts;
  opts.rel_tol = 1e-7;
  opts.max_iters = 20000;
  opts.preconditioner = PrecondKind::Jacobi;  // ILU(0) degrades on this operator
  auto [x, rep] = cg_solve(sys.k, sys.rhs, std::vector<double>(sys.rhs.size(), 0.0), opts);
  REQUIRE(rep.converged);
  const FieldStats s = field_stats(x, 0.0, kInf);
  CHECK(s.min_value < 0.0);
  CHECK(s.violating_dofs > 0);
}

TEST_CASE("assembly reports the failing cell") {
  const Mesh mesh = build_structured_quad_mesh(2, 2);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  DiffusivityField bad;
  bad.value = [](const EvalPoint& p) -> Mat3 {
    if (p.cell == 3) throw std::runtime_error("evaluator blew up");
    return identity_mat3();
  };
  CHECK_THROWS_WITH_AS(assemble_galerkin_diffusion(space, bad, constant_field(0.0), {}),
                       doctest::Contains("cell 3"), std::runtime_error);
}

TEST_CASE("dispersion tensor closed form") {
  const Mat3 d = dispersion_tensor({1, 0, 0}, 1e-1, 1e-5, 1e-9, 2);
  CHECK(d[0][0] == doctest::Approx(0.100000001).epsilon(1e-12));
  CHECK(d[1][1] == doctest::Approx(1.0001e-5).epsilon(1e-12));
  CHECK(d[0][1] == 0.0);

  // alphaL == alphaT collapses to an isotropic tensor
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-2, 2);
  for (int t = 0; t < 5; ++t) {
    const Vec3 v = {uni(rng), uni(rng), uni(rng)};
    const double a = 3e-4;
    const Mat3 iso = dispersion_tensor(v, a, a, 1e-9, 3);
    const double expect = 1e-9 + a * norm(v);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(iso[i][j] == doctest::Approx(i == j ? expect : 0.0).epsilon(1e-12));
  }

  // eigenvalues are alphaD + alphaL|v| along v and alphaD + alphaT|v| across
  for (int t = 0; t < 10; ++t) {
    const Vec3 v = {uni(rng), uni(rng), uni(rng)};
    if (norm(v) < 1e-6) continue;
    const Mat3 d3 = dispersion_tensor(v, 1e-1, 1e-5, 1e-9, 3);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        m(i, j) = d3[i][j];
        CHECK(d3[i][j] == d3[j][i]);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    const double s = norm(v);
    CHECK(es.eigenvalues()(0) == doctest::Approx(1e-9 + 1e-5 * s).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1e-9 + 1e-5 * s).epsilon(1e-12));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1e-9 + 1e-1 * s).epsilon(1e-12));
  }

  CHECK_THROWS_AS(dispersion_tensor({1, 0, 0}, -1e-3, 1e-5, 1e-9, 2), std::invalid_argument);
}

TEST_CASE("benchmark velocity fields") {
  const Vec3 abc0 = abc_velocity({0, 0, 0});
  CHECK(abc0[0] == doctest::Approx(1.0));
  CHECK(abc0[1] == doctest::Approx(0.3));
  CHECK(abc0[2] == doctest::Approx(0.65));

  const Vec3 vortex0 = vortex_velocity_2d({0, 0, 0});
  CHECK(vortex0[0] == doctest::Approx(1.0));
  CHECK(vortex0[1] == doctest::Approx(1.0));

  // direct evaluation at the far corner of the unit cube
  const double pi = 3.14159265358979323846;
  const Vec3 abc1 = abc_velocity({1, 1, 1});
  CHECK(abc1[0] == doctest::Approx(0.3 * std::sin(2 * pi) + std::cos(3 * pi)).epsilon(1e-14));
  CHECK(abc1[1] == doctest::Approx(0.65 * std::sin(2 * pi) + 0.3 * std::cos(5 * pi)).epsilon(1e-14));
  CHECK(abc1[2] == doctest::Approx(std::sin(4 * pi) + 0.65 * std::cos(6 * pi)).epsilon(1e-14));

  // analytic gradients against central differences
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(0, 1);
  const double eps = 1e-6;
  for (int t = 0; t < 5; ++t) {
    const Vec3 x = {uni(rng), uni(rng), uni(rng)};
    const Mat3 g = abc_velocity_gradient(x);
    for (int c = 0; c < 3; ++c) {
      Vec3 xp = x, xm = x;
      xp[c] += eps;
      xm[c] -= eps;
      const Vec3 vp = abc_velocity(xp), vm = abc_velocity(xm);
      for (int r = 0; r < 3; ++r) CHECK(g[r][c] == doctest::Approx((vp[r] - vm[r]) / (2 * eps)).epsilon(1e-6));
    }
    const Mat3 g2 = vortex_velocity_2d_gradient(x);
    for (int c = 0; c < 2; ++c) {
      Vec3 xp = x, xm = x;
      xp[c] += eps;
      xm[c] -= eps;
      const Vec3 vp = vortex_velocity_2d(xp), vm = vortex_velocity_2d(xm);
      for (int r = 0; r < 2; ++r)
        CHECK(g2[r][c] == doctest::Approx((vp[r] - vm[r]) / (2 * eps)).epsilon(1e-6));
    }
  }
}

TEST_CASE("point sources") {
  CHECK(point_source_forcing_3d({0.45, 0.25, 0.15}) == 1.0);
  CHECK(point_source_forcing_3d({0.0, 0.0, 0.0}) == 0.0);

  // quadrature over a box-aligned mesh integrates the sources exactly
  const Mesh mesh = extrude_to_hex(build_structured_quad_mesh(10, 10), 10, 1.0);
  double integral = 0.0;
  const auto quad = cell_quadrature(CellKind::Hex8, 2);
  for (int c = 0; c < mesh.cell_count(); ++c)
    for (const QuadPoint& q : quad) {
      const MappedPoint mp = map_point(mesh, c, q.ref);
      integral += q.weight * mp.detj * point_source_forcing_3d(mp.x);
    }
  CHECK(integral == doctest::Approx(0.008).epsilon(1e-12));

  const Box2 box{3.0 / 8.0, 5.0 / 8.0, 3.0 / 5.0, 5.0 / 8.0};
  CHECK(box_source_2d({0.5, 0.61, 0}, box) == 1.0);
  CHECK(box_source_2d({0.5, 0.5, 0}, box) == 0.0);
}

TEST_CASE("field stats") {
  const std::vector<double> v = {-1.0, 0.0, 0.5, 2.0};
  const FieldStats s = field_stats(v, 0.0, 1.0);
  CHECK(s.min_value == -1.0);
  CHECK(s.max_value == 2.0);
  CHECK(s.violating_dofs == 2);
  CHECK(s.total_dofs == 4);

  const std::vector<double> zeros(10, 0.0);
  CHECK(field_stats(zeros, 0.0, kInf).violating_dofs == 0);

  const std::vector<double> nan = {std::nan("")};
  CHECK_THROWS_AS(field_stats(nan, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant fields are reproduced exactly") {
  const double kappa = 0.73;

  // diffusion under the continuous Galerkin formulation
  {
    const Mesh mesh = build_structured_quad_mesh(5, 4);
    const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
    std::vector<DirichletBC> bcs = {{{1, 2, 3, 4}, constant_field(kappa)}};
    const auto sys = assemble_galerkin_diffusion(space, lepotier_diffusivity(), constant_field(0.0), bcs);
    for (double v : solve_assembled(sys, true)) CHECK(v == doctest::Approx(kappa).epsilon(1e-10));
  }
  // advection-diffusion under the stabilized formulation
  {
    const Mesh mesh = build_structured_quad_mesh(5, 5);
    const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
    const VectorField vel = vortex_velocity_field();
    const DiffusivityField d = dispersion_field(vel, 1e-1, 1e-5, 1e-9, 2);
    std::vector<DirichletBC> bcs = {{{1, 2, 3, 4}, constant_field(kappa)}};
    SupgOptions opts;
    opts.coefficient_divergence = true;
    const auto sys = assemble_supg(space, d, vel, constant_field(0.0), bcs, opts);
    for (double v : solve_assembled(sys, false)) CHECK(v == doctest::Approx(kappa).epsilon(1e-10));
  }
  // diffusion under the interior-penalty formulation
  {
    const Mesh mesh = extrude_to_hex(build_structured_quad_mesh(3, 3), 3, 1.0);
    const FunctionSpace space = make_space(mesh, SpaceKind::DG1);
    const VectorField vel = abc_velocity_field();
    const DiffusivityField d = dispersion_field(vel, 1e-1, 1e-5, 1e-9, 3);
    std::vector<DirichletBC> bcs = {{{1, 2, 3, 4, 5, 6}, constant_field(kappa)}};
    const auto sys = assemble_dg(space, d, std::nullopt, constant_field(0.0), bcs);
    for (double v : solve_assembled(sys, true)) CHECK(v == doctest::Approx(kappa).epsilon(1e-10));
  }
}

TEST_CASE("supg without stabilization equals plain galerkin advection-diffusion") {
  const Mesh mesh = build_structured_quad_mesh(3, 3);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  const VectorField vel = vortex_velocity_field();
  const DiffusivityField d = lepotier_diffusivity();
  SupgOptions off;
  off.stabilization = false;
  const auto sys = assemble_supg(space, d, vel, constant_field(1.0), {}, off);

  // independent dense assembly of the same weak form
  Eigen::MatrixXd kref = Eigen::MatrixXd::Zero(space.dof_count, space.dof_count);
  const auto quad = cell_quadrature(CellKind::Quad4, 2);
  for (int c = 0; c < mesh.cell_count(); ++c)
    for (const QuadPoint& q : quad) {
      const MappedPoint mp = map_point(mesh, c, q.ref);
      const EvalPoint ep{mp.x, c, q.ref};
      const Mat3 dq = d.value(ep);
      const Vec3 vq = vel.value(ep);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double diff = dot(mp.grad[b], matvec(dq, mp.grad[a]));
          const double adv = mp.shape[a] * dot(vq, mp.grad[b]);
          kref(space.cell_dof(c, a), space.cell_dof(c, b)) += q.weight * mp.detj * (diff + adv);
        }
    }
  for (int i = 0; i < space.dof_count; ++i)
    for (int j = 0; j < space.dof_count; ++j)
      CHECK(sys.k.at(i, j) == doctest::Approx(kref(i, j)).epsilon(1e-13));
}

TEST_CASE("supg velocity floor raises unless stabilization is off") {
  const Mesh mesh = build_structured_quad_mesh(2, 2);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  VectorField zero_vel;
  zero_vel.value = [](const EvalPoint&) { return Vec3{0, 0, 0}; };
  CHECK_THROWS_WITH_AS(
      assemble_supg(space, isotropic_diffusivity(1.0), zero_vel, constant_field(0.0), {}, {}),
      doctest::Contains("velocity below floor"), std::runtime_error);
  SupgOptions off;
  off.stabilization = false;
  CHECK_NOTHROW(assemble_supg(space, isotropic_diffusivity(1.0), zero_vel, constant_field(0.0), {}, off));
}

TEST_CASE("dg on a single cell reduces to the local galerkin block") {
  const Mesh mesh = build_structured_quad_mesh(1, 1);
  const FunctionSpace cg = make_space(mesh, SpaceKind::CG1);
  const FunctionSpace dg = make_space(mesh, SpaceKind::DG1);
  const auto ref = assemble_galerkin_diffusion(cg, lepotier_diffusivity(), constant_field(1.0), {});
  const auto sys = assemble_dg(dg, lepotier_diffusivity(), std::nullopt, constant_field(1.0), {}, {});
  // dg dofs are cell-local, the cg dofs follow the global node numbering
  for (int a = 0; a < 4; ++a) {
    const int ga = mesh.cell_node(0, a);
    CHECK(sys.rhs[a] == doctest::Approx(ref.rhs[ga]).epsilon(1e-14));
    for (int b = 0; b < 4; ++b)
      CHECK(sys.k.at(a, b) == doctest::Approx(ref.k.at(ga, mesh.cell_node(0, b))).epsilon(1e-14));
  }
}

TEST_CASE("dg requires interior faces and a dg space") {
  Mesh mesh = build_structured_quad_mesh(2, 2);
  const FunctionSpace cg = make_space(mesh, SpaceKind::CG1);
  CHECK_THROWS_AS(assemble_dg(cg, isotropic_diffusivity(1.0), std::nullopt, constant_field(0.0), {}, {}),
                  std::invalid_argument);
  mesh.interior_faces.clear();
  const FunctionSpace dg = make_space(mesh, SpaceKind::DG1);
  CHECK_THROWS_WITH_AS(assemble_dg(dg, isotropic_diffusivity(1.0), std::nullopt, constant_field(0.0), {}, {}),
                       doctest::Contains("interior faces"), std::invalid_argument);
}

TEST_CASE("dg assembly is invariant under swapping the face side convention") {
  const Mesh mesh = extrude_to_hex(build_structured_quad_mesh(3, 2), 2, 1.0);
  const FunctionSpace space = make_space(mesh, SpaceKind::DG1);
  const VectorField vel = abc_velocity_field();
  const DiffusivityField d = dispersion_field(vel, 1e-1, 1e-5, 1e-9, 3);
  DgOptions opts;
  const auto a = assemble_dg(space, d, vel, constant_field(1.0), {}, opts);
  opts.swap_face_sides = true;
  const auto b = assemble_dg(space, d, vel, constant_field(1.0), {}, opts);
  REQUIRE(a.k.nnz() == b.k.nnz());
  const double scale = max_abs_value(a.k);
  for (int i = 0; i < a.k.nnz(); ++i) CHECK(std::abs(a.k.values[i] - b.k.values[i]) <= 1e-12 * scale);
}

TEST_CASE("dg penalty default matches 2(d+1)/d") {
  {
    const Mesh mesh = build_structured_quad_mesh(2, 2);
    const FunctionSpace space = make_space(mesh, SpaceKind::DG1);
    DgOptions auto_gamma, explicit_gamma;
    explicit_gamma.gamma = 3.0;
    const auto a = assemble_dg(space, isotropic_diffusivity(1.0), std::nullopt, constant_field(0.0), {}, auto_gamma);
    const auto b =
        assemble_dg(space, isotropic_diffusivity(1.0), std::nullopt, constant_field(0.0), {}, explicit_gamma);
    for (int i = 0; i < a.k.nnz(); ++i) CHECK(a.k.values[i] == b.k.values[i]);
  }
  {
    const Mesh mesh = extrude_to_hex(build_structured_quad_mesh(2, 2), 2, 1.0);
    const FunctionSpace space = make_space(mesh, SpaceKind::DG1);
    DgOptions auto_gamma, explicit_gamma;
    explicit_gamma.gamma = 8.0 / 3.0;
    const auto a = assemble_dg(space, isotropic_diffusivity(1.0), std::nullopt, constant_field(0.0), {}, auto_gamma);
    const auto b =
        assemble_dg(space, isotropic_diffusivity(1.0), std::nullopt, constant_field(0.0), {}, explicit_gamma);
    for (int i = 0; i < a.k.nnz(); ++i) CHECK(a.k.values[i] == b.k.values[i]);
  }
}

TEST_CASE("pure-diffusion operators are symmetric positive definite") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uni(-1, 1);

  const Mesh hexes = extrude_to_hex(build_structured_quad_mesh(4, 4), 4, 1.0);
  const VectorField vel = nodal_interpolant(hexes, [](const Vec3& x) { return abc_velocity(x); });
  const DiffusivityField d = dispersion_field(vel, 1e-1, 1e-5, 1e-9, 3);
  std::vector<DirichletBC> bcs = {{{1, 2, 3, 4, 5, 6}, constant_field(0.0)}};

  const FunctionSpace cg = make_space(hexes, SpaceKind::CG1);
  const auto gal = assemble_galerkin_diffusion(cg, d, constant_field(1.0), bcs);
  const FunctionSpace dgs = make_space(hexes, SpaceKind::DG1);
  const auto dg = assemble_dg(dgs, d, std::nullopt, constant_field(1.0), bcs);

  for (const AssembledSystem* sys : {&gal, &dg}) {
    CHECK(max_asymmetry(sys->k) <= 1e-10 * max_abs_value(sys->k));
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x(sys->k.nrows);
      for (double& v : x) v = uni(rng);
      const auto kx = spmv(sys->k, x);
      double xkx = 0.0;
      for (size_t i = 0; i < x.size(); ++i) xkx += x[i] * kx[i];
      CHECK(xkx > 0.0);
    }
  }
}
