#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <cstring>
#include <random>

#include "vifem/assemble.hpp"
#include "vifem/krylov.hpp"
#include "vifem/matrix_market.hpp"
#include "vifem/mesh.hpp"

using namespace vifem;

namespace {

CsrMatrix dense_to_csr(const Eigen::MatrixXd& a) {
  CooBuilder b(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) b.add(i, j, a(i, j));
  return b.to_csr();
}

CsrMatrix identity(int n) {
  CooBuilder b(n, n);
  for (int i = 0; i < n; ++i) b.add(i, i, 1.0);
  return b.to_csr();
}

AssembledSystem gal3d_system(int n) {
  static std::map<int, AssembledSystem> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Mesh mesh = extrude_to_hex(build_structured_quad_mesh(n, n), n, 1.0);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  const VectorField vel = nodal_interpolant(mesh, [](const Vec3& x) { return abc_velocity(x); });
  const DiffusivityField d = dispersion_field(vel, 1e-1, 1e-5, 1e-9, 3);
  const ScalarField f = nodal_scalar_interpolant(mesh, [](const Vec3& x) { return point_source_forcing_3d(x); });
  std::vector<DirichletBC> bcs = {{{1, 2, 3, 4, 5, 6}, constant_field(0.0)}};
  auto sys = assemble_galerkin_diffusion(space, d, f, bcs);
  cache[n] = sys;
  return sys;
}

}  // namespace

TEST_CASE("spmv basics and dense oracle") {
  const auto id3 = identity(3);
  const std::vector<double> x = {1, 2, 3};
  CHECK(spmv(id3, x) == x);

  Eigen::MatrixXd a(2, 2);
  a << 4, 1, 1, 3;
  const auto acsr = dense_to_csr(a);
  const std::vector<double> ones = {1, 1};
  const auto y = spmv(acsr, ones);
  CHECK(y[0] == 5.0);
  CHECK(y[1] == 4.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1, 1);
  Eigen::MatrixXd r(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) r(i, j) = uni(rng);
  Eigen::VectorXd xv(8);
  for (int i = 0; i < 8; ++i) xv(i) = uni(rng);
  const auto rcsr = dense_to_csr(r);
  const std::vector<double> xs(xv.data(), xv.data() + 8);
  const auto ys = spmv(rcsr, xs);
  const Eigen::VectorXd yref = r * xv;
  for (int i = 0; i < 8; ++i) CHECK(std::abs(ys[i] - yref(i)) < 1e-14);

  // repeated products are bit-identical
  const auto again = spmv(rcsr, xs);
  CHECK(std::memcmp(again.data(), ys.data(), sizeof(double) * 8) == 0);

  CHECK_THROWS_AS(spmv(rcsr, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("cg solves small and assembled systems") {
  KrylovOptions opts;
  opts.rel_tol = 1e-12;

  const auto id = identity(4);
  const std::vector<double> b = {1, -2, 3, 4}, zeros(4, 0.0);
  auto [x, rep] = cg_solve(id, b, zeros, opts);
  CHECK(rep.iterations <= 1);
  for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));

  Eigen::MatrixXd a(2, 2);
  a << 4, 1, 1, 3;
  auto [x2, rep2] = cg_solve(dense_to_csr(a), std::vector<double>{1, 2}, std::vector<double>(2, 0.0), opts);
  CHECK(x2[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  CHECK(x2[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-12));

  const auto sys = gal3d_system(10);
  KrylovOptions kopts;
  kopts.rel_tol = 1e-7;
  kopts.preconditioner = PrecondKind::Ilu0;
  auto [xs, reps] = cg_solve(sys.k, sys.rhs, std::vector<double>(sys.rhs.size(), 0.0), kopts);
  CHECK(reps.converged);
  auto r = spmv(sys.k, xs);
  for (size_t i = 0; i < r.size(); ++i) r[i] -= sys.rhs[i];
  CHECK(norm2(r) <= 1e-7 * norm2(sys.rhs));
  // residual history is non-increasing
  for (size_t i = 1; i < reps.residual_history.size(); ++i)
    CHECK(reps.residual_history[i] <= reps.residual_history[i - 1] * (1 + 1e-12));
}

TEST_CASE("cg refuses nonsymmetric and indefinite operators") {
  Eigen::MatrixXd ns(2, 2);
  ns << 1, 2, 0, 1;
  CHECK_THROWS_AS(cg_solve(dense_to_csr(ns), std::vector<double>{1, 1}, std::vector<double>(2, 0.0), {}),
                  std::invalid_argument);

  Eigen::MatrixXd indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(cg_solve(dense_to_csr(indef), std::vector<double>{1, 1}, std::vector<double>(2, 0.0), {}),
                  BreakdownError);
}

TEST_CASE("gmres on small systems") {
  KrylovOptions opts;
  opts.rel_tol = 1e-12;
  Eigen::MatrixXd rot(2, 2);
  rot << 0, 1, -1, 0;
  auto [x, rep] = gmres_solve(dense_to_csr(rot), std::vector<double>{1, 0}, std::vector<double>(2, 0.0), opts);
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-12));

  auto [xi, repi] = gmres_solve(identity(5), std::vector<double>(5, 2.0), std::vector<double>(5, 0.0), opts);
  CHECK(repi.iterations <= 1);
  for (double v : xi) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("gmres with ilu0 on the stabilized 3d operator") {
  Mesh mesh = extrude_to_hex(build_structured_quad_mesh(10, 10), 10, 1.0);
  const FunctionSpace space = make_space(mesh, SpaceKind::CG1);
  const VectorField vel = nodal_interpolant(mesh, [](const Vec3& x) { return abc_velocity(x); });
  const DiffusivityField d = dispersion_field(vel, 1e-1, 1e-5, 1e-9, 3);
  const ScalarField f = nodal_scalar_interpolant(mesh, [](const Vec3& x) { return point_source_forcing_3d(x); });
  std::vector<DirichletBC> bcs = {{{1, 2, 3, 4, 5, 6}, constant_field(0.0)}};
  SupgOptions sopts;
  sopts.coefficient_divergence = true;
  const auto sys = assemble_supg(space, d, vel, f, bcs, sopts);

  KrylovOptions opts;
  opts.rel_tol = 1e-7;
  opts.preconditioner = PrecondKind::Ilu0;
  auto [x, rep] = gmres_solve(sys.k, sys.rhs, std::vector<double>(sys.rhs.size(), 0.0), opts);
  CHECK(rep.converged);
  auto r = spmv(sys.k, x);
  for (size_t i = 0; i < r.size(); ++i) r[i] -= sys.rhs[i];
  CHECK(norm2(r) <= 1e-7 * norm2(sys.rhs));
  // non-increasing within the restart cycle (first cycle inspected)
  const int m = opts.restart;
  for (int i = 1; i < m && i < static_cast<int>(rep.residual_history.size()); ++i)
    CHECK(rep.residual_history[i] <= rep.residual_history[i - 1] * (1 + 1e-12));
}

TEST_CASE("ilu0 is exact for diagonal and triangular matrices") {
  CooBuilder diag(3, 3);
  diag.add(0, 0, 2.0);
  diag.add(1, 1, -4.0);
  diag.add(2, 2, 0.5);
  const auto dm = diag.to_csr();
  auto pre = ilu0_factor(dm);
  std::vector<double> r = {2.0, -4.0, 0.5}, z(3);
  pre->apply(r, z);
  for (double v : z) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  CooBuilder lower(3, 3);
  lower.add(0, 0, 2.0);
  lower.add(1, 0, 1.0);
  lower.add(1, 1, 3.0);
  lower.add(2, 1, -1.0);
  lower.add(2, 2, 4.0);
  const auto lm = lower.to_csr();
  auto lpre = ilu0_factor(lm);
  const std::vector<double> xref = {1.0, -2.0, 0.5};
  const auto rhs = spmv(lm, xref);
  std::vector<double> sol(3);
  lpre->apply(rhs, sol);
  for (int i = 0; i < 3; ++i) CHECK(sol[i] == doctest::Approx(xref[i]).epsilon(1e-14));
}

TEST_CASE("ilu0 zero pivot names the row") {
  CooBuilder b(2, 2);
  b.add(0, 0, 0.0);
  b.add(0, 1, 1.0);
  b.add(1, 0, 1.0);
  b.add(1, 1, 1.0);
  const auto m = b.to_csr();
  CHECK_THROWS_WITH_AS(ilu0_factor(m), doctest::Contains("row 0"), std::runtime_error);
}

TEST_CASE("ilu0 preconditioning does not increase cg iterations") {
  CooBuilder b(5, 5);
  for (int i = 0; i < 5; ++i) {
    b.add(i, i, 2.0 + 0.1 * i);
    if (i > 0) {
      b.add(i, i - 1, -1.0);
      b.add(i - 1, i, -1.0);
    }
  }
  const auto a = b.to_csr();
  const std::vector<double> rhs = {1, 0, 2, -1, 1}, zeros(5, 0.0);
  KrylovOptions plain;
  plain.rel_tol = 1e-12;
  auto [x1, r1] = cg_solve(a, rhs, zeros, plain);
  KrylovOptions pre = plain;
  pre.preconditioner = PrecondKind::Ilu0;
  auto [x2, r2] = cg_solve(a, rhs, zeros, pre);
  CHECK(r2.iterations <= r1.iterations);
  for (int i = 0; i < 5; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-10));
}

TEST_CASE("assembled operators are symmetric with positive-definite symmetric part") {
  const auto sys = gal3d_system(6);
  CHECK(max_asymmetry(sys.k) <= 1e-10 * max_abs_value(sys.k));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(sys.k.nrows);
    for (double& v : x) v = uni(rng);
    const auto kx = spmv(sys.k, x);
    CHECK(dot(x, kx) > 0.0);
  }
}

TEST_CASE("matrix market round trips") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-5, 5);
  CooBuilder b(6, 4);
  for (int k = 0; k < 12; ++k)
    b.add(static_cast<int>(rng() % 6), static_cast<int>(rng() % 4), uni(rng));
  const auto a = b.to_csr();
  write_matrix_market(a, "mm_test.mtx");
  const auto back = read_matrix_market("mm_test.mtx");
  CHECK(back.nrows == a.nrows);
  CHECK(back.ncols == a.ncols);
  REQUIRE(back.nnz() == a.nnz());
  for (int i = 0; i < a.nnz(); ++i) {
    CHECK(back.col_indices[i] == a.col_indices[i]);
    CHECK(back.values[i] == a.values[i]);
  }
  std::remove("mm_test.mtx");

  std::vector<double> v(9);
  for (double& x : v) x = uni(rng);
  write_vector_market(v, "vec_test.mtx");
  const auto vback = read_vector_market("vec_test.mtx");
  REQUIRE(vback.size() == v.size());
  for (size_t i = 0; i < v.size(); ++i) CHECK(vback[i] == v[i]);
  std::remove("vec_test.mtx");
}
