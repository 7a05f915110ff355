#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "vifem.h"

TEST_CASE("mesh lifecycle through the c interface") {
  vifem_mesh* base = nullptr;
  REQUIRE(vifem_mesh_create_structured_quad(10, 10, 0, 0, 1, 1, &base) == VIFEM_OK);
  vifem_mesh_info info;
  REQUIRE(vifem_mesh_get_info(base, &info) == VIFEM_OK);
  CHECK(info.dim == 2);
  CHECK(info.nodes == 121);
  CHECK(info.cells == 100);

  vifem_mesh* hexes = nullptr;
  REQUIRE(vifem_mesh_extrude(base, 10, 1.0, &hexes) == VIFEM_OK);
  REQUIRE(vifem_mesh_get_info(hexes, &info) == VIFEM_OK);
  CHECK(info.nodes == 1331);
  CHECK(info.cells == 1000);
  CHECK(info.interior_faces == 2700);

  int tags[16];
  int count = 0;
  REQUIRE(vifem_mesh_get_tags(hexes, tags, 16, &count) == VIFEM_OK);
  CHECK(count == 6);

  vifem_mesh_destroy(hexes);
  vifem_mesh_destroy(base);
}

TEST_CASE("error codes carry messages") {
  vifem_mesh* m = nullptr;
  CHECK(vifem_mesh_create_structured_quad(0, 5, 0, 0, 1, 1, &m) == VIFEM_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vifem_last_error()) > 0);
  CHECK(vifem_mesh_read_gmsh("does_not_exist.msh", &m) == VIFEM_ERR_RUNTIME);
  CHECK(vifem_mesh_read_gmsh(nullptr, &m) == VIFEM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("square-hole generator round trips through gmsh") {
  vifem_mesh* m = nullptr;
  REQUIRE(vifem_mesh_create_square_hole(18, &m) == VIFEM_OK);
  REQUIRE(vifem_mesh_write_gmsh(m, "capi_hole.msh") == VIFEM_OK);
  vifem_mesh* back = nullptr;
  REQUIRE(vifem_mesh_read_gmsh("capi_hole.msh", &back) == VIFEM_OK);
  vifem_mesh_info a, b;
  vifem_mesh_get_info(m, &a);
  vifem_mesh_get_info(back, &b);
  CHECK(a.cells == b.cells);
  CHECK(a.nodes == b.nodes);
  vifem_mesh_destroy(m);
  vifem_mesh_destroy(back);
  std::remove("capi_hole.msh");
}

TEST_CASE("vi solve on a raw csr system") {
  // K = [[2,-1],[-1,2]], f = [-3,0], c >= 0: both dofs pinned at zero
  const int row_offsets[] = {0, 2, 4};
  const int col_indices[] = {0, 1, 0, 1};
  const double values[] = {2, -1, -1, 2};
  const double f[] = {-3, 0};
  const double lb[] = {0, 0};
  std::vector<double> x = {1.0, 1.0};
  vifem_vi_report report;
  REQUIRE(vifem_vi_solve(2, row_offsets, col_indices, values, f, lb, nullptr, "rs", 1e-8, x.data(),
                         &report) == VIFEM_OK);
  CHECK(report.converged == 1);
  CHECK(report.merit <= 1e-8);
  CHECK(std::abs(x[0]) <= 1e-8);
  CHECK(std::abs(x[1]) <= 1e-8);

  x = {1.0, 1.0};
  REQUIRE(vifem_vi_solve(2, row_offsets, col_indices, values, f, lb, nullptr, "tron", 1e-8, x.data(),
                         &report) == VIFEM_OK);
  CHECK(std::abs(x[0]) <= 1e-8);

  CHECK(vifem_vi_solve(2, row_offsets, col_indices, values, f, lb, nullptr, "simplex", 1e-8, x.data(),
                       &report) == VIFEM_ERR_INVALID_ARGUMENT);
  CHECK(vifem_vi_solve(2, nullptr, col_indices, values, f, lb, nullptr, "rs", 1e-8, x.data(), &report) ==
        VIFEM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("benchmark runs through the c interface") {
  vifem_bench_spec spec;
  vifem_bench_spec_init(&spec);
  spec.h = 5;
  spec.solver = "rs";
  spec.write_artifacts = 0;
  vifem_bench_result result;
  REQUIRE(vifem_bench_run(&spec, &result) == VIFEM_OK);
  CHECK(result.converged == 1);
  CHECK(result.total == 216);
  CHECK(result.min_value >= -1e-8);
  CHECK(result.violating == 0);

  spec.formulation = "dg";
  spec.solver = "tron";
  REQUIRE(vifem_bench_run(&spec, &result) == VIFEM_OK);
  CHECK(result.total == 1000);
  CHECK(result.min_value >= -1e-8);

  spec.problem = "adr2d";
  spec.formulation = "gal";
  CHECK(vifem_bench_run(&spec, &result) == VIFEM_ERR_INVALID_ARGUMENT);
  CHECK(vifem_compare_runs("missing_a", "missing_b", nullptr, nullptr, nullptr) == VIFEM_ERR_RUNTIME);
}
