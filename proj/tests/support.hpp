#pragma once

#include <limits>
#include <random>
#include <vector>

#include "vifem/csr.hpp"
#include "vifem/vi.hpp"

namespace testsupport {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense random matrix with positive-definite symmetric part: entries in
// [-1,1] plus a Gershgorin-dominant diagonal.
inline vifem::CsrMatrix random_pd_matrix(std::mt19937& rng, int n, bool symmetric) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> dense(n * n);
  for (double& v : dense) v = uni(rng);
  if (symmetric)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) dense[i * n + j] = dense[j * n + i];
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row_sum += std::abs(0.5 * (dense[i * n + j] + dense[j * n + i]));
    dense[i * n + i] = row_sum + 0.5 + uni(rng) * 0.25 + 0.25;
  }
  vifem::CooBuilder b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.add(i, j, dense[i * n + j]);
  return b.to_csr();
}

// One of the five bound patterns per dof: lower-only, upper-only, two-sided,
// free, fixed.
inline void random_bounds(std::mt19937& rng, int n, std::vector<double>& lb, std::vector<double>& ub) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_int_distribution<int> pattern(0, 4);
  lb.assign(n, -kInf);
  ub.assign(n, kInf);
  for (int i = 0; i < n; ++i) {
    switch (pattern(rng)) {
      case 0: lb[i] = uni(rng); break;
      case 1: ub[i] = uni(rng); break;
      case 2: {
        const double a = uni(rng), b = uni(rng);
        lb[i] = std::min(a, b);
        ub[i] = std::max(a, b);
        break;
      }
      case 3: break;
      default: lb[i] = ub[i] = uni(rng); break;
    }
  }
}

inline vifem::BoxConstrainedSystem random_box_system(std::mt19937& rng, int n, bool symmetric) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  vifem::BoxConstrainedSystem sys;
  sys.k = random_pd_matrix(rng, n, symmetric);
  sys.f.resize(n);
  for (double& v : sys.f) v = uni(rng);
  random_bounds(rng, n, sys.lb, sys.ub);
  return sys;
}

inline std::vector<double> random_feasible_start(std::mt19937& rng, const vifem::BoxConstrainedSystem& sys) {
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  std::vector<double> c(sys.size());
  for (int i = 0; i < sys.size(); ++i) c[i] = uni(rng);
  return vifem::clip(c, sys.lb, sys.ub);
}

}  // namespace testsupport
