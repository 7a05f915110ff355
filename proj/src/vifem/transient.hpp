#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vifem/assemble.hpp"
#include "vifem/config.hpp"
#include "vifem/darcy.hpp"
#include "vifem/vi.hpp"

namespace vifem {

enum class PermeabilityKind { Constant, LogNormal };

struct MiscibleConfig {
  double mu0 = 3.95e-5;    // Pa s
  double log_mobility = 3.0;  // R_c
  double density = 479.0;  // kg/m^3
  double alpha_l = 1e-1;   // m
  double alpha_t = 1e-5;   // m
  double alpha_d = 1e-9;   // m^2/s
  double dt = 86400.0;     // s
  double t_end = 30.0 * 86400.0;
  int viscosity_model = 1;  // 1: mu0 exp(Rc c), 2: mu0 exp(Rc (1-c))
  PermeabilityKind perm_kind = PermeabilityKind::LogNormal;
  double perm_k0 = 1e-11;  // m^2 (median)
  unsigned perm_seed = 2016;
  double perm_sigma = 1.0;
  double perm_corr_len = 2.0;  // m
  double domain_x = 50.0, domain_y = 25.0;  // m
  int nx = 50, ny = 25;
  double cmin = 0.0, cmax = 1.0;
  double pressure_in = 200.0, pressure_out = 0.0;  // Pa, left/right
  Vec3 body_force = {0, 0, 0};
  double initial_concentration = 1.0;
  ViSolverKind solver = ViSolverKind::ReducedSpace;
  int vtk_every = 0;  // 0: no snapshots
  std::string output_dir;

  static MiscibleConfig from_config(const Config& cfg);
  Config to_config() const;
};

double viscosity(double concentration, const MiscibleConfig& cfg);

struct StepStats {
  int step = 0;
  double time = 0.0;
  FieldStats concentration;
  int darcy_iterations = 0;
  int transport_iterations = 0;
  int vi_iterations = 0;
  double wall_time = 0.0;
};

struct TransientState {
  int step = 0;
  double time = 0.0;
  std::vector<double> concentration;  // DG1 dofs
  std::vector<double> darcy_velocity;  // face dofs of the last flow solve
  std::vector<StepStats> history;
};

class MiscibleDriver {
 public:
  explicit MiscibleDriver(const MiscibleConfig& cfg);

  const Mesh& mesh() const { return mesh_; }
  const FunctionSpace& space() const { return space_; }
  const std::vector<double>& cell_permeability() const { return cell_perm_; }

  TransientState initial_state() const;
  // One backward-Euler step: Darcy solve with mu(c^n), dispersion from the
  // cell velocities, transport solve, clip, then the configured VI solve
  // from the clipped start. Throws on sub-solver failure.
  StepStats step(TransientState& state) const;
  TransientState run(const std::function<void(const StepStats&, const TransientState&)>& on_step = {}) const;

 private:
  MiscibleConfig cfg_;
  Mesh mesh_;
  FunctionSpace space_;
  std::vector<double> cell_perm_;
  CsrMatrix mass_;
};

// Seeded log-normal permeability on the cell grid: white noise smoothed by an
// iterated box filter with the given correlation length.
std::vector<double> lognormal_cell_field(int nx, int ny, double k0, double sigma, double corr_cells,
                                         unsigned seed);

}  // namespace vifem
