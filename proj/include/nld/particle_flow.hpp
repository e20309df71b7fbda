#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nld/energy.hpp"
#include "nld/ensemble.hpp"
#include "nld/grid.hpp"
#include "nld/kernel.hpp"
#include "nld/reference.hpp"

namespace nld {

/// Everything the particle velocity depends on besides the positions.
struct FlowModel {
  FlowModel(Mollifier k, EnergyModel e, QuadratureSpec q = {})
      : kernel(std::move(k)), energy(e), quad(std::move(q)) {}
  Mollifier kernel;
  EnergyModel energy;
  QuadratureSpec quad;
};

struct EnergyVelocity {
  double energy = 0;              // F^eps on the quadrature grid
  std::vector<double> velocity;   // N x d, row-major like the ensemble
};

/// v_i = -int grad V_eps(x_i - y) F'(vt(y)) dy, vt = V_eps * rho^N, by the
/// trapezoid rule on one shared grid. With the grid lattice held fixed, the
/// discrete velocity is exactly -N times the gradient of the discrete energy
/// with respect to x_i.
/// Nodes with vt = 0 contribute nothing.
EnergyVelocity energy_and_velocity(const ParticleEnsemble& ens, const FlowModel& model);
std::vector<double> velocity(const ParticleEnsemble& ens, const FlowModel& model);
double flow_energy(const ParticleEnsemble& ens, const FlowModel& model);

/// m = 2 only: -(2/N) sum_j grad W_eps(x_i - x_j) with W_eps = V_eps * V_eps in
/// closed form. Gaussian kernel only.
std::vector<double> pairwise_velocity_m2(const ParticleEnsemble& ens, const Mollifier& kernel);

/// min(0.1 eps^2, 2 / |lambda|); the second term is dropped for the entropy.
double default_time_step(const FlowModel& model);

enum class Integrator { euler, heun, rk4 };
Integrator parse_integrator(std::string_view name);
std::string to_string(Integrator integrator);

/// One explicit step; time advances by dt.
ParticleEnsemble step(const ParticleEnsemble& ens, double dt, Integrator integrator,
                      const FlowModel& model);

enum class SamplerKind { quantile, uniform_grid, random };
SamplerKind parse_sampler(std::string_view name);
std::string to_string(SamplerKind kind);

/// quantile: x_i = Q((i + 1/2) / N) per axis (2D: tensor product, N a perfect square).
/// uniform_grid: cell-centred lattice; uniform profiles only.
/// random: iid inverse-CDF draws from a seeded mt19937_64.
ParticleEnsemble initial_sampler(SamplerKind kind, const DensityProfile& profile, std::size_t n,
                                 std::uint64_t seed = 0);

struct SnapshotDiagnostics {
  double t = 0;
  double energy = 0;
  double m2 = 0;
  std::array<double, 2> com{0.0, 0.0};
  double w2_increment = 0;  // distance to the previous snapshot; 0 for the first
};

struct Snapshot {
  ParticleEnsemble ensemble;
  SnapshotDiagnostics diag;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  double dt = 0;
  std::size_t steps = 0;
  const ParticleEnsemble& final_state() const { return snapshots.back().ensemble; }
};

struct SimulationConfig {
  SimulationConfig(FlowModel m) : model(std::move(m)) {}
  FlowModel model;
  double T = 0.1;
  double dt = 0;  // <= 0: default_time_step
  Integrator integrator = Integrator::rk4;
  std::size_t record_every = 1;  // steps between snapshots
  std::optional<ParticleEnsemble> initial;
  // Used when `initial` is empty.
  DensityProfile profile = DensityProfile::uniform(1, 0.0, 1.0);
  SamplerKind sampler = SamplerKind::quantile;
  std::size_t n = 100;
  std::uint64_t seed = 0;
};

/// Integrates to T with n = ceil(T / dt) equal steps. Snapshots at every
/// record_every steps plus the final time. A CoverageError from the velocity
/// is rethrown with the time at which it happened.
Trajectory simulate(const SimulationConfig& config);

}  // namespace nld
