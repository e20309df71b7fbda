#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nld/grid.hpp"
#include "nld/particle_flow.hpp"

namespace nld {

/// Sorted 1D equal-weight atoms after n accepted steps of size tau.
struct JkoState {
  std::vector<double> positions;
  double tau = 0;
  std::size_t n = 0;
  double objective = 0;  // J at the accepted point
  double energy = 0;     // F^eps at the accepted point

  ParticleEnsemble ensemble() const;
};

struct JkoOptions {
  double gtol = 0;  // <= 0: 1e-8 sqrt(N)
  std::size_t max_iter = 20000;
  double armijo = 1e-4;
  std::size_t max_backtrack = 60;
};

struct JkoStepResult {
  JkoState state;
  double dw2 = 0;  // sorted d_W^2 between the previous and the new state
  double grad_norm = 0;
  std::size_t iterations = 0;
  bool resorted = false;
};

/// Largest admissible tau for the one-step problem, min(1, 1 / (2 c2 Ct)) with
/// the constants of the lower-bound check. Slightly below the returned value
/// is required (the inequality is strict).
double jko_tau_cap(int dim = 1);

/// Minimises J(y) = (1/(2 tau N)) sum (y_i - x_i)^2 + F^eps[y] by gradient
/// descent preconditioned with tau N (direction (x - y) + tau v(y)) and
/// Armijo backtracking. Throws SolverError when max_iter is reached.
JkoStepResult jko_step(const JkoState& prev, const FlowModel& model, const JkoOptions& options = {});

struct JkoRecord {
  std::size_t n = 0;
  double t = 0;
  double energy = 0;       // F^eps[rho^n]
  double dw2 = 0;          // d_W^2(rho^{n-1}, rho^n); 0 for n = 0
  double entropy = 0;      // H[V_eps * rho^n]
  double dissipation = 0;  // tau int |grad (V_eps * rho^n)^{m/2}|^2; 0 for n = 0
  double lm_mass = 0;      // tau int (V_eps * rho^n)^m; 0 for n = 0
  double m2 = 0;
  double grad_norm = 0;
  std::size_t iterations = 0;
};

struct JkoChain {
  double tau = 0;
  std::vector<JkoState> states;
  std::vector<JkoRecord> records;

  /// Piecewise-constant interpolation: rho^n for t in ((n-1) tau, n tau], rho^0 at t <= 0.
  const JkoState& at(double t) const;
};

struct JkoConfig {
  JkoConfig(FlowModel m) : model(std::move(m)) {}
  FlowModel model;
  double tau = 1e-3;
  double T = 0.05;
  std::size_t n = 64;
  DensityProfile profile = DensityProfile::uniform(1, 0.0, 1.0);
  SamplerKind sampler = SamplerKind::quantile;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> initial;
  JkoOptions options;
};

/// ceil(T / tau) steps. Rejects tau outside (0, jko_tau_cap()).
JkoChain run_jko(const JkoConfig& config);

/// int rho log rho over a grid field; zero cells contribute 0.
double boltzmann_entropy(const GridField& field);

/// -d log(2 pi) - m2 / 2, a lower bound on int rho log rho given the second moment m2.
double entropy_lower_bound(int dim, double m2);

struct FlowInterchangeReport {
  double dissipation_sum = 0;  // sum_n D_n
  double entropy_drop = 0;     // m^2 / (4 c1) (H[rho^0] - H[rho^K])
  double ratio = 0;            // dissipation_sum / entropy_drop (inf when the drop is <= 0)
  double lm_mass_sum = 0;      // sum_n tau int v^m
  bool warning = false;        // ratio > 1.05
};
FlowInterchangeReport flow_interchange_diagnostic(const JkoChain& chain, const FlowModel& model);

struct JkoBoundsReport {
  double holder_constant = 0;  // max d_W(s,t) / (sqrt|t-s| + sqrt tau)
  double max_m2 = 0;
  double cumulative_dw2 = 0;   // sum d_W^2
  double energy_budget = 0;    // 2 tau (F^0 - F^K)
  bool cumulative_ok = false;
  bool moment_inequality_ok = false;  // m2(b) <= 2 m2(a) + 2 d_W^2(a,b) on consecutive pairs
  bool energy_inequality_ok = false;  // per-step, slack 1e-10 (1 + |F|)
};
JkoBoundsReport jko_bounds(const JkoChain& chain);

}  // namespace nld
