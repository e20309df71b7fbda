#include "nld/particle_flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/transport.hpp"

namespace nld {

EnergyVelocity energy_and_velocity(const ParticleEnsemble& ens, const FlowModel& model) {
  const Mollifier& kernel = model.kernel;
  const int d = ens.dim();
  const GridField grid = quadrature_grid(ens, kernel, model.quad);
  const GridField vt = mollify(ens, kernel, grid);

  // w_k F'(vt_k), reused by every particle.
  GridField dual = grid.like();
  EnergyVelocity out;
  for (std::size_t i = 0; i < grid.shape()[0]; ++i)
    for (std::size_t j = 0; j < grid.shape()[1]; ++j) {
      const double v = vt(i, j);
      if (v == 0.0) continue;
      const double w = grid.weight(i, j);
      out.energy += w * model.energy.f(v);
      dual(i, j) = w * model.energy.f_prime(v);
    }

  out.velocity.assign(ens.size() * static_cast<std::size_t>(d), 0.0);
  const double r = kernel.truncation_radius();
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t p = 0; p < ens.size(); ++p) {
    double* vp = out.velocity.data() + p * d;
    for_nodes_near(grid, ens.position(p), r, [&](std::size_t i, std::size_t j, auto off) {
      const double c = dual(i, j);
      if (c == 0.0) return;
      kernel.gradient(off, std::span<double>(g.data(), static_cast<std::size_t>(d)));
      for (int k = 0; k < d; ++k) vp[k] += c * g[k];
    });
  }
  return out;
}

std::vector<double> velocity(const ParticleEnsemble& ens, const FlowModel& model) {
  return energy_and_velocity(ens, model).velocity;
}

double flow_energy(const ParticleEnsemble& ens, const FlowModel& model) {
  return regularized_energy(ens, model.kernel, model.energy, model.quad);
}

std::vector<double> pairwise_velocity_m2(const ParticleEnsemble& ens, const Mollifier& kernel) {
  if (kernel.family() != KernelFamily::gaussian) {
    throw DomainError("closed-form self-convolution needs the Gaussian kernel");
  }
  const Mollifier w = kernel.with_eps(std::sqrt(2.0) * kernel.eps());
  const int d = ens.dim();
  const std::size_t n = ens.size();
  std::vector<double> out(n * d, 0.0);
  std::array<double, 2> z{0.0, 0.0}, g{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = ens.position(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto xj = ens.position(j);
      for (int k = 0; k < d; ++k) z[k] = xi[k] - xj[k];
      w.gradient(std::span<const double>(z.data(), d), std::span<double>(g.data(), d));
      for (int k = 0; k < d; ++k) out[i * d + k] -= 2.0 / static_cast<double>(n) * g[k];
    }
  }
  return out;
}

double default_time_step(const FlowModel& model) {
  const double eps = model.kernel.eps();
  double dt = 0.1 * eps * eps;
  if (model.energy.kind() == EnergyKind::power) {
    const double lam = lambda_convexity(model.kernel, model.energy).lambda;
    if (lam < 0) dt = std::min(dt, 2.0 / std::abs(lam));
  }
  return dt;
}

Integrator parse_integrator(std::string_view name) {
  if (name == "euler") return Integrator::euler;
  if (name == "heun") return Integrator::heun;
  if (name == "rk4") return Integrator::rk4;
  throw ConfigError("unknown integrator '" + std::string(name) + "' (euler, heun, rk4)");
}

std::string to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::euler: return "euler";
    case Integrator::heun: return "heun";
    case Integrator::rk4: return "rk4";
  }
  return "?";
}

namespace {

ParticleEnsemble shifted(const ParticleEnsemble& ens, const std::vector<double>& v, double h) {
  std::vector<double> x = ens.positions();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += h * v[i];
  return ParticleEnsemble(ens.dim(), std::move(x), ens.time() + h);
}

}  // namespace

ParticleEnsemble step(const ParticleEnsemble& ens, double dt, Integrator integrator,
                      const FlowModel& model) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  const auto k1 = velocity(ens, model);
  std::vector<double> incr(k1.size());
  switch (integrator) {
    case Integrator::euler:
      incr = k1;
      break;
    case Integrator::heun: {
      const auto k2 = velocity(shifted(ens, k1, dt), model);
      for (std::size_t i = 0; i < incr.size(); ++i) incr[i] = 0.5 * (k1[i] + k2[i]);
      break;
    }
    case Integrator::rk4: {
      const auto k2 = velocity(shifted(ens, k1, 0.5 * dt), model);
      const auto k3 = velocity(shifted(ens, k2, 0.5 * dt), model);
      const auto k4 = velocity(shifted(ens, k3, dt), model);
      for (std::size_t i = 0; i < incr.size(); ++i)
        incr[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
      break;
    }
  }
  return shifted(ens, incr, dt);
}

SamplerKind parse_sampler(std::string_view name) {
  if (name == "quantile") return SamplerKind::quantile;
  if (name == "uniform_grid") return SamplerKind::uniform_grid;
  if (name == "random") return SamplerKind::random;
  throw ConfigError("unknown sampler '" + std::string(name) + "' (quantile, uniform_grid, random)");
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::quantile: return "quantile";
    case SamplerKind::uniform_grid: return "uniform_grid";
    case SamplerKind::random: return "random";
  }
  return "?";
}

ParticleEnsemble initial_sampler(SamplerKind kind, const DensityProfile& profile, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0) throw SizeError("sampler needs N >= 1");
  if (!profile.is_product()) throw DomainError("sampler needs a 1D or product density");
  const int d = profile.dim;
  std::vector<double> x;
  x.reserve(n * d);
  if (kind == SamplerKind::random) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n * d; ++i) {
      double u = unif(rng);
      while (u <= 0.0) u = unif(rng);
      x.push_back(profile.quantile(u));
    }
    return ParticleEnsemble(d, std::move(x));
  }
  if (kind == SamplerKind::uniform_grid && profile.kind != DensityProfile::Kind::uniform) {
    throw DomainError("uniform_grid sampling needs a uniform profile");
  }
  std::size_t per_axis = n;
  if (d == 2) {
    per_axis = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (per_axis * per_axis != n) throw SizeError("2D lattice sampling needs N to be a perfect square");
  }
  std::vector<double> axis(per_axis);
  for (std::size_t i = 0; i < per_axis; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(per_axis);
    axis[i] = kind == SamplerKind::quantile ? profile.quantile(u)
                                            : profile.a + u * (profile.b - profile.a);
  }
  if (d == 1) return ParticleEnsemble(1, std::move(axis));
  for (std::size_t i = 0; i < per_axis; ++i)
    for (std::size_t j = 0; j < per_axis; ++j) {
      x.push_back(axis[i]);
      x.push_back(axis[j]);
    }
  return ParticleEnsemble(2, std::move(x));
}

namespace {

SnapshotDiagnostics diagnose(const ParticleEnsemble& ens, const FlowModel& model,
                             const ParticleEnsemble* prev) {
  SnapshotDiagnostics s;
  s.t = ens.time();
  s.energy = flow_energy(ens, model);
  s.m2 = m2(ens);
  s.com = ens.center_of_mass();
  if (prev) {
    if (ens.dim() == 1 || ens.size() <= kMaxAssignmentSize) {
      s.w2_increment = w2(*prev, ens).value;
    } else {
      s.w2_increment = std::nan("");
    }
  }
  return s;
}

}  // namespace

Trajectory simulate(const SimulationConfig& config) {
  if (!(config.T > 0)) throw DomainError("final time T must be positive");
  if (config.record_every == 0) throw DomainError("record_every must be >= 1");
  ParticleEnsemble ens = config.initial
                             ? *config.initial
                             : initial_sampler(config.sampler, config.profile, config.n, config.seed);
  const double dt0 = config.dt > 0 ? config.dt : default_time_step(config.model);
  const auto steps = static_cast<std::size_t>(std::ceil(config.T / dt0 - 1e-9));
  const double dt = config.T / static_cast<double>(std::max<std::size_t>(steps, 1));
  const double t0 = ens.time();

  Trajectory traj;
  traj.dt = dt;
  traj.steps = std::max<std::size_t>(steps, 1);
  traj.snapshots.push_back({ens, diagnose(ens, config.model, nullptr)});
  for (std::size_t n = 1; n <= traj.steps; ++n) {
    try {
      ens = step(ens, dt, config.integrator, config.model);
    } catch (const CoverageError& e) {
      std::ostringstream msg;
      msg << "at t = " << ens.time() << " (step " << n << "): " << e.what();
      throw CoverageError(msg.str());
    }
    ens.set_time(t0 + static_cast<double>(n) * dt);
    if (n % config.record_every == 0 || n == traj.steps) {
      const ParticleEnsemble& prev = traj.snapshots.back().ensemble;
      auto diag = diagnose(ens, config.model, &prev);
      traj.snapshots.push_back({ens, diag});
    }
  }
  return traj;
}

}  // namespace nld
