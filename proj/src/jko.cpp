#include "nld/jko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/reference.hpp"
#include "nld/transport.hpp"

namespace nld {

ParticleEnsemble JkoState::ensemble() const {
  return ParticleEnsemble(1, positions, tau * static_cast<double>(n));
}

double jko_tau_cap(int dim) {
  const LowerBoundConstants c = lower_bound_constants(dim);
  return std::min(1.0, 1.0 / (2.0 * c.c2 * c.c_tilde));
}

namespace {

double sorted_dw2(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

struct Eval {
  double j = 0;
  double energy = 0;
  std::vector<double> grad;  // dJ/dy_i
  std::vector<double> vel;   // particle velocity at y
};

Eval evaluate(const std::vector<double>& y, const std::vector<double>& x, double tau,
              const FlowModel& model) {
  const auto n = static_cast<double>(y.size());
  EnergyVelocity ev = energy_and_velocity(ParticleEnsemble(1, y), model);
  Eval e;
  e.energy = ev.energy;
  double quad = 0;
  e.grad.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dy = y[i] - x[i];
    quad += dy * dy;
    e.grad[i] = dy / (tau * n) - ev.velocity[i] / n;
  }
  e.j = quad / (2.0 * tau * n) + ev.energy;
  e.vel = std::move(ev.velocity);
  return e;
}

double sup_norm(const std::vector<double>& g) {
  double m = 0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

JkoStepResult jko_step(const JkoState& prev, const FlowModel& model, const JkoOptions& options) {
  if (model.kernel.dim() != 1) throw DomainError("JKO is implemented in 1D only");
  const double tau = prev.tau;
  if (!(tau > 0) || !(tau < jko_tau_cap(1))) {
    std::ostringstream msg;
    msg << "tau = " << tau << " outside the admissible range (0, " << jko_tau_cap(1) << ")";
    throw DomainError(msg.str());
  }
  const auto& x = prev.positions;
  const std::size_t n = x.size();
  const double gtol = options.gtol > 0 ? options.gtol : 1e-8 * std::sqrt(static_cast<double>(n));

  std::vector<double> y = x;
  Eval cur = evaluate(y, x, tau, model);
  std::vector<double> trial(n), dir(n);
  std::size_t it = 0;
  double step_len = 1.0;
  while (sup_norm(cur.grad) > gtol) {
    if (it >= options.max_iter) {
      std::ostringstream msg;
      msg << "JKO inner solver hit " << options.max_iter << " iterations, |grad J|_inf = "
          << sup_norm(cur.grad) << " > " << gtol;
      throw SolverError(msg.str());
    }
    ++it;
    double slope = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = (x[i] - y[i]) + tau * cur.vel[i];  // -tau N grad J
      slope += cur.grad[i] * dir[i];
    }
    // Start from a slightly larger step than the last accepted one.
    double a = std::min(1.0, 2.0 * step_len);
    bool accepted = false;
    Eval next;
    for (std::size_t b = 0; b < options.max_backtrack; ++b) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] + a * dir[i];
      next = evaluate(trial, x, tau, model);
      if (next.j <= cur.j + options.armijo * a * slope) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      // No decrease available at double precision; stop if already near stationarity.
      if (sup_norm(cur.grad) <= 100 * gtol) break;
      std::ostringstream msg;
      msg << "JKO line search failed, |grad J|_inf = " << sup_norm(cur.grad);
      throw SolverError(msg.str());
    }
    step_len = a;
    y = trial;
    cur = std::move(next);
  }

  JkoStepResult out;
  out.iterations = it;
  out.grad_norm = sup_norm(cur.grad);
  if (!std::is_sorted(y.begin(), y.end())) {
    // The sorted coupling is never worse, so J only decreases.
    std::sort(y.begin(), y.end());
    out.resorted = true;
    cur = evaluate(y, x, tau, model);
  }
  out.dw2 = sorted_dw2(y, x);
  out.state.positions = std::move(y);
  out.state.tau = tau;
  out.state.n = prev.n + 1;
  out.state.energy = cur.energy;
  out.state.objective = out.dw2 / (2.0 * tau) + cur.energy;
  return out;
}

const JkoState& JkoChain::at(double t) const {
  if (t <= 0) return states.front();
  auto k = static_cast<std::size_t>(std::ceil(t / tau - 1e-12));
  return states[std::min(k, states.size() - 1)];
}

double boltzmann_entropy(const GridField& field) {
  double s = 0;
  for (std::size_t i = 0; i < field.shape()[0]; ++i)
    for (std::size_t j = 0; j < field.shape()[1]; ++j) {
      const double v = field(i, j);
      if (v > 0) s += field.weight(i, j) * v * std::log(v);
    }
  return s;
}

double entropy_lower_bound(int dim, double m2) {
  return -dim * std::log(2.0 * std::numbers::pi) - 0.5 * m2;
}

namespace {

JkoRecord record_state(const JkoState& s, const FlowModel& model, bool first) {
  JkoRecord r;
  r.n = s.n;
  r.t = s.tau * static_cast<double>(s.n);
  const ParticleEnsemble ens = s.ensemble();
  const GridField v = mollify(ens, model.kernel, quadrature_grid(ens, model.kernel, model.quad));
  r.energy = energy_of_field(v, model.energy);
  r.entropy = boltzmann_entropy(v);
  r.m2 = m2(ens);
  if (!first) {
    r.dissipation = s.tau * sobolev_seminorm_m2(v, model.energy.m());
    r.lm_mass = s.tau * lp_norm_pow(v, model.energy.m());
  }
  return r;
}

}  // namespace

JkoChain run_jko(const JkoConfig& config) {
  if (config.model.kernel.dim() != 1) throw DomainError("JKO is implemented in 1D only");
  const double cap = jko_tau_cap(1);
  if (!(config.tau > 0) || !(config.tau < cap)) {
    std::ostringstream msg;
    msg << "tau = " << config.tau << " violates the one-step well-posedness cap tau < " << cap;
    throw ConfigError(msg.str());
  }
  if (!(config.T > 0)) throw ConfigError("JKO final time T must be positive");

  JkoState s;
  if (config.initial) {
    s.positions = *config.initial;
  } else {
    s.positions = initial_sampler(config.sampler, config.profile, config.n, config.seed).positions();
  }
  std::sort(s.positions.begin(), s.positions.end());
  s.tau = config.tau;
  s.energy = flow_energy(s.ensemble(), config.model);
  s.objective = s.energy;

  JkoChain chain;
  chain.tau = config.tau;
  chain.states.push_back(s);
  chain.records.push_back(record_state(s, config.model, true));
  const auto steps = static_cast<std::size_t>(std::ceil(config.T / config.tau - 1e-9));
  for (std::size_t k = 0; k < steps; ++k) {
    JkoStepResult r = jko_step(chain.states.back(), config.model, config.options);
    JkoRecord rec = record_state(r.state, config.model, false);
    rec.dw2 = r.dw2;
    rec.grad_norm = r.grad_norm;
    rec.iterations = r.iterations;
    chain.states.push_back(std::move(r.state));
    chain.records.push_back(rec);
  }
  return chain;
}

FlowInterchangeReport flow_interchange_diagnostic(const JkoChain& chain, const FlowModel& model) {
  FlowInterchangeReport r;
  for (std::size_t k = 1; k < chain.records.size(); ++k) {
    r.dissipation_sum += chain.records[k].dissipation;
    r.lm_mass_sum += chain.records[k].lm_mass;
  }
  const double m = model.energy.m();
  r.entropy_drop = m * m / (4.0 * model.energy.c1()) *
                   (chain.records.front().entropy - chain.records.back().entropy);
  r.ratio = r.entropy_drop > 0 ? r.dissipation_sum / r.entropy_drop
                               : std::numeric_limits<double>::infinity();
  r.warning = !(r.ratio <= 1.05);
  return r;
}

JkoBoundsReport jko_bounds(const JkoChain& chain) {
  JkoBoundsReport r;
  const double tau = chain.tau;
  const std::size_t k = chain.states.size();
  r.moment_inequality_ok = true;
  r.energy_inequality_ok = true;
  for (std::size_t a = 0; a < k; ++a) {
    r.max_m2 = std::max(r.max_m2, chain.records[a].m2);
    for (std::size_t b = a + 1; b < k; ++b) {
      const double dw = std::sqrt(sorted_dw2(chain.states[a].positions, chain.states[b].positions));
      const double dt = tau * static_cast<double>(b - a);
      r.holder_constant = std::max(r.holder_constant, dw / (std::sqrt(dt) + std::sqrt(tau)));
    }
    if (a + 1 < k) {
      const JkoRecord& p = chain.records[a];
      const JkoRecord& q = chain.records[a + 1];
      r.cumulative_dw2 += q.dw2;
      if (q.m2 > 2.0 * p.m2 + 2.0 * q.dw2) r.moment_inequality_ok = false;
      const double lhs = q.dw2 / (2.0 * tau) + chain.states[a + 1].energy;
      const double rhs = chain.states[a].energy + 1e-10 * (1.0 + std::abs(chain.states[a].energy));
      if (lhs > rhs) r.energy_inequality_ok = false;
    }
  }
  r.energy_budget = 2.0 * tau * (chain.states.front().energy - chain.states.back().energy);
  r.cumulative_ok = r.cumulative_dw2 <= r.energy_budget * (1.0 + 1e-10) + 1e-14;
  return r;
}

}  // namespace nld
