#include "nld/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "nld/energy.hpp"
#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/jko.hpp"
#include "nld/particle_flow.hpp"
#include "nld/reference.hpp"
#include "nld/transport.hpp"

namespace nld {

namespace {

using Detail = std::ostringstream;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

std::string fix(double v, int p = 4) {
  std::ostringstream s;
  s << std::setprecision(p) << std::fixed << v;
  return s.str();
}

// 1. Per-step JKO energy inequality for m in {1.5, 2, 3}.
Outcome c1_jko_energy_inequality() {
  Outcome o{true, ""};
  Detail d;
  for (double m : {1.5, 2.0, 3.0}) {
    JkoConfig cfg(FlowModel(Mollifier(KernelFamily::gaussian, 1, 0.1), EnergyModel::power(m)));
    cfg.tau = 1e-3;
    cfg.T = 50 * cfg.tau;
    cfg.n = 64;
    cfg.profile = DensityProfile::uniform(1, 0.0, 1.0);
    const JkoChain chain = run_jko(cfg);
    double worst = -1e300;
    bool ok = chain.records.size() == 51;
    for (std::size_t k = 1; k < chain.states.size(); ++k) {
      const double fp = chain.states[k - 1].energy;
      const double lhs = chain.records[k].dw2 / (2 * cfg.tau) + chain.states[k].energy;
      const double excess = (lhs - fp) / (1.0 + std::abs(fp));
      worst = std::max(worst, excess);
      if (excess > 1e-10) ok = false;
    }
    o.pass = o.pass && ok;
    d << "m=" << m << " worst rel excess " << sci(worst) << (ok ? "" : " VIOLATED") << "; ";
  }
  o.detail = d.str();
  return o;
}

SimulationConfig criterion2_config() {
  SimulationConfig s(FlowModel(Mollifier(KernelFamily::gaussian, 1, 0.2), EnergyModel::power(2.0)));
  s.T = 0.25;
  s.integrator = Integrator::rk4;
  s.record_every = 1;
  s.n = 100;
  s.profile = DensityProfile::barenblatt(Barenblatt(2.0, 1, 1.0), 0.0);
  s.sampler = SamplerKind::quantile;
  return s;
}

// 2. Energy non-increasing along the particle flow.
Outcome c2_particle_dissipation() {
  const Trajectory traj = simulate(criterion2_config());
  double worst = -1e300;
  bool ok = true;
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const double prev = traj.snapshots[k - 1].diag.energy;
    const double inc = traj.snapshots[k].diag.energy - prev;
    worst = std::max(worst, inc);
    if (inc > 1e-8 * std::max(1.0, std::abs(prev))) ok = false;
  }
  Detail d;
  d << traj.snapshots.size() << " snapshots, F " << fix(traj.snapshots.front().diag.energy, 6) << " -> "
    << fix(traj.snapshots.back().diag.energy, 6) << ", largest increment " << sci(worst);
  return {ok, d.str()};
}

// 3. Mass and centre of mass over the criterion-2 run.
Outcome c3_conservation() {
  const Trajectory traj = simulate(criterion2_config());
  const auto com0 = traj.snapshots.front().diag.com;
  double drift = 0;
  bool mass_ok = true;
  const std::size_t n0 = traj.snapshots.front().ensemble.size();
  for (const auto& s : traj.snapshots) {
    drift = std::max(drift, std::abs(s.diag.com[0] - com0[0]));
    const double mass = static_cast<double>(s.ensemble.size()) * s.ensemble.weight();
    if (s.ensemble.size() != n0 || mass != 1.0) mass_ok = false;
  }
  Detail d;
  d << "mass exact: " << (mass_ok ? "yes" : "no") << ", centre-of-mass drift " << sci(drift);
  return {mass_ok && drift <= 1e-8, d.str()};
}

// 4. Quadrature velocity against the closed-form pairwise velocity, m = 2.
Outcome c4_pairwise_equivalence() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Mollifier kernel(KernelFamily::gaussian, 1, 0.25);
  const FlowModel model(kernel, EnergyModel::power(2.0));
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(32);
    for (double& v : x) v = unif(rng);
    const ParticleEnsemble ens(1, x);
    const auto vq = velocity(ens, model);
    const auto vp = pairwise_velocity_m2(ens, kernel);
    for (std::size_t i = 0; i < vq.size(); ++i) worst = std::max(worst, std::abs(vq[i] - vp[i]));
  }
  return {worst <= 1e-6, "max |v_quad - v_pair| over 10 configurations = " + sci(worst)};
}

// 5. Error term: linear decay in eps and the pointwise bound.
Outcome c5_error_term() {
  const ParticleEnsemble ens = ParticleEnsemble::from_1d({-2.25, -1.5, -0.75, 0.0, 0.75, 1.5, 2.25, 0.25});
  const TestFunction phi = TestFunction::poly_bump(1, {0.0, 0.0}, 4.0);
  std::vector<double> norms;
  bool pointwise = true;
  const double gsup = phi.sup_gradient();
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const Mollifier kernel(KernelFamily::bump, 1, eps);
    const double h = eps / 16;
    const double r = phi.support_radius() + kernel.truncation_radius() + h;
    const GridField grid = make_grid(1, {-r, 0.0}, {r, 0.0}, h);
    const ErrorTerm z = error_term_z(ens, kernel, phi, grid);
    norms.push_back(z.l1_norm);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (z.magnitude.values()[i] > 2 * gsup * z.density.values()[i] * (1 + 1e-12) + 1e-300) pointwise = false;
    }
  }
  bool ratios_ok = true;
  Detail d;
  d << "||z||_1:";
  for (double v : norms) d << " " << sci(v);
  d << "; ratios:";
  for (std::size_t k = 1; k < norms.size(); ++k) {
    const double q = norms[k] / norms[k - 1];
    d << " " << fix(q);
    if (!(q >= 0.35 && q <= 0.65)) ratios_ok = false;
  }
  d << "; pointwise bound " << (pointwise ? "holds" : "VIOLATED");
  return {ratios_ok && pointwise, d.str()};
}

// 6. Convexity modulus scaling exponent.
Outcome c6_convexity_scaling() {
  double worst = 0;
  for (double m : {1.5, 2.0, 3.0})
    for (int dim : {1, 2}) {
      const EnergyModel model = EnergyModel::power(m);
      const double l1 = lambda_convexity(Mollifier(KernelFamily::gaussian, dim, 0.15), model).lambda;
      const double l2 = lambda_convexity(Mollifier(KernelFamily::gaussian, dim, 0.30), model).lambda;
      const double expected = std::pow(2.0, 2.0 + dim * (m - 1.0));
      worst = std::max(worst, std::abs(l1 / l2 - expected) / expected);
    }
  return {worst <= 1e-12, "max relative deviation of lambda(eps)/lambda(2 eps) from 2^(2+d(m-1)): " + sci(worst)};
}

double brute_force_w2(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double c = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      auto x = a.position(i);
      auto y = b.position(perm[i]);
      for (int k = 0; k < a.dim(); ++k) c += (x[k] - y[k]) * (x[k] - y[k]);
    }
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(a.size()));
}

ParticleEnsemble random_ensemble(std::mt19937_64& rng, int dim, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> x(n * dim);
  for (double& v : x) v = g(rng);
  return ParticleEnsemble(dim, x);
}

// 7. Wasserstein solvers against brute force; metric axioms.
Outcome c7_wasserstein_oracle() {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const int dim = 1 + (trial / 6) % 2;
    const auto a = random_ensemble(rng, dim, n);
    const auto b = random_ensemble(rng, dim, n);
    const double ref = brute_force_w2(a, b);
    worst = std::max(worst, std::abs(w2_assignment(a, b).value - ref));
    if (dim == 1) worst = std::max(worst, std::abs(w2_1d(a, b).value - ref));
  }
  bool axioms = true;
  std::uniform_int_distribution<std::size_t> size(1, 64);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    const auto a = random_ensemble(rng, 1, n);
    const auto b = random_ensemble(rng, 1, n, 2.0);
    const auto c = random_ensemble(rng, 1, n, 0.5);
    const double ab = w2_1d(a, b).value, ba = w2_1d(b, a).value;
    const double bc = w2_1d(b, c).value, ac = w2_1d(a, c).value;
    if (ab != ba) axioms = false;
    if (ac > ab + bc + 1e-10) axioms = false;
    if (w2_1d(a, a).value != 0.0) axioms = false;
    const double s = shift(rng);
    std::vector<double> as = a.positions(), bs = b.positions();
    for (double& v : as) v += s;
    for (double& v : bs) v += s;
    if (std::abs(w2_1d(ParticleEnsemble(1, as), ParticleEnsemble(1, bs)).value - ab) > 1e-12 * (1 + ab)) axioms = false;
    const double lam = 1.0 + std::abs(s);
    std::vector<double> al = a.positions(), bl = b.positions();
    for (double& v : al) v *= lam;
    for (double& v : bl) v *= lam;
    if (std::abs(w2_1d(ParticleEnsemble(1, al), ParticleEnsemble(1, bl)).value - lam * ab) > 1e-12 * lam * (1 + ab)) axioms = false;
  }
  Detail d;
  d << "200 instances N<=6, max |w2 - brute force| = " << sci(worst) << "; metric axioms "
    << (axioms ? "hold" : "VIOLATED");
  return {worst <= 1e-12 && axioms, d.str()};
}

// 8 and 9: nonlocal to local convergence against the Barenblatt profile.
Outcome barenblatt_ladder(double m, KernelFamily family, bool guard) {
  const Barenblatt bb(m, 1, 1.0);
  const double T = 0.25;
  const std::size_t n = 400;
  const ParticleEnsemble ref =
      initial_sampler(SamplerKind::quantile, DensityProfile::barenblatt(bb, T), n);
  std::vector<double> errs;
  reset_negative_argument_count();
  Detail d;
  for (double eps : {0.4, 0.2, 0.1}) {
    SimulationConfig s(FlowModel(Mollifier(family, 1, eps), EnergyModel::power(m)));
    s.T = T;
    s.n = n;
    s.record_every = 1000000;
    s.profile = DensityProfile::barenblatt(bb, 0.0);
    const Trajectory traj = simulate(s);
    errs.push_back(w2_1d(traj.final_state(), ref).value);
    d << "eps=" << eps << ": w2=" << sci(errs.back()) << " (dt " << sci(traj.dt) << "); ";
  }
  bool ok = errs[1] < errs[0] && errs[2] < errs[1];
  if (!guard) {
    ok = ok && errs[2] * 2.0 <= errs[0];
    d << "reduction factor " << fix(errs[0] / errs[2], 2);
  } else {
    const auto neg = negative_argument_count();
    d << "negative F' evaluations: " << neg;
    ok = ok && neg == 0;
  }
  return {ok, d.str()};
}

Outcome c8_convergence_m2() { return barenblatt_ladder(2.0, KernelFamily::gaussian, false); }
Outcome c9_convergence_m15() { return barenblatt_ladder(1.5, KernelFamily::bump, true); }

// 10. Flow-interchange sums across eps; entropy mass identity.
Outcome c10_flow_interchange() {
  std::vector<double> sums;
  Detail d;
  for (double eps : {0.4, 0.2, 0.1}) {
    JkoConfig cfg(FlowModel(Mollifier(KernelFamily::gaussian, 1, eps), EnergyModel::power(2.0)));
    cfg.tau = 5e-3;
    cfg.T = 0.1;
    cfg.n = 100;
    cfg.profile = DensityProfile::barenblatt(Barenblatt(2.0, 1, 1.0), 0.0);
    const JkoChain chain = run_jko(cfg);
    const auto rep = flow_interchange_diagnostic(chain, cfg.model);
    sums.push_back(rep.dissipation_sum);
    d << "eps=" << eps << ": sum D=" << fix(rep.dissipation_sum, 5) << " (ratio to entropy drop "
      << fix(rep.ratio, 3) << (rep.warning ? ", warn" : "") << "); ";
  }
  const double spread = *std::max_element(sums.begin(), sums.end()) / *std::min_element(sums.begin(), sums.end());
  JkoConfig heat(FlowModel(Mollifier(KernelFamily::gaussian, 1, 0.2), EnergyModel::entropy()));
  heat.tau = 5e-3;
  heat.T = 0.05;
  heat.n = 50;
  heat.profile = DensityProfile::gaussian(1, 0.0, 0.5);
  const JkoChain chain = run_jko(heat);
  const auto rep = flow_interchange_diagnostic(chain, heat.model);
  const double steps_T = heat.tau * static_cast<double>(chain.states.size() - 1);
  const double gap = std::abs(rep.lm_mass_sum - steps_T);
  d << "spread " << fix(spread, 3) << "; m=1 sum tau int v = " << fix(rep.lm_mass_sum, 12) << " vs T="
    << steps_T << " (gap " << sci(gap) << ")";
  return {spread < 3.0 && gap <= 1e-8, d.str()};
}

// 11. Lower bound on F^eps and the moment inequality.
Outcome c11_lower_bound_and_moments() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int lb_fail = 0, mom_fail = 0;
  double min_margin = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const EnergyModel model = trial % 3 == 0 ? EnergyModel::power(1.0 + 2.0 * unif(rng)) : EnergyModel::entropy();
    const double eps = 0.05 + 0.5 * unif(rng);
    const auto family = model.m() < 2.0 && model.kind() == EnergyKind::power ? KernelFamily::bump : KernelFamily::gaussian;
    const Mollifier kernel(family, 1, eps);
    LowerBoundReport r;
    if (trial % 2 == 0) {
      // Gaussian mixture, possibly very wide or very narrow, on a grid.
      const int comps = 1 + static_cast<int>(4 * unif(rng));
      std::vector<double> mu(comps), sg(comps), w(comps);
      double wsum = 0;
      for (int c = 0; c < comps; ++c) {
        mu[c] = 10.0 * (unif(rng) - 0.5);
        sg[c] = std::exp(std::log(0.05) + unif(rng) * std::log(100.0));
        w[c] = 0.1 + unif(rng);
        wsum += w[c];
      }
      double lo = 1e300, hi = -1e300, smin = 1e300;
      for (int c = 0; c < comps; ++c) {
        lo = std::min(lo, mu[c] - 9 * sg[c]);
        hi = std::max(hi, mu[c] + 9 * sg[c]);
        smin = std::min(smin, sg[c]);
      }
      const double h = std::min(smin, eps) / 8;
      GridField rho = sample(make_grid(1, {lo, 0.0}, {hi, 0.0}, h), [&](auto x) {
        double s = 0;
        for (int c = 0; c < comps; ++c) {
          const double u = (x[0] - mu[c]) / sg[c];
          s += w[c] / wsum * std::exp(-0.5 * u * u) / (sg[c] * std::sqrt(2 * std::numbers::pi));
        }
        return s;
      });
      r = lower_bound_check(rho, kernel, model, 1e-6);
    } else {
      // Particle ensembles, including clustered spikes.
      const std::size_t n = 1 + static_cast<std::size_t>(200 * unif(rng));
      std::normal_distribution<double> g(5.0 * (unif(rng) - 0.5), 0.01 + 3 * unif(rng));
      std::vector<double> x(n);
      for (double& v : x) v = g(rng);
      r = lower_bound_check(ParticleEnsemble(1, x), kernel, model, QuadratureSpec{}, 1e-6);
    }
    if (!r.ok) ++lb_fail;
    min_margin = std::min(min_margin, r.lhs - r.rhs);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial;
    const int dim = 1 + trial % 2;
    const auto a = random_ensemble(rng, dim, n, 0.5 + 2 * unif(rng));
    auto b = random_ensemble(rng, dim, n, 0.5 + 2 * unif(rng));
    for (double& v : b.positions()) v += 3.0 * (unif(rng) - 0.5);
    const double w = w2(a, b).value;
    if (m2(b) > (2 * m2(a) + 2 * w * w) * (1 + 1e-6)) ++mom_fail;
  }
  Detail d;
  d << "lower bound failures " << lb_fail << "/50 (min margin " << sci(min_margin)
    << "); moment inequality failures " << mom_fail << "/50";
  return {lb_fail == 0 && mom_fail == 0, d.str()};
}

// 12. Finite-difference oracle against the Barenblatt solution.
double fd_barenblatt_error(double h, double T) {
  const Barenblatt bb(2.0, 1, 1.0);
  const double L = bb.support_radius(T) + 0.75;
  const GridField init = sample(make_grid(1, {-L, 0.0}, {L, 0.0}, h),
                                [&](auto x) { return bb.density(0.0, x); });
  FdPmeOptions opt;
  opt.T = T;
  opt.dt = 2.0 * h * h;
  const auto out = fd_pme_oracle(init, EnergyModel::power(2.0), opt);
  const GridField& f = out.back().field;
  double err = 0;
  for (std::size_t i = 0; i < f.shape()[0]; ++i) {
    err += f.weight(i) * std::abs(f(i) - bb.density(T, f.node(0, i)));
  }
  return err;
}

Outcome c12_fd_oracle() {
  const double T = 0.25;
  const double e128 = fd_barenblatt_error(1.0 / 128, T);
  const double e256 = fd_barenblatt_error(1.0 / 256, T);
  const double e512 = fd_barenblatt_error(1.0 / 512, T);
  const double p1 = std::log2(e128 / e256);
  const double p2 = std::log2(e256 / e512);
  const double order = std::log2(e128 / e512) / 2.0;
  Detail d;
  d << "L1 errors h=1/128: " << sci(e128) << ", 1/256: " << sci(e256) << ", 1/512: " << sci(e512)
    << "; orders " << fix(p1, 3) << ", " << fix(p2, 3) << " (fit " << fix(order, 3) << ")";
  return {e512 <= 1e-3 && order >= 1.7 && order <= 2.3, d.str()};
}

struct Entry {
  int id;
  const char* title;
  Outcome (*run)();
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {1, "JKO energy inequality", c1_jko_energy_inequality},
      {2, "particle energy dissipation", c2_particle_dissipation},
      {3, "mass and centre-of-mass conservation", c3_conservation},
      {4, "m=2 pairwise velocity equivalence", c4_pairwise_equivalence},
      {5, "error term scaling", c5_error_term},
      {6, "convexity modulus scaling", c6_convexity_scaling},
      {7, "Wasserstein oracle equivalence", c7_wasserstein_oracle},
      {8, "nonlocal to local convergence, m=2", c8_convergence_m2},
      {9, "nonlocal to local convergence, m=1.5 bump", c9_convergence_m15},
      {10, "flow-interchange boundedness", c10_flow_interchange},
      {11, "lower bound and moment inequality", c11_lower_bound_and_moments},
      {12, "finite-difference oracle self-validation", c12_fd_oracle},
  };
  return r;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& e : registry()) ids.push_back(e.id);
  return ids;
}

std::string criterion_title(int id) {
  for (const auto& e : registry())
    if (e.id == id) return e.title;
  throw ConfigError("unknown acceptance criterion " + std::to_string(id));
}

CriterionResult run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  const auto start = std::chrono::steady_clock::now();
  try {
    for (const auto& e : registry())
      if (e.id == id) {
        Outcome o = e.run();
        r.pass = o.pass;
        r.detail = o.detail;
      }
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = std::string("error: ") + ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << " ("
    << std::setprecision(2) << std::fixed << r.seconds << "s)";
  return s.str();
}

}  // namespace nld
