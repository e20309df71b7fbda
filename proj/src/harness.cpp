#include "nld/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/io.hpp"
#include "nld/residual.hpp"
#include "nld/transport.hpp"

namespace nld {

namespace fs = std::filesystem;

namespace {
constexpr const char* kVersion = "1.0.0";
}

fs::path output_root() {
  const char* env = std::getenv("NLDIFF_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::current_path();
}

bool RunResult::ok() const {
  if (!error.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second; });
}

double w2_to_profile(const ParticleEnsemble& ens, const DensityProfile& profile,
                     std::size_t resolution) {
  if (ens.dim() != 1) throw DomainError("w2_to_profile is 1D only");
  const std::size_t k = (resolution + ens.size() - 1) / ens.size();
  const ParticleEnsemble ref = initial_sampler(SamplerKind::quantile, profile, k * ens.size());
  return w2_1d(ens.replicated(k), ref).value;
}

namespace {

// Reference profile at the end of the run, when one is known in closed form.
std::optional<DensityProfile> final_reference(const ExperimentConfig& c) {
  if (c.dim != 1) return std::nullopt;
  if (c.initial.kind == "barenblatt" && c.energy == EnergyKind::power &&
      c.initial.m.value_or(c.m) == c.m) {
    return DensityProfile::barenblatt(Barenblatt(c.m, 1, c.initial.t0), c.initial.t + c.T);
  }
  if (c.initial.kind == "gaussian" && c.energy == EnergyKind::entropy) {
    const double var = c.initial.sigma * c.initial.sigma + 2.0 * c.T;
    return DensityProfile::gaussian(1, c.initial.mean, std::sqrt(var));
  }
  return std::nullopt;
}

double l1_to_profile(const GridField& v, const DensityProfile& ref) {
  // The reference may extend beyond v's grid; widen to cover both.
  const double h = v.spacing();
  const GridField g = make_grid(1, {std::min(v.origin()[0], ref.lower()), 0.0},
                                {std::max(v.upper(0), ref.upper()), 0.0}, h);
  double s = 0;
  for (std::size_t i = 0; i < g.shape()[0]; ++i) {
    const double x = g.node(0, i);
    const double fi = std::round((x - v.origin()[0]) / h);
    double vv = 0;
    if (fi >= 0 && fi < static_cast<double>(v.shape()[0])) vv = v(static_cast<std::size_t>(fi));
    s += g.weight(i) * std::abs(vv - ref.density(std::span<const double>(&x, 1)));
  }
  return s;
}

GridField final_field(const ParticleEnsemble& ens, const FlowModel& model) {
  return mollify(ens, model.kernel, quadrature_grid(ens, model.kernel, model.quad));
}

double z_norm(const ParticleEnsemble& ens, const Mollifier& kernel, double h) {
  const int d = ens.dim();
  const auto com = ens.center_of_mass();
  const TestFunction phi = TestFunction::poly_bump(d, com, 1.0);
  const double r = kernel.truncation_radius() + h;
  auto lo = ens.lower();
  auto hi = ens.upper();
  for (int k = 0; k < d; ++k) {
    lo[k] = std::min(lo[k], com[k] - phi.support_radius()) - r;
    hi[k] = std::max(hi[k], com[k] + phi.support_radius()) + r;
  }
  return error_term_z(ens, kernel, phi, make_grid(d, lo, hi, h)).l1_norm;
}

void run_particle(const ExperimentConfig& c, double eps, std::size_t n, RunResult& r) {
  const SimulationConfig sim = c.simulation(eps, n);
  const auto& model = sim.model;
  Trajectory traj = simulate(sim);
  r.tau = traj.dt;
  write_trajectory_csv(r.dir / "trajectory.csv", traj);
  write_diagnostics_csv(r.dir / "diagnostics.csv", traj);

  const auto& snaps = traj.snapshots;
  bool monotone = true;
  double drift = 0;
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    const double prev = snaps[k - 1].diag.energy;
    if (snaps[k].diag.energy > prev + 1e-8 * std::max(1.0, std::abs(prev))) monotone = false;
    for (int a = 0; a < c.dim; ++a)
      drift = std::max(drift, std::abs(snaps[k].diag.com[a] - snaps[0].diag.com[a]));
  }
  r.checks["energy_nonincreasing"] = monotone;
  r.checks["center_of_mass_drift"] = drift <= 1e-8;
  r.metrics["com_drift"] = drift;
  r.metrics["energy_0"] = snaps.front().diag.energy;
  r.metrics["energy_T"] = snaps.back().diag.energy;

  const ParticleEnsemble& fin = traj.final_state();
  const GridField v = final_field(fin, model);
  write_field_csv(r.dir / "field_final.csv", v);
  const double h = quadrature_spacing(model.kernel, model.quad);
  r.metrics["z_l1"] = z_norm(fin, model.kernel, h);
  if (c.dim == 1) {
    r.metrics["w2_initial"] = w2_to_profile(snaps.front().ensemble, c.profile());
    if (auto ref = final_reference(c)) {
      r.metrics["w2_ref"] = w2_to_profile(fin, *ref);
      r.metrics["l1_ref"] = l1_to_profile(v, *ref);
    }
  }
}

void run_jko_experiment(const ExperimentConfig& c, double eps, std::size_t n, RunResult& r) {
  const JkoConfig jc = c.jko(eps, n);
  const JkoChain chain = run_jko(jc);
  r.tau = jc.tau;
  write_jko_steps_csv(r.dir / "jko_steps.csv", chain);
  write_jko_final_csv(r.dir / "jko_final.csv", chain);
  const auto fi = flow_interchange_diagnostic(chain, jc.model);
  const auto b = jko_bounds(chain);
  r.checks["energy_inequality"] = b.energy_inequality_ok;
  r.checks["moment_inequality"] = b.moment_inequality_ok;
  r.checks["cumulative_dw2"] = b.cumulative_ok;
  r.metrics["energy_0"] = chain.records.front().energy;
  r.metrics["energy_T"] = chain.records.back().energy;
  r.metrics["flow_interchange_sum"] = fi.dissipation_sum;
  r.metrics["entropy_drop"] = fi.entropy_drop;
  r.metrics["flow_interchange_ratio"] = fi.ratio;
  r.metrics["flow_interchange_warning"] = fi.warning ? 1.0 : 0.0;
  r.metrics["lm_mass_sum"] = fi.lm_mass_sum;
  r.metrics["holder_constant"] = b.holder_constant;
  r.metrics["max_m2"] = b.max_m2;
  const ParticleEnsemble fin = chain.states.back().ensemble();
  const GridField v = final_field(fin, jc.model);
  write_field_csv(r.dir / "field_final.csv", v);
  r.metrics["w2_initial"] = w2_to_profile(chain.states.front().ensemble(), c.profile());
  if (auto ref = final_reference(c)) {
    r.metrics["w2_ref"] = w2_to_profile(fin, *ref);
    r.metrics["l1_ref"] = l1_to_profile(v, *ref);
  }
}

nlohmann::json manifest(const ExperimentConfig& c, const RunResult& r) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config"] = c.raw;
  j["solver"] = c.solver == SolverKind::jko ? "jko" : "particle";
  j["eps"] = r.eps;
  j["N"] = r.n;
  j["step"] = r.tau;
  j["wall_seconds"] = r.wall_seconds;
  j["metrics"] = r.metrics;
  j["checks"] = r.checks;
  j["error"] = r.error;
  j["ok"] = r.ok();
  std::vector<std::string> files;
  if (fs::exists(r.dir))
    for (const auto& e : fs::directory_iterator(r.dir))
      if (e.path().filename() != "manifest.json") files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  j["artifacts"] = files;
  return j;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, double eps, std::size_t n,
                         const fs::path& dir) {
  RunResult r;
  r.dir = dir;
  r.eps = eps;
  r.n = n;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(dir);
    if (config.solver == SolverKind::jko) run_jko_experiment(config, eps, n, r);
    else run_particle(config, eps, n, r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_json(dir / "manifest.json", manifest(config, r));
  } catch (const std::exception& e) {
    if (r.error.empty()) r.error = e.what();
  }
  return r;
}

namespace {

std::string run_name(double eps, std::size_t n) {
  std::ostringstream s;
  s << "eps_" << format_double(eps) << "_N_" << n;
  return s.str();
}

}  // namespace

ConvergenceReport converge(const ExperimentConfig& config, const fs::path& dir, unsigned threads) {
  struct Job {
    double eps;
    std::size_t n;
  };
  std::vector<Job> jobs;
  for (double e : config.eps_values())
    for (std::size_t n : config.n_values()) jobs.push_back({e, n});

  ConvergenceReport rep;
  rep.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      rep.runs[k] = run_experiment(config, jobs[k].eps, jobs[k].n, dir / run_name(jobs[k].eps, jobs[k].n));
    }
  };
  const unsigned pool = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> workers;
  for (unsigned t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  for (auto& t : workers) t.join();

  for (const auto& r : rep.runs)
    for (const auto& [name, value] : r.metrics)
      rep.rows.push_back({r.eps, r.n, r.tau, name, value, r.dir.filename().string()});

  // Monotonicity flags on each ladder with at least two rungs.
  auto metric_of = [&](double eps, std::size_t n, const std::string& name) -> std::optional<double> {
    for (const auto& r : rep.runs)
      if (r.eps == eps && r.n == n) {
        auto it = r.metrics.find(name);
        if (it != r.metrics.end()) return it->second;
      }
    return std::nullopt;
  };
  std::vector<std::string> names;
  for (const auto& row : rep.rows)
    if (std::find(names.begin(), names.end(), row.metric) == names.end()) names.push_back(row.metric);

  auto eps_ladder = config.eps_values();
  std::sort(eps_ladder.begin(), eps_ladder.end(), std::greater<>());
  auto n_ladder = config.n_values();
  std::sort(n_ladder.begin(), n_ladder.end());
  for (const auto& name : names) {
    if (eps_ladder.size() > 1) {
      for (std::size_t n : n_ladder) {
        MonotoneFlag f{name, "eps", static_cast<double>(n), {}, true};
        std::optional<double> prev;
        for (double e : eps_ladder) {
          auto v = metric_of(e, n, name);
          if (!v) { f.decreasing = false; break; }
          if (prev) {
            f.ratios.push_back(*v / *prev);
            if (!(*v < *prev)) f.decreasing = false;
          }
          prev = v;
        }
        rep.flags.push_back(f);
      }
    }
    if (n_ladder.size() > 1) {
      for (double e : eps_ladder) {
        MonotoneFlag f{name, "N", e, {}, true};
        std::optional<double> prev;
        for (std::size_t n : n_ladder) {
          auto v = metric_of(e, n, name);
          if (!v) { f.decreasing = false; break; }
          if (prev) {
            f.ratios.push_back(*v / *prev);
            if (!(*v < *prev)) f.decreasing = false;
          }
          prev = v;
        }
        rep.flags.push_back(f);
      }
    }
  }
  return rep;
}

void write_convergence_report(const fs::path& dir, const ConvergenceReport& report) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "convergence_report.csv");
    out << "eps,N,step,metric,value,run_dir\n";
    for (const auto& r : report.rows) {
      out << format_double(r.eps) << "," << r.n << "," << format_double(r.tau) << "," << r.metric
          << "," << format_double(r.value) << "," << r.run_dir << "\n";
    }
  }
  std::ofstream out(dir / "convergence_flags.csv");
  out << "metric,ladder,fixed,decreasing,ratios\n";
  for (const auto& f : report.flags) {
    out << f.metric << "," << f.ladder << "," << format_double(f.fixed) << ","
        << (f.decreasing ? "true" : "false") << ",";
    for (std::size_t k = 0; k < f.ratios.size(); ++k) out << (k ? ";" : "") << format_double(f.ratios[k]);
    out << "\n";
  }
}

}  // namespace nld
