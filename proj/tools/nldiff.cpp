// nldiff: command-line front end for the nonlocal diffusion library.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "nld/acceptance.hpp"
#include "nld/config.hpp"
#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/harness.hpp"
#include "nld/io.hpp"
#include "nld/residual.hpp"
#include "nld/transport.hpp"

namespace fs = std::filesystem;
using namespace nld;

namespace {

fs::path run_dir(const ExperimentConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  fs::path p(cfg.output);
  return p.is_absolute() ? p : output_root() / p;
}

int report_run(const RunResult& r) {
  std::cout << "run directory: " << r.dir.string() << "\n";
  for (const auto& [k, v] : r.metrics) std::cout << "  " << k << " = " << format_double(v) << "\n";
  for (const auto& [k, v] : r.checks) std::cout << "  check " << k << ": " << (v ? "ok" : "FAILED") << "\n";
  if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  return r.ok() ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out, const char* solver) {
  auto j = load_json(config_path);
  j["solver"] = solver;
  const ExperimentConfig cfg = parse_config(j);
  const auto dir = run_dir(cfg, out);
  return report_run(run_experiment(cfg, cfg.eps_values().front(), cfg.n_values().front(), dir));
}

int cmd_diagnose(const std::string& config_path, const std::string& traj_path, double width,
                 const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  const FlowModel model = cfg.flow_model(cfg.eps_values().front());
  const auto ensembles = read_trajectory_csv(traj_path);
  if (ensembles.empty()) throw Error("trajectory is empty");
  Trajectory traj;
  for (const auto& e : ensembles) traj.snapshots.push_back({e, {}});
  const auto com = ensembles.front().center_of_mass();
  const TestFunction phi = TestFunction::poly_bump(cfg.dim, com, width);
  const auto weak = weak_form_residual(traj, model, phi);
  const auto local = local_weak_form_residual(traj, model, phi);

  fs::path dest = out.empty() ? fs::path(traj_path).parent_path() / "diagnose.csv" : fs::path(out);
  std::ofstream csv(dest);
  csv << "t,z_l1,z_bound,weak_residual,local_residual\n";
  const KernelMoments km = kernel_moments(model.kernel);
  const double bound = km.m1 * phi.sup_hessian();
  bool ok = true;
  const double h = quadrature_spacing(model.kernel, model.quad);
  for (std::size_t k = 0; k < ensembles.size(); ++k) {
    const auto& e = ensembles[k];
    auto lo = e.lower();
    auto hi = e.upper();
    const double r = model.kernel.truncation_radius() + h;
    for (int a = 0; a < cfg.dim; ++a) {
      lo[a] = std::min(lo[a], com[a] - width) - r;
      hi[a] = std::max(hi[a], com[a] + width) + r;
    }
    const double z = error_term_z(e, model.kernel, phi, make_grid(cfg.dim, lo, hi, h)).l1_norm;
    if (z > bound * (1 + 1e-6)) ok = false;
    csv << format_double(e.time()) << "," << format_double(z) << "," << format_double(bound) << ","
        << (k ? format_double(weak.interval[k - 1]) : "0") << ","
        << (k ? format_double(local.interval[k - 1]) : "0") << "\n";
  }
  std::cout << "wrote " << dest.string() << "\n  weak-form residual total " << format_double(weak.total)
            << ", local residual total " << format_double(local.total) << "\n  error-term bound "
            << (ok ? "holds" : "VIOLATED") << "\n";
  return ok ? 0 : 1;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out) {
  const auto a = read_trajectory_csv(a_path);
  const auto b = read_trajectory_csv(b_path);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    os = &file;
  }
  *os << "t,w2,method\n";
  std::size_t j = 0;
  for (const auto& ea : a) {
    while (j < b.size() && b[j].time() < ea.time() - 1e-12) ++j;
    if (j == b.size()) break;
    if (std::abs(b[j].time() - ea.time()) > 1e-12) continue;
    const auto d = w2(ea, b[j]);
    *os << format_double(ea.time()) << "," << format_double(d.value) << ","
        << (d.method == DistanceMethod::sorted_1d ? "sorted_1d" : "assignment_exact") << "\n";
  }
  return 0;
}

int cmd_reference(const std::string& config_path, double t, double h, const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  if (cfg.dim != 1) throw ConfigError("reference profiles are emitted in 1D only");
  DensityProfile p = cfg.profile();
  if (p.kind == DensityProfile::Kind::barenblatt) {
    p = DensityProfile::barenblatt(*p.bb, cfg.initial.t + t);
  } else if (p.kind == DensityProfile::Kind::gaussian && cfg.energy == EnergyKind::entropy) {
    p = DensityProfile::gaussian(1, p.mean, std::sqrt(p.sigma * p.sigma + 2 * t));
  } else if (t != 0.0) {
    throw ConfigError("no closed-form evolution for this initial profile and energy");
  }
  const double step = h > 0 ? h : quadrature_spacing(cfg.kernel(cfg.eps_values().front()), cfg.quad);
  const GridField f = sample_profile(p, p.lower(), p.upper(), step);
  const fs::path dest = out.empty() ? output_root() / "reference.csv" : fs::path(out);
  write_field_csv(dest, f);
  std::cout << "wrote " << dest.string() << " (" << f.size() << " nodes, mass "
            << format_double(f.integral()) << ")\n";
  return 0;
}

int cmd_converge(const std::string& config_path, unsigned threads, const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  const auto dir = run_dir(cfg, out);
  const auto rep = converge(cfg, dir, threads);
  write_convergence_report(dir, rep);
  bool ok = true;
  for (const auto& r : rep.runs) {
    std::cout << "eps=" << r.eps << " N=" << r.n << ": " << (r.ok() ? "ok" : "FAILED");
    if (!r.error.empty()) std::cout << " (" << r.error << ")";
    std::cout << "\n";
    ok = ok && r.ok();
  }
  for (const auto& f : rep.flags) {
    std::cout << "  " << f.metric << " over " << f.ladder << " ladder (fixed " << f.fixed
              << "): " << (f.decreasing ? "decreasing" : "not decreasing") << "\n";
  }
  std::cout << "report: " << (dir / "convergence_report.csv").string() << "\n";
  return ok ? 0 : 1;
}

int cmd_accept(const std::vector<int>& ids) {
  bool ok = true;
  for (int id : ids.empty() ? criterion_ids() : ids) {
    const auto r = run_criterion(id);
    std::cout << format_result(r) << std::endl;
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blob-method and JKO solvers for nonlocal approximations of nonlinear diffusion"};
  app.require_subcommand(1);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Worker pool size for sweeps")->check(CLI::PositiveNumber);

  std::string config, out, traj, a_path, b_path;
  double width = 1.0, t = 0.0, h = 0.0;
  std::vector<int> criteria;

  auto* sim = app.add_subcommand("simulate", "Run the particle solver");
  sim->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Run directory (default: <output root>/<output>)");

  auto* jko = app.add_subcommand("jko", "Run the 1D JKO scheme");
  jko->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  jko->add_option("--out", out, "Run directory");

  auto* diag = app.add_subcommand("diagnose", "Error-term and weak-form residuals of a saved trajectory");
  diag->add_option("--config", config, "Experiment JSON used for the run")->required()->check(CLI::ExistingFile);
  diag->add_option("--trajectory", traj, "trajectory.csv")->required()->check(CLI::ExistingFile);
  diag->add_option("--phi-width", width, "Width of the polynomial test bump")->check(CLI::PositiveNumber);
  diag->add_option("--out", out, "Output CSV");

  auto* cmp = app.add_subcommand("compare", "W2 distance between two trajectories at matching times");
  cmp->add_option("a", a_path, "First trajectory.csv")->required()->check(CLI::ExistingFile);
  cmp->add_option("b", b_path, "Second trajectory.csv")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", out, "Output CSV (default: stdout)");

  auto* ref = app.add_subcommand("reference", "Sample the reference profile at time t");
  ref->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  ref->add_option("--time", t, "Time since the initial state")->check(CLI::NonNegativeNumber);
  ref->add_option("--spacing", h, "Grid spacing (default: the quadrature spacing)");
  ref->add_option("--out", out, "Output CSV");

  auto* conv = app.add_subcommand("converge", "Run an eps / N sweep and write a convergence report");
  conv->add_option("--config", config, "Sweep JSON")->required()->check(CLI::ExistingFile);
  conv->add_option("--out", out, "Report directory");

  auto* acc = app.add_subcommand("accept", "Run acceptance criteria");
  acc->add_option("--criterion", criteria, "Criterion id(s), default all")->check(CLI::Range(1, 12));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_run(config, out, "particle");
    if (*jko) return cmd_run(config, out, "jko");
    if (*diag) return cmd_diagnose(config, traj, width, out);
    if (*cmp) return cmd_compare(a_path, b_path, out);
    if (*ref) return cmd_reference(config, t, h, out);
    if (*conv) return cmd_converge(config, threads, out);
    if (*acc) return cmd_accept(criteria);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
