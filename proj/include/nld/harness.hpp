#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nld/config.hpp"

namespace nld {

/// Directory named by NLDIFF_OUTPUT_ROOT, or the working directory.
std::filesystem::path output_root();

struct RunResult {
  std::filesystem::path dir;
  double eps = 0;
  std::size_t n = 0;
  double tau = 0;  // JKO step or particle dt
  std::map<std::string, double> metrics;
  std::map<std::string, bool> checks;  // asserted invariants
  std::string error;                   // empty on success
  double wall_seconds = 0;
  bool ok() const;
};

/// One run of the configured solver at (eps, N). Writes the trajectory or JKO
/// CSVs, the final mollified field and manifest.json into `dir`. Runtime errors
/// are caught and recorded in the manifest; outputs already written stay.
RunResult run_experiment(const ExperimentConfig& config, double eps, std::size_t n,
                         const std::filesystem::path& dir);

struct ConvergenceRow {
  double eps = 0;
  std::size_t n = 0;
  double tau = 0;
  std::string metric;
  double value = 0;
  std::string run_dir;
};

struct MonotoneFlag {
  std::string metric;
  std::string ladder;  // "eps" (decreasing eps) or "N" (increasing N)
  double fixed = 0;    // the N (eps ladder) or eps (N ladder) held fixed
  std::vector<double> ratios;
  bool decreasing = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<MonotoneFlag> flags;
  std::vector<RunResult> runs;
};

/// Runs every (eps, N) of the sweep on a pool of `threads` workers, each in
/// its own directory below `dir`, then reduces the metrics serially.
ConvergenceReport converge(const ExperimentConfig& config, const std::filesystem::path& dir,
                           unsigned threads);

void write_convergence_report(const std::filesystem::path& dir, const ConvergenceReport& report);

/// W2 between a 1D quantile ensemble and the continuous profile, estimated
/// against a reference of at least `resolution` quantile atoms.
double w2_to_profile(const ParticleEnsemble& ens, const DensityProfile& profile,
                     std::size_t resolution = 100000);

}  // namespace nld
