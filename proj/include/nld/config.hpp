#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nld/jko.hpp"
#include "nld/particle_flow.hpp"

namespace nld {

enum class SolverKind { particle, jko };

struct InitialSpec {
  std::string kind = "barenblatt";  // uniform | gaussian | barenblatt
  SamplerKind sampler = SamplerKind::quantile;
  double a = 0.0, b = 1.0;          // uniform
  double mean = 0.0, sigma = 1.0;   // gaussian
  double t0 = 1.0, t = 0.0;         // barenblatt time offset and evaluation time
  std::optional<double> m;          // barenblatt exponent; defaults to the energy's m
};

/// One experiment, parsed from a JSON file. Sweep lists replace the scalar
/// eps / N when non-empty.
struct ExperimentConfig {
  SolverKind solver = SolverKind::particle;
  KernelFamily family = KernelFamily::gaussian;
  int dim = 1;
  double eps = 0.1;
  std::vector<double> eps_sweep;
  EnergyKind energy = EnergyKind::power;
  double m = 2.0;
  std::size_t n = 100;
  std::vector<std::size_t> n_sweep;
  double T = 0.25;
  double dt = 0.0;
  double tau = 1e-3;
  Integrator integrator = Integrator::rk4;
  std::size_t record_every = 10;
  InitialSpec initial;
  QuadratureSpec quad;
  std::uint64_t seed = 0;
  std::string output = "run";
  nlohmann::json raw;

  EnergyModel energy_model() const;
  Mollifier kernel(double eps_value) const;
  FlowModel flow_model(double eps_value) const;
  DensityProfile profile() const;
  SimulationConfig simulation(double eps_value, std::size_t n_value) const;
  JkoConfig jko(double eps_value, std::size_t n_value) const;
  std::vector<double> eps_values() const;
  std::vector<std::size_t> n_values() const;
};

/// Parses and validates; every problem found is reported in one ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace nld
