#include "nld/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nld/errors.hpp"

namespace nld {

namespace {

using nlohmann::json;

// Collects problems instead of stopping at the first.
struct Checker {
  std::vector<std::string> problems;

  void fail(const std::string& what) { problems.push_back(what); }

  template <class T>
  std::optional<T> get(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(path + key + ": wrong type");
      return std::nullopt;
    }
  }
};

const json& sub(const json& j, const char* key) {
  static const json empty = json::object();
  return j.is_object() && j.contains(key) ? j.at(key) : empty;
}

}  // namespace

EnergyModel ExperimentConfig::energy_model() const {
  return energy == EnergyKind::entropy ? EnergyModel::entropy() : EnergyModel::power(m);
}

Mollifier ExperimentConfig::kernel(double eps_value) const { return Mollifier(family, dim, eps_value); }

FlowModel ExperimentConfig::flow_model(double eps_value) const {
  return FlowModel(kernel(eps_value), energy_model(), quad);
}

DensityProfile ExperimentConfig::profile() const {
  if (initial.kind == "uniform") return DensityProfile::uniform(dim, initial.a, initial.b);
  if (initial.kind == "gaussian") return DensityProfile::gaussian(dim, initial.mean, initial.sigma);
  const double mb = initial.m.value_or(m);
  return DensityProfile::barenblatt(Barenblatt(mb, dim, initial.t0), initial.t);
}

SimulationConfig ExperimentConfig::simulation(double eps_value, std::size_t n_value) const {
  SimulationConfig s(flow_model(eps_value));
  s.T = T;
  s.dt = dt;
  s.integrator = integrator;
  s.record_every = record_every;
  s.profile = profile();
  s.sampler = initial.sampler;
  s.n = n_value;
  s.seed = seed;
  return s;
}

JkoConfig ExperimentConfig::jko(double eps_value, std::size_t n_value) const {
  JkoConfig c(flow_model(eps_value));
  c.tau = tau;
  c.T = T;
  c.n = n_value;
  c.profile = profile();
  c.sampler = initial.sampler;
  c.seed = seed;
  return c;
}

std::vector<double> ExperimentConfig::eps_values() const {
  return eps_sweep.empty() ? std::vector<double>{eps} : eps_sweep;
}

std::vector<std::size_t> ExperimentConfig::n_values() const {
  return n_sweep.empty() ? std::vector<std::size_t>{n} : n_sweep;
}

ExperimentConfig parse_config(const json& j) {
  Checker ck;
  ExperimentConfig c;
  c.raw = j;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  if (auto s = ck.get<std::string>(j, "solver", "")) {
    if (*s == "particle") c.solver = SolverKind::particle;
    else if (*s == "jko") c.solver = SolverKind::jko;
    else ck.fail("solver: expected 'particle' or 'jko', got '" + *s + "'");
  }

  const json& kj = sub(j, "kernel");
  if (auto s = ck.get<std::string>(kj, "family", "kernel.")) {
    try {
      c.family = parse_kernel_family(*s);
    } catch (const Error& e) {
      ck.fail(std::string("kernel.family: ") + e.what());
    }
  }
  if (auto d = ck.get<int>(kj, "d", "kernel.")) c.dim = *d;
  if (c.dim != 1 && c.dim != 2) ck.fail("kernel.d: must be 1 or 2");
  if (kj.contains("eps") && kj.at("eps").is_array()) {
    if (auto v = ck.get<std::vector<double>>(kj, "eps", "kernel.")) c.eps_sweep = *v;
    if (c.eps_sweep.empty()) ck.fail("kernel.eps: sweep list is empty");
  } else if (auto e = ck.get<double>(kj, "eps", "kernel.")) {
    c.eps = *e;
  }
  for (double e : c.eps_values())
    if (!(e > 0) || !std::isfinite(e)) ck.fail("kernel.eps: every value must be positive");

  const json& ej = sub(j, "energy");
  if (auto s = ck.get<std::string>(ej, "kind", "energy.")) {
    if (*s == "power") c.energy = EnergyKind::power;
    else if (*s == "entropy") c.energy = EnergyKind::entropy;
    else ck.fail("energy.kind: expected 'power' or 'entropy', got '" + *s + "'");
  }
  if (auto m = ck.get<double>(ej, "m", "energy.")) c.m = *m;
  if (c.energy == EnergyKind::power && !(c.m > 1.0)) ck.fail("energy.m: power law needs m > 1");
  if (c.energy == EnergyKind::entropy) c.m = 1.0;
  if (c.energy == EnergyKind::power && c.m < 2.0 && c.family == KernelFamily::gaussian) {
    ck.fail("energy.m: 1 < m < 2 needs a compactly supported kernel (family 'bump')");
  }

  if (j.contains("N") && j.at("N").is_array()) {
    if (auto v = ck.get<std::vector<std::size_t>>(j, "N", "")) c.n_sweep = *v;
    if (c.n_sweep.empty()) ck.fail("N: sweep list is empty");
  } else if (auto n = ck.get<long long>(j, "N", "")) {
    if (*n < 1) ck.fail("N: must be >= 1");
    else c.n = static_cast<std::size_t>(*n);
  }
  for (auto n : c.n_values())
    if (n < 1) ck.fail("N: every value must be >= 1");

  if (auto t = ck.get<double>(j, "T", "")) c.T = *t;
  if (!(c.T > 0)) ck.fail("T: must be positive");
  if (auto t = ck.get<double>(j, "dt", "")) c.dt = *t;
  if (c.dt < 0) ck.fail("dt: must be >= 0 (0 selects the default)");
  if (auto t = ck.get<double>(j, "tau", "")) c.tau = *t;
  if (c.solver == SolverKind::jko) {
    const double cap = jko_tau_cap(1);
    if (!(c.tau > 0) || !(c.tau < cap)) {
      std::ostringstream msg;
      msg << "tau: " << c.tau << " violates the one-step well-posedness cap tau < " << cap;
      ck.fail(msg.str());
    }
    if (c.dim != 1) ck.fail("solver 'jko' supports d = 1 only");
  }
  if (auto s = ck.get<std::string>(j, "integrator", "")) {
    try {
      c.integrator = parse_integrator(*s);
    } catch (const Error& e) {
      ck.fail(std::string("integrator: ") + e.what());
    }
  }
  if (auto r = ck.get<long long>(j, "record_every", "")) {
    if (*r < 1) ck.fail("record_every: must be >= 1");
    else c.record_every = static_cast<std::size_t>(*r);
  }
  if (auto s = ck.get<long long>(j, "seed", "")) c.seed = static_cast<std::uint64_t>(*s);
  if (auto s = ck.get<std::string>(j, "output", "")) c.output = *s;

  const json& ij = sub(j, "initial");
  if (auto s = ck.get<std::string>(ij, "kind", "initial.")) c.initial.kind = *s;
  if (c.initial.kind != "uniform" && c.initial.kind != "gaussian" && c.initial.kind != "barenblatt") {
    ck.fail("initial.kind: expected uniform, gaussian or barenblatt, got '" + c.initial.kind + "'");
  }
  if (auto s = ck.get<std::string>(ij, "sampler", "initial.")) {
    try {
      c.initial.sampler = parse_sampler(*s);
    } catch (const Error& e) {
      ck.fail(std::string("initial.sampler: ") + e.what());
    }
  }
  const json& pj = sub(ij, "params");
  if (auto v = ck.get<double>(pj, "a", "initial.params.")) c.initial.a = *v;
  if (auto v = ck.get<double>(pj, "b", "initial.params.")) c.initial.b = *v;
  if (auto v = ck.get<double>(pj, "mean", "initial.params.")) c.initial.mean = *v;
  if (auto v = ck.get<double>(pj, "sigma", "initial.params.")) c.initial.sigma = *v;
  if (auto v = ck.get<double>(pj, "t0", "initial.params.")) c.initial.t0 = *v;
  if (auto v = ck.get<double>(pj, "t", "initial.params.")) c.initial.t = *v;
  if (auto v = ck.get<double>(pj, "m", "initial.params.")) c.initial.m = *v;
  if (c.initial.kind == "uniform" && !(c.initial.b > c.initial.a)) ck.fail("initial.params: need a < b");
  if (c.initial.kind == "gaussian" && !(c.initial.sigma > 0)) ck.fail("initial.params.sigma: must be positive");
  if (c.initial.kind == "barenblatt") {
    if (!(c.initial.m.value_or(c.m) > 1.0)) ck.fail("initial.params.m: Barenblatt needs m > 1");
    if (!(c.initial.t0 + c.initial.t > 0)) ck.fail("initial.params: need t0 + t > 0");
    if (c.dim != 1) ck.fail("initial.kind: Barenblatt sampling supports d = 1 only");
  }
  if (c.dim == 2 && c.initial.sampler != SamplerKind::random) {
    for (auto n : c.n_values()) {
      const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (r * r != n) ck.fail("N: 2D lattice sampling needs perfect squares, got " + std::to_string(n));
    }
  }
  if (c.initial.sampler == SamplerKind::uniform_grid && c.initial.kind != "uniform") {
    ck.fail("initial.sampler: uniform_grid needs initial.kind 'uniform'");
  }

  const json& qj = sub(j, "quadrature");
  if (auto v = ck.get<double>(qj, "h_over_eps", "quadrature.")) {
    c.quad.h_over_eps = *v;
    if (!(*v > 0) || *v > 1.0) ck.fail("quadrature.h_over_eps: must be in (0, 1]");
  }
  if (auto v = ck.get<double>(qj, "pad_factor", "quadrature.")) c.quad.pad_factor = *v;
  if (qj.contains("box")) {
    const json& bj = qj.at("box");
    auto lo = ck.get<std::vector<double>>(bj, "lo", "quadrature.box.");
    auto hi = ck.get<std::vector<double>>(bj, "hi", "quadrature.box.");
    if (!lo || !hi || lo->size() != static_cast<std::size_t>(c.dim) || hi->size() != lo->size()) {
      ck.fail("quadrature.box: needs lo and hi arrays of length d");
    } else {
      Box b;
      for (int k = 0; k < c.dim; ++k) {
        b.lo[k] = (*lo)[k];
        b.hi[k] = (*hi)[k];
        if (!(b.hi[k] > b.lo[k])) ck.fail("quadrature.box: need lo < hi on every axis");
      }
      c.quad.box = b;
    }
  }

  if (!ck.problems.empty()) {
    std::ostringstream msg;
    msg << "invalid configuration (" << ck.problems.size() << " problem"
        << (ck.problems.size() > 1 ? "s" : "") << "):";
    for (const auto& p : ck.problems) msg << "\n  - " << p;
    throw ConfigError(msg.str());
  }
  return c;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(load_json(path)); }

}  // namespace nld
