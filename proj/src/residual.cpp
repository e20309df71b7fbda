#include "nld/residual.hpp"

#include <cmath>

#include "nld/errors.hpp"

namespace nld {

namespace {

double particle_mean_phi(const ParticleEnsemble& ens, const TestFunction& phi) {
  double s = 0;
  for (std::size_t i = 0; i < ens.size(); ++i) s += phi.value(ens.position(i));
  return s / static_cast<double>(ens.size());
}

double particle_flux(const ParticleEnsemble& ens, const FlowModel& model, const TestFunction& phi) {
  const auto v = velocity(ens, model);
  const int d = ens.dim();
  std::array<double, 2> g{0.0, 0.0};
  double s = 0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    phi.gradient(ens.position(i), std::span<double>(g.data(), d));
    for (int k = 0; k < d; ++k) s += g[k] * v[i * d + k];
  }
  return s / static_cast<double>(ens.size());
}

ResidualSeries assemble(const std::vector<double>& t, const std::vector<double>& mass_phi,
                        const std::vector<double>& rate) {
  ResidualSeries out;
  double signed_sum = 0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double lhs = mass_phi[k] - mass_phi[k - 1];
    const double rhs = 0.5 * (t[k] - t[k - 1]) * (rate[k] + rate[k - 1]);
    out.t.push_back(t[k]);
    out.interval.push_back(std::abs(lhs - rhs));
    out.max = std::max(out.max, out.interval.back());
    signed_sum += lhs - rhs;
  }
  out.total = std::abs(signed_sum);
  return out;
}

double field_phi(const GridField& f, const TestFunction& phi) {
  GridField p = sample(f.like(), [&](auto x) { return phi.value(x); });
  double s = 0;
  for (std::size_t i = 0; i < f.shape()[0]; ++i)
    for (std::size_t j = 0; j < f.shape()[1]; ++j) s += f.weight(i, j) * f(i, j) * p(i, j);
  return s;
}

}  // namespace

ResidualSeries weak_form_residual(const Trajectory& traj, const FlowModel& model,
                                  const TestFunction& phi) {
  std::vector<double> t, mass_phi, rate;
  for (const auto& snap : traj.snapshots) {
    t.push_back(snap.ensemble.time());
    mass_phi.push_back(particle_mean_phi(snap.ensemble, phi));
    rate.push_back(particle_flux(snap.ensemble, model, phi));
  }
  return assemble(t, mass_phi, rate);
}

double pressure_flux(const GridField& field, const EnergyModel& model, const TestFunction& phi) {
  GridField p = field.like();
  for (std::size_t i = 0; i < p.size(); ++i) p.values()[i] = model.pressure(std::max(0.0, field.values()[i]));
  const double h = field.spacing();
  const int d = field.dim();
  std::array<double, 2> x{0.0, 0.0}, g{0.0, 0.0};
  double s = 0;
  auto diff = [&](int axis, std::size_t i, std::size_t j) {
    const std::size_t n = field.shape()[axis];
    const std::size_t idx = axis == 0 ? i : j;
    auto at = [&](std::size_t q) { return axis == 0 ? p(q, j) : p(i, q); };
    if (n < 2) return 0.0;
    if (idx == 0) return (at(1) - at(0)) / h;
    if (idx == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(idx + 1) - at(idx - 1)) / (2 * h);
  };
  for (std::size_t i = 0; i < field.shape()[0]; ++i) {
    x[0] = field.node(0, i);
    for (std::size_t j = 0; j < field.shape()[1]; ++j) {
      if (d == 2) x[1] = field.node(1, j);
      phi.gradient(std::span<const double>(x.data(), d), std::span<double>(g.data(), d));
      double dot = 0;
      for (int k = 0; k < d; ++k) {
        if (g[k] != 0.0) dot += g[k] * diff(k, i, j);
      }
      s += field.weight(i, j) * dot;
    }
  }
  return s;
}

ResidualSeries local_weak_form_residual(const std::vector<TimedField>& fields,
                                        const EnergyModel& model, const TestFunction& phi) {
  std::vector<double> t, mass_phi, rate;
  for (const auto& f : fields) {
    t.push_back(f.t);
    mass_phi.push_back(field_phi(f.field, phi));
    rate.push_back(-pressure_flux(f.field, model, phi));
  }
  return assemble(t, mass_phi, rate);
}

ResidualSeries local_weak_form_residual(const Trajectory& traj, const FlowModel& model,
                                        const TestFunction& phi) {
  std::vector<TimedField> fields;
  fields.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) {
    const GridField grid = quadrature_grid(snap.ensemble, model.kernel, model.quad);
    fields.push_back({snap.ensemble.time(), mollify(snap.ensemble, model.kernel, grid)});
  }
  return local_weak_form_residual(fields, model.energy, phi);
}

}  // namespace nld
