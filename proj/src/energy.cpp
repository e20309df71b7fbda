#include "nld/energy.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "nld/errors.hpp"
#include "nld/fields.hpp"

namespace nld {

namespace {
std::atomic<std::uint64_t> g_negative_arguments{0};
}

std::uint64_t negative_argument_count() { return g_negative_arguments.load(); }
void reset_negative_argument_count() { g_negative_arguments.store(0); }

EnergyModel EnergyModel::power(double m) {
  if (!(m > 1.0) || !std::isfinite(m)) throw DomainError("power-law energy needs m > 1");
  return EnergyModel(EnergyKind::power, m, m);
}

EnergyModel EnergyModel::entropy() { return EnergyModel(EnergyKind::entropy, 1.0, 1.0); }

std::string EnergyModel::name() const {
  if (kind_ == EnergyKind::entropy) return "entropy";
  std::ostringstream s;
  s << "power(m=" << m_ << ")";
  return s.str();
}

double EnergyModel::f(double x) const {
  if (x < 0) throw DomainError("F evaluated at negative density");
  if (kind_ == EnergyKind::entropy) return x == 0.0 ? 0.0 : x * std::log(x);
  return std::pow(x, m_) / (m_ - 1.0);
}

double EnergyModel::f_prime(double x) const {
  if (kind_ == EnergyKind::entropy) {
    if (!(x > 0)) throw DomainError("entropy F' requires x > 0");
    return std::log(x) + 1.0;
  }
  if (x < 0) {
    g_negative_arguments.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  if (x == 0.0) return 0.0;
  return m_ / (m_ - 1.0) * std::pow(x, m_ - 1.0);
}

double EnergyModel::f_second(double x) const {
  if (kind_ == EnergyKind::entropy) {
    if (!(x > 0)) throw DomainError("entropy F'' requires x > 0");
    return 1.0 / x;
  }
  if (x < 0) throw DomainError("F'' evaluated at negative density");
  if (x == 0.0) {
    if (m_ < 2.0) return std::numeric_limits<double>::infinity();
    return m_ == 2.0 ? 2.0 : 0.0;
  }
  return m_ * std::pow(x, m_ - 2.0);
}

double EnergyModel::pressure(double x) const {
  if (x < 0) throw DomainError("pressure evaluated at negative density");
  if (kind_ == EnergyKind::entropy) return x;
  return std::pow(x, m_);
}

double energy_of_field(const GridField& v, const EnergyModel& model) {
  double sum = 0;
  for (std::size_t i = 0; i < v.shape()[0]; ++i)
    for (std::size_t j = 0; j < v.shape()[1]; ++j) {
      const double x = v(i, j);
      if (x > 0) sum += v.weight(i, j) * model.f(x);
    }
  return sum;
}

double regularized_energy(const ParticleEnsemble& ens, const Mollifier& kernel,
                          const EnergyModel& model, const QuadratureSpec& quad) {
  GridField grid = quadrature_grid(ens, kernel, quad);
  return energy_of_field(mollify(ens, kernel, grid), model);
}

double regularized_energy(const GridField& rho, const Mollifier& kernel,
                          const EnergyModel& model) {
  return energy_of_field(convolve(rho, kernel), model);
}

LmBoundReport lm_norm_bound_check(const GridField& rho0, const Mollifier& kernel,
                                  const EnergyModel& model) {
  LmBoundReport r;
  r.lhs = lp_norm_pow(convolve(rho0, kernel), model.m());
  r.rhs = model.c2() / model.c1() * lp_norm_pow(rho0, model.m());
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-6);
  return r;
}

}  // namespace nld
