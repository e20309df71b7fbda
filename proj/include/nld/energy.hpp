#pragma once

#include <cstdint>
#include <string>

#include "nld/ensemble.hpp"
#include "nld/grid.hpp"
#include "nld/kernel.hpp"

namespace nld {

enum class EnergyKind { power, entropy };

/// Internal energy density F with its derivatives.
///
/// power(m):  F(x) = x^m / (m - 1), m > 1, with F'(0) = 0 when 1 < m < 2.
/// entropy(): F(x) = x log x, extended by F(0) = 0.
/// Both satisfy c1 x^{m-2} <= F''(x) <= c2 x^{m-2} with c1 = c2 = m (power)
/// and c1 = c2 = 1, m = 1 (entropy).
class EnergyModel {
 public:
  static EnergyModel power(double m);
  static EnergyModel entropy();

  EnergyKind kind() const { return kind_; }
  double m() const { return m_; }
  double c1() const { return c_; }
  double c2() const { return c_; }
  std::string name() const;

  /// F(x) for x >= 0; DomainError for x < 0.
  double f(double x) const;
  /// F'(x). Power laws evaluated at x < 0 increment the negative-argument
  /// counter and return F'(0); entropy requires x > 0.
  double f_prime(double x) const;
  /// F''(x); entropy requires x > 0. Power laws with m < 2 return +inf at 0.
  double f_second(double x) const;
  /// P(x) = x F'(x) - F(x): x^m for power laws, x for entropy.
  double pressure(double x) const;

 private:
  EnergyModel(EnergyKind kind, double m, double c) : kind_(kind), m_(m), c_(c) {}
  EnergyKind kind_;
  double m_;
  double c_;
};

/// Process-wide count of F' evaluations requested at negative density.
std::uint64_t negative_argument_count();
void reset_negative_argument_count();

/// F^eps[rho^N] = int F(V_eps * rho^N) by the trapezoid rule on the
/// quadrature grid of `quad`.
double regularized_energy(const ParticleEnsemble& ens, const Mollifier& kernel,
                          const EnergyModel& model, const QuadratureSpec& quad);

/// F^eps[rho] for a gridded density; V_eps * rho is formed by discrete
/// convolution on the density's own grid.
double regularized_energy(const GridField& rho, const Mollifier& kernel,
                          const EnergyModel& model);

/// int F(v) over a grid field (cells with v = 0 contribute 0).
double energy_of_field(const GridField& v, const EnergyModel& model);

struct LmBoundReport {
  double lhs = 0;  // ||V_eps * rho0||_m^m
  double rhs = 0;  // (c2 / c1) ||rho0||_m^m
  bool ok = false;
};

/// Mollification contracts L^m: ||V_eps * rho0||_m^m <= (c2/c1) ||rho0||_m^m.
LmBoundReport lm_norm_bound_check(const GridField& rho0, const Mollifier& kernel,
                                  const EnergyModel& model);

}  // namespace nld
