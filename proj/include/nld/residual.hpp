#pragma once

#include <vector>

#include "nld/fields.hpp"
#include "nld/particle_flow.hpp"
#include "nld/reference.hpp"

namespace nld {

struct ResidualSeries {
  std::vector<double> t;         // right end of each interval
  std::vector<double> interval;  // |LHS - RHS| per interval
  double total = 0;              // |sum of signed per-interval defects|
  double max = 0;
};

/// Particle weak form: on each snapshot interval compares the change of
/// (1/N) sum phi(x_i) with the trapezoid in time of (1/N) sum grad phi(x_i) . v_i.
ResidualSeries weak_form_residual(const Trajectory& traj, const FlowModel& model,
                                  const TestFunction& phi);

/// Local weak form of d_t rho = Lap P(rho) evaluated on gridded fields:
/// change of int phi rho against the trapezoid in time of -int grad phi . grad P(rho),
/// grad P by central differences (one-sided at the boundary).
ResidualSeries local_weak_form_residual(const std::vector<TimedField>& fields,
                                        const EnergyModel& model, const TestFunction& phi);

/// Same, with rho replaced by v = V_eps * rho^N on each snapshot's quadrature grid.
ResidualSeries local_weak_form_residual(const Trajectory& traj, const FlowModel& model,
                                        const TestFunction& phi);

/// int grad phi . grad P(field) on the field's grid.
double pressure_flux(const GridField& field, const EnergyModel& model, const TestFunction& phi);

}  // namespace nld
