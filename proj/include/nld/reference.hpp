#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nld/energy.hpp"
#include "nld/ensemble.hpp"
#include "nld/grid.hpp"
#include "nld/kernel.hpp"

namespace nld {

/// Unit-mass Barenblatt solution of d_t rho = Lap rho^m,
///   rho(t, x) = s^{-a} (C - k |x|^2 s^{-2b})_+^{1/(m-1)},  s = t + t0,
/// with a = d/(d(m-1)+2), b = a/d, k = a(m-1)/(2dm) and C fixed by unit mass.
class Barenblatt {
 public:
  Barenblatt(double m, int dim, double t0 = 1.0);

  double m() const { return m_; }
  int dim() const { return dim_; }
  double t0() const { return t0_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double k() const { return k_; }
  double constant() const { return c_; }

  double density(double t, std::span<const double> x) const;
  double density(double t, double x) const { return density(t, std::span<const double>(&x, 1)); }
  double support_radius(double t) const;

  /// 1D only: distribution function and its inverse.
  double cdf(double t, double x) const;
  double quantile(double t, double u) const;

 private:
  double m_;
  int dim_;
  double t0_;
  double alpha_, beta_, k_, c_;
};

/// Heat-equation solution from a centred Gaussian of variance sigma2 per axis.
struct HeatSolution {
  double sigma2 = 1.0;
  int dim = 1;
  double variance(double t) const { return sigma2 + 2.0 * t; }
  double density(double t, std::span<const double> x) const;
  /// Boltzmann entropy int rho log rho = -(d/2) log(2 pi e var).
  double entropy(double t) const;
};

/// Reference density used for initial data and sampling.
struct DensityProfile {
  enum class Kind { uniform, gaussian, barenblatt };

  static DensityProfile uniform(int dim, double a, double b);
  static DensityProfile gaussian(int dim, double mean, double sigma);
  static DensityProfile barenblatt(const Barenblatt& profile, double t);

  Kind kind = Kind::uniform;
  int dim = 1;
  double a = 0.0, b = 1.0;
  double mean = 0.0, sigma = 1.0;
  std::optional<Barenblatt> bb;
  double time = 0.0;

  double density(std::span<const double> x) const;
  /// True when the density factorises over axes (uniform box, Gaussian).
  bool is_product() const { return kind != Kind::barenblatt || dim == 1; }
  /// Per-axis marginal CDF and quantile; DomainError when not a product density.
  double cdf(double x) const;
  double quantile(double u) const;
  /// Bounding interval (per axis) containing the numerical support.
  double lower() const;
  double upper() const;
};

/// Sample a profile on a uniform grid.
GridField sample_profile(const DensityProfile& profile, double lo, double hi, double h);

struct FdPmeOptions {
  double dt = 1e-3;
  double T = 0.25;
  int record_every = 0;  // 0: record only the initial and final states
  double newton_tol = 1e-13;
  int max_newton = 50;
};

struct TimedField {
  double t = 0;
  GridField field;
};

/// Implicit Euler with Newton iterations for d_t rho = (P(rho))_xx on a 1D
/// grid, second-order centred Laplacian, Dirichlet zero at both end nodes.
/// Throws SolverError if Newton fails to converge.
std::vector<TimedField> fd_pme_oracle(const GridField& initial, const EnergyModel& model,
                                      const FdPmeOptions& options);

struct ConvexityReport {
  double lambda = 0;
  double eps = 0;
  double m = 0;
  int dim = 1;
  double scaling_exponent = 0;  // -2 - d(m-1)
};

/// lambda = -c2 ||D^2 V_eps||_inf ||V_eps||_inf^{m-2} / (m - 1); needs m > 1.
ConvexityReport lambda_convexity(const Mollifier& kernel, const EnergyModel& model);

/// exp(-lambda t) * dw0.
double stability_bound(const ConvexityReport& report, double t, double dw0);

/// Constants of the lower bound F^eps >= -c1 - c2 Ct (1 + eps^2 m2(V_1) + m2(rho))^alpha,
/// with F^-(s) <= c1 s + c2 s^alpha and Ct = 4 C_{d,alpha}.
struct LowerBoundConstants {
  double alpha = 0.5;
  double c1 = 0.0;
  double c2 = 0.0;
  double c_d_alpha = 0.0;  // (int (1+|x|)^{-2 alpha/(1-alpha)} dx)^{1-alpha}
  double c_tilde = 0.0;    // 4 c_d_alpha
};
LowerBoundConstants lower_bound_constants(int dim);

struct LowerBoundReport {
  double lhs = 0;
  double rhs = 0;
  double m2 = 0;
  bool ok = false;
};

LowerBoundReport lower_bound_check(const GridField& rho, const Mollifier& kernel,
                                   const EnergyModel& model, double slack = 1e-6);
LowerBoundReport lower_bound_check(const ParticleEnsemble& ens, const Mollifier& kernel,
                                   const EnergyModel& model, const QuadratureSpec& quad,
                                   double slack = 1e-6);

/// Second moment of a gridded density, int |x|^2 rho.
double field_second_moment(const GridField& rho);

}  // namespace nld
