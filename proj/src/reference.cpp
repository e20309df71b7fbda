#include "nld/reference.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nld/errors.hpp"
#include "nld/fields.hpp"

namespace nld {

Barenblatt::Barenblatt(double m, int dim, double t0) : m_(m), dim_(dim), t0_(t0) {
  if (!(m > 1.0)) throw DomainError("Barenblatt profile needs m > 1");
  if (dim != 1 && dim != 2) throw DomainError("Barenblatt dimension must be 1 or 2");
  if (!(t0 > 0)) throw DomainError("Barenblatt time offset must be positive");
  const double d = dim;
  alpha_ = d / (d * (m - 1.0) + 2.0);
  beta_ = alpha_ / d;
  k_ = alpha_ * (m - 1.0) / (2.0 * d * m);
  const double p = 1.0 / (m - 1.0);
  // unit mass: C^{p+d/2} k^{-d/2} pi^{d/2} Gamma(p+1) / Gamma(p+1+d/2) = 1
  const double log_c = (0.5 * d * std::log(k_) + std::lgamma(p + 1.0 + 0.5 * d) -
                        0.5 * d * std::log(std::numbers::pi) - std::lgamma(p + 1.0)) /
                       (p + 0.5 * d);
  c_ = std::exp(log_c);
}

double Barenblatt::support_radius(double t) const {
  const double s = t + t0_;
  return std::sqrt(c_ / k_) * std::pow(s, beta_);
}

double Barenblatt::density(double t, std::span<const double> x) const {
  const double s = t + t0_;
  if (!(s > 0)) throw DomainError("Barenblatt evaluated before its origin time");
  double r2 = 0;
  for (int a = 0; a < dim_; ++a) r2 += x[a] * x[a];
  const double core = c_ - k_ * r2 * std::pow(s, -2.0 * beta_);
  if (core <= 0) return 0.0;
  return std::pow(s, -alpha_) * std::pow(core, 1.0 / (m_ - 1.0));
}

double Barenblatt::cdf(double t, double x) const {
  if (dim_ != 1) throw DomainError("Barenblatt CDF is only defined in 1D");
  const double r = support_radius(t);
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  const double u = x / r;
  const double p = 1.0 / (m_ - 1.0);
  const double half = 0.5 * boost::math::ibeta(0.5, p + 1.0, u * u);
  return u >= 0 ? 0.5 + half : 0.5 - half;
}

double Barenblatt::quantile(double t, double q) const {
  if (dim_ != 1) throw DomainError("Barenblatt quantile is only defined in 1D");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double r = support_radius(t);
  const double p = 1.0 / (m_ - 1.0);
  const double level = std::abs(2.0 * q - 1.0);
  const double u = level == 0.0 ? 0.0 : std::sqrt(boost::math::ibeta_inv(0.5, p + 1.0, level));
  return q >= 0.5 ? r * u : -r * u;
}

double HeatSolution::density(double t, std::span<const double> x) const {
  const double var = variance(t);
  double r2 = 0;
  for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
  return std::pow(2.0 * std::numbers::pi * var, -0.5 * dim) * std::exp(-0.5 * r2 / var);
}

double HeatSolution::entropy(double t) const {
  return -0.5 * dim * std::log(2.0 * std::numbers::pi * std::numbers::e * variance(t));
}

DensityProfile DensityProfile::uniform(int dim, double a, double b) {
  if (!(b > a)) throw DomainError("uniform profile needs a < b");
  DensityProfile p;
  p.kind = Kind::uniform;
  p.dim = dim;
  p.a = a;
  p.b = b;
  return p;
}

DensityProfile DensityProfile::gaussian(int dim, double mean, double sigma) {
  if (!(sigma > 0)) throw DomainError("gaussian profile needs sigma > 0");
  DensityProfile p;
  p.kind = Kind::gaussian;
  p.dim = dim;
  p.mean = mean;
  p.sigma = sigma;
  return p;
}

DensityProfile DensityProfile::barenblatt(const Barenblatt& profile, double t) {
  DensityProfile p;
  p.kind = Kind::barenblatt;
  p.dim = profile.dim();
  p.bb = profile;
  p.time = t;
  return p;
}

double DensityProfile::density(std::span<const double> x) const {
  switch (kind) {
    case Kind::uniform: {
      double v = 1.0;
      for (int k = 0; k < dim; ++k) v *= (x[k] >= a && x[k] <= b) ? 1.0 / (b - a) : 0.0;
      return v;
    }
    case Kind::gaussian: {
      double v = 1.0;
      for (int k = 0; k < dim; ++k) {
        const double z = (x[k] - mean) / sigma;
        v *= std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
      }
      return v;
    }
    case Kind::barenblatt:
      return bb->density(time, x);
  }
  return 0.0;
}

double DensityProfile::cdf(double x) const {
  switch (kind) {
    case Kind::uniform:
      return std::clamp((x - a) / (b - a), 0.0, 1.0);
    case Kind::gaussian:
      return 0.5 * std::erfc(-(x - mean) / (sigma * std::numbers::sqrt2));
    case Kind::barenblatt:
      if (dim != 1) throw DomainError("unsupported density: 2D Barenblatt is not a product profile");
      return bb->cdf(time, x);
  }
  return 0.0;
}

double DensityProfile::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  switch (kind) {
    case Kind::uniform:
      return a + u * (b - a);
    case Kind::gaussian:
      return mean + sigma * std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
    case Kind::barenblatt:
      if (dim != 1) throw DomainError("unsupported density: 2D Barenblatt is not a product profile");
      return bb->quantile(time, u);
  }
  return 0.0;
}

double DensityProfile::lower() const {
  switch (kind) {
    case Kind::uniform: return a;
    case Kind::gaussian: return mean - 10.0 * sigma;
    case Kind::barenblatt: return -bb->support_radius(time);
  }
  return 0.0;
}

double DensityProfile::upper() const {
  switch (kind) {
    case Kind::uniform: return b;
    case Kind::gaussian: return mean + 10.0 * sigma;
    case Kind::barenblatt: return bb->support_radius(time);
  }
  return 0.0;
}

GridField sample_profile(const DensityProfile& profile, double lo, double hi, double h) {
  GridField grid = make_grid(profile.dim, {lo, lo}, {hi, hi}, h);
  return sample(grid, [&](std::span<const double> x) { return profile.density(x); });
}

namespace {

// Thomas algorithm; a: sub, b: diag, c: super, rhs overwritten with the solution.
void solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                       std::vector<double>& rhs) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

}  // namespace

std::vector<TimedField> fd_pme_oracle(const GridField& initial, const EnergyModel& model,
                                      const FdPmeOptions& options) {
  if (initial.dim() != 1) throw SizeError("fd_pme_oracle is one-dimensional");
  if (!(options.dt > 0) || !(options.T >= 0)) throw DomainError("fd_pme_oracle needs dt > 0, T >= 0");
  const std::size_t n = initial.shape()[0];
  if (n < 3) throw SizeError("fd_pme_oracle needs at least three nodes");

  // Odd extension keeps P and P' defined on Newton undershoots.
  auto pressure = [&](double x) { return x >= 0 ? model.pressure(x) : -model.pressure(-x); };
  auto dpressure = [&](double x) {
    const double a = std::abs(x);
    if (model.kind() == EnergyKind::entropy) return 1.0;
    return a == 0.0 ? 0.0 : model.m() * std::pow(a, model.m() - 1.0);
  };

  const double h = initial.spacing();
  const auto steps = static_cast<long>(std::ceil(options.T / options.dt - 1e-9));
  const double dt = steps > 0 ? options.T / static_cast<double>(steps) : options.dt;
  const double cc = dt / (h * h);

  std::vector<TimedField> out;
  GridField state = initial;
  state(0) = 0.0;
  state(n - 1) = 0.0;
  out.push_back({0.0, state});

  std::vector<double> sub(n), diag(n), sup(n), res(n), p(n), dp(n);
  std::vector<double> prev(n);
  for (long step = 1; step <= steps; ++step) {
    prev = state.values();
    auto& u = state.values();
    bool converged = false;
    double last = 0;
    for (int it = 0; it < options.max_newton; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = pressure(u[i]);
        dp[i] = dpressure(u[i]);
      }
      double rmax = 0, scale = 0;
      res[0] = res[n - 1] = 0.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        res[i] = -(u[i] - prev[i] - cc * (p[i + 1] - 2.0 * p[i] + p[i - 1]));
        rmax = std::max(rmax, std::abs(res[i]));
        scale = std::max(scale, std::abs(prev[i]));
      }
      last = rmax;
      if (rmax <= options.newton_tol * std::max(1.0, scale)) {
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || i + 1 == n) {
          sub[i] = sup[i] = 0.0;
          diag[i] = 1.0;
          continue;
        }
        sub[i] = -cc * dp[i - 1];
        diag[i] = 1.0 + 2.0 * cc * dp[i];
        sup[i] = -cc * dp[i + 1];
      }
      sub[1] = 0.0;
      sup[n - 2] = 0.0;
      solve_tridiagonal(sub, diag, sup, res);
      for (std::size_t i = 1; i + 1 < n; ++i) u[i] += res[i];
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "fd_pme_oracle: Newton iteration diverged at step " << step << " (residual " << last
          << ")";
      throw SolverError(msg.str());
    }
    const bool record = step == steps || (options.record_every > 0 && step % options.record_every == 0);
    if (record) out.push_back({static_cast<double>(step) * dt, state});
  }
  return out;
}

ConvexityReport lambda_convexity(const Mollifier& kernel, const EnergyModel& model) {
  if (model.kind() != EnergyKind::power) {
    throw DomainError("convexity modulus needs a power-law energy with m > 1");
  }
  const KernelMoments km = kernel_moments(kernel);
  ConvexityReport r;
  r.eps = kernel.eps();
  r.m = model.m();
  r.dim = kernel.dim();
  r.scaling_exponent = -2.0 - r.dim * (r.m - 1.0);
  r.lambda = -model.c2() * km.sup_d2v * std::pow(km.sup_v, r.m - 2.0) / (r.m - 1.0);
  return r;
}

double stability_bound(const ConvexityReport& report, double t, double dw0) {
  if (t < 0) throw DomainError("stability bound needs t >= 0");
  return std::exp(-report.lambda * t) * dw0;
}

LowerBoundConstants lower_bound_constants(int dim) {
  LowerBoundConstants k;
  k.alpha = dim == 1 ? 0.5 : 2.0 / 3.0;
  // -s log s <= s^alpha / ((1 - alpha) e); power laws have no negative part.
  k.c1 = 0.0;
  k.c2 = 1.0 / ((1.0 - k.alpha) * std::numbers::e);
  const double q = 2.0 * k.alpha / (1.0 - k.alpha);
  const double integral = dim == 1 ? 2.0 / (q - 1.0)
                                   : 2.0 * std::numbers::pi / ((q - 1.0) * (q - 2.0));
  k.c_d_alpha = std::pow(integral, 1.0 - k.alpha);
  k.c_tilde = 4.0 * k.c_d_alpha;
  return k;
}

double field_second_moment(const GridField& rho) {
  double sum = 0;
  for (std::size_t i = 0; i < rho.shape()[0]; ++i)
    for (std::size_t j = 0; j < rho.shape()[1]; ++j) {
      double r2 = rho.node(0, i) * rho.node(0, i);
      if (rho.dim() == 2) r2 += rho.node(1, j) * rho.node(1, j);
      sum += rho.weight(i, j) * r2 * rho(i, j);
    }
  return sum;
}

namespace {
LowerBoundReport finish_lower_bound(double lhs, double m2, const Mollifier& kernel, double slack) {
  const LowerBoundConstants k = lower_bound_constants(kernel.dim());
  const double m2_v1 = kernel_moments(kernel.with_eps(1.0)).m2;
  const double eps = kernel.eps();
  LowerBoundReport r;
  r.lhs = lhs;
  r.m2 = m2;
  r.rhs = -k.c1 - k.c2 * k.c_tilde * std::pow(1.0 + eps * eps * m2_v1 + m2, k.alpha);
  r.ok = r.lhs >= r.rhs - slack * (1.0 + std::abs(r.rhs));
  return r;
}
}  // namespace

LowerBoundReport lower_bound_check(const GridField& rho, const Mollifier& kernel,
                                   const EnergyModel& model, double slack) {
  return finish_lower_bound(regularized_energy(rho, kernel, model), field_second_moment(rho),
                            kernel, slack);
}

LowerBoundReport lower_bound_check(const ParticleEnsemble& ens, const Mollifier& kernel,
                                   const EnergyModel& model, const QuadratureSpec& quad,
                                   double slack) {
  double m2 = 0;
  for (double x : ens.positions()) m2 += x * x;
  m2 /= static_cast<double>(ens.size());
  return finish_lower_bound(regularized_energy(ens, kernel, model, quad), m2, kernel, slack);
}

}  // namespace nld
