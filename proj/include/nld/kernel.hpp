#pragma once

#include <span>
#include <string>
#include <string_view>

namespace nld {

enum class KernelFamily { gaussian, bump };

KernelFamily parse_kernel_family(std::string_view name);
std::string to_string(KernelFamily family);

/// Radially symmetric mollifier V_eps(x) = eps^{-d} V_1(|x| / eps).
///
/// Two generators are provided: the standard Gaussian (unbounded support)
/// and the C^2 bump c_d (1 - |x|^2)^3 supported in the closed unit ball.
/// The bump constant c_d is found by adaptive quadrature once, at
/// construction. Instances are immutable and safe to share across threads.
class Mollifier {
 public:
  Mollifier(KernelFamily family, int dim, double eps);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  double eps() const { return eps_; }

  /// Support radius of V_1 (1 for the bump, +inf for the Gaussian).
  double unit_support_radius() const;
  /// Radius beyond which V_eps is treated as zero: 8 eps (Gaussian) or eps (bump).
  double truncation_radius() const;

  double operator()(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  /// V_eps and dV_eps/dr as functions of r = |x|.
  double radial(double r) const;
  double radial_derivative(double r) const;
  double radial_second_derivative(double r) const;

  /// Normalisation constant of V_1 (1/(2 pi)^{d/2} for the Gaussian).
  double unit_normalisation() const { return norm_; }

  Mollifier with_eps(double eps) const;

 private:
  double profile(double r) const;     // V_1
  double profile_d1(double r) const;  // V_1'
  double profile_d2(double r) const;  // V_1''

  KernelFamily family_;
  int dim_;
  double eps_;
  double norm_;
  double inv_eps_d_;
};

struct KernelMoments {
  double mass = 0;
  double m1 = 0;        // int |x| V_eps
  double m2 = 0;        // int |x|^2 V_eps
  double sup_v = 0;     // ||V_eps||_inf
  double sup_d2v = 0;   // ||D^2 V_eps||_inf, operator norm
  double l1_gradv = 0;  // ||grad V_eps||_{L^1}
};

/// Closed forms for the Gaussian; radial Gauss-Kronrod quadrature for the bump.
/// Throws QuadratureError if the adaptive integration misses its tolerance.
KernelMoments kernel_moments(const Mollifier& kernel);

/// Surface measure of the unit sphere in R^d (2 for d = 1, 2 pi for d = 2).
double unit_sphere_measure(int dim);

}  // namespace nld
