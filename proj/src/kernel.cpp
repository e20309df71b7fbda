#include "nld/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "nld/errors.hpp"

namespace nld {

namespace {

constexpr double kGaussianTruncation = 8.0;
constexpr double kQuadTol = 1e-13;

template <class F>
double integrate(F f, double a, double b, const char* what) {
  double err = 0;
  double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 20, kQuadTol, &err);
  if (!std::isfinite(value) || err > 1e-10 * std::max(1.0, std::abs(value))) {
    throw QuadratureError(std::string("adaptive quadrature did not converge for ") +
                          what + " (error estimate " + std::to_string(err) + ")");
  }
  return value;
}

double bump_raw(double r) {
  if (r >= 1.0) return 0.0;
  double s = 1.0 - r * r;
  return s * s * s;
}

double bump_normalisation(int dim) {
  // Cached per dimension; the integrand is a fixed polynomial.
  static const double n1 = 1.0 / integrate([](double r) { return 2.0 * bump_raw(r); },
                                           0.0, 1.0, "bump mass (d=1)");
  static const double n2 =
      1.0 / integrate([](double r) { return 2.0 * std::numbers::pi * r * bump_raw(r); },
                      0.0, 1.0, "bump mass (d=2)");
  return dim == 1 ? n1 : n2;
}

}  // namespace

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "bump") return KernelFamily::bump;
  throw DomainError("unknown kernel family '" + std::string(name) + "'");
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "bump";
}

double unit_sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

Mollifier::Mollifier(KernelFamily family, int dim, double eps)
    : family_(family), dim_(dim), eps_(eps) {
  if (dim != 1 && dim != 2) throw DomainError("mollifier dimension must be 1 or 2");
  if (!(eps > 0) || !std::isfinite(eps)) throw DomainError("mollifier width must be positive");
  norm_ = family == KernelFamily::gaussian ? std::pow(2.0 * std::numbers::pi, -0.5 * dim)
                                           : bump_normalisation(dim);
  inv_eps_d_ = std::pow(eps, -dim);
}

Mollifier Mollifier::with_eps(double eps) const { return Mollifier(family_, dim_, eps); }

double Mollifier::unit_support_radius() const {
  return family_ == KernelFamily::bump ? 1.0 : std::numeric_limits<double>::infinity();
}

double Mollifier::truncation_radius() const {
  return family_ == KernelFamily::bump ? eps_ : kGaussianTruncation * eps_;
}

double Mollifier::profile(double r) const {
  if (family_ == KernelFamily::gaussian) return norm_ * std::exp(-0.5 * r * r);
  return norm_ * bump_raw(r);
}

double Mollifier::profile_d1(double r) const {
  if (family_ == KernelFamily::gaussian) return -r * norm_ * std::exp(-0.5 * r * r);
  if (r >= 1.0) return 0.0;
  double s = 1.0 - r * r;
  return -6.0 * norm_ * r * s * s;
}

double Mollifier::profile_d2(double r) const {
  if (family_ == KernelFamily::gaussian) return (r * r - 1.0) * norm_ * std::exp(-0.5 * r * r);
  if (r >= 1.0) return 0.0;
  double s = 1.0 - r * r;
  return norm_ * s * (30.0 * r * r - 6.0);
}

double Mollifier::radial(double r) const { return inv_eps_d_ * profile(r / eps_); }

double Mollifier::radial_derivative(double r) const {
  return inv_eps_d_ / eps_ * profile_d1(r / eps_);
}

double Mollifier::radial_second_derivative(double r) const {
  return inv_eps_d_ / (eps_ * eps_) * profile_d2(r / eps_);
}

double Mollifier::operator()(std::span<const double> x) const {
  double r2 = 0;
  for (int k = 0; k < dim_; ++k) r2 += x[k] * x[k];
  return radial(std::sqrt(r2));
}

void Mollifier::gradient(std::span<const double> x, std::span<double> out) const {
  if (dim_ == 1) {
    // d/dx f(|x|) = f'(|x|) sign(x); f' is odd so this is f'(x) with f' extended.
    double r = std::abs(x[0]);
    double g = radial_derivative(r);
    out[0] = x[0] < 0 ? -g : (x[0] > 0 ? g : 0.0);
    return;
  }
  double r = std::hypot(x[0], x[1]);
  if (r == 0.0) {
    out[0] = out[1] = 0.0;
    return;
  }
  double g = radial_derivative(r) / r;
  out[0] = g * x[0];
  out[1] = g * x[1];
}

KernelMoments kernel_moments(const Mollifier& kernel) {
  const int d = kernel.dim();
  const double eps = kernel.eps();
  KernelMoments unit;
  if (kernel.family() == KernelFamily::gaussian) {
    unit.mass = 1.0;
    unit.m1 = d == 1 ? std::sqrt(2.0 / std::numbers::pi) : std::sqrt(std::numbers::pi / 2.0);
    unit.m2 = d;
    unit.sup_v = kernel.unit_normalisation();
    unit.sup_d2v = kernel.unit_normalisation();
    // |grad V_1| = |x| V_1 for the Gaussian.
    unit.l1_gradv = unit.m1;
  } else {
    const Mollifier v1 = kernel.with_eps(1.0);
    const double s = unit_sphere_measure(d);
    auto rpow = [d](double r, int extra) { return std::pow(r, d - 1 + extra); };
    unit.mass = integrate([&](double r) { return s * rpow(r, 0) * v1.radial(r); }, 0, 1, "bump mass");
    unit.m1 = integrate([&](double r) { return s * rpow(r, 1) * v1.radial(r); }, 0, 1, "bump m1");
    unit.m2 = integrate([&](double r) { return s * rpow(r, 2) * v1.radial(r); }, 0, 1, "bump m2");
    unit.l1_gradv = integrate(
        [&](double r) { return s * rpow(r, 0) * std::abs(v1.radial_derivative(r)); }, 0, 1,
        "bump |grad V|");
    unit.sup_v = kernel.unit_normalisation();
    // max of |V''| and |V'/r| over [0,1] is attained at r = 0 and equals 6 c_d.
    unit.sup_d2v = 6.0 * kernel.unit_normalisation();
  }
  KernelMoments out;
  out.mass = unit.mass;
  out.m1 = unit.m1 * eps;
  out.m2 = unit.m2 * eps * eps;
  out.sup_v = unit.sup_v * std::pow(eps, -d);
  out.sup_d2v = unit.sup_d2v * std::pow(eps, -d - 2);
  out.l1_gradv = unit.l1_gradv / eps;
  return out;
}

}  // namespace nld
