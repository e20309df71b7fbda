#include "nld/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nld/errors.hpp"

namespace nld {

NodeRange nodes_near(const GridField& grid, std::span<const double> x, double r) {
  NodeRange out;
  out.empty = false;
  const double h = grid.spacing();
  for (int k = 0; k < grid.dim(); ++k) {
    const double n = static_cast<double>(grid.shape()[k]);
    double a = std::ceil((x[k] - r - grid.origin()[k]) / h);
    double b = std::floor((x[k] + r - grid.origin()[k]) / h);
    a = std::max(a, 0.0);
    b = std::min(b, n - 1);
    if (a > b) {
      out.empty = true;
      return out;
    }
    out.lo[k] = static_cast<std::size_t>(a);
    out.hi[k] = static_cast<std::size_t>(b);
  }
  return out;
}

namespace {

void check_covers(const GridField& grid, std::span<const double> x, double r, const char* what) {
  for (int k = 0; k < grid.dim(); ++k) {
    if (x[k] - r < grid.origin()[k] || x[k] + r > grid.upper(k)) {
      std::ostringstream msg;
      msg << what << ": point " << x[k] << " on axis " << k << " with radius " << r
          << " leaves the grid [" << grid.origin()[k] << ", " << grid.upper(k) << "]";
      throw CoverageError(msg.str());
    }
  }
}

}  // namespace

GridField mollify_unchecked(const ParticleEnsemble& ens, const Mollifier& kernel,
                            const GridField& grid) {
  if (ens.dim() != grid.dim() || kernel.dim() != grid.dim()) {
    throw SizeError("mollify: dimension mismatch");
  }
  GridField out = grid.like();
  const double w = ens.weight();
  const double r = kernel.truncation_radius();
  for (std::size_t p = 0; p < ens.size(); ++p) {
    for_nodes_near(grid, ens.position(p), r, [&](std::size_t i, std::size_t j, auto off) {
      out(i, j) += w * kernel(off);
    });
  }
  return out;
}

GridField mollify(const ParticleEnsemble& ens, const Mollifier& kernel, const GridField& grid) {
  const double r = kernel.truncation_radius();
  for (std::size_t p = 0; p < ens.size(); ++p) check_covers(grid, ens.position(p), r, "mollify");
  return mollify_unchecked(ens, kernel, grid);
}

GridField convolve(const GridField& rho, const Mollifier& kernel) {
  if (rho.dim() != kernel.dim()) throw SizeError("convolve: dimension mismatch");
  const double h = rho.spacing();
  const double r = kernel.truncation_radius();
  const auto pad = static_cast<std::size_t>(std::ceil(r / h));
  std::array<double, 2> origin = rho.origin();
  std::array<std::size_t, 2> shape = rho.shape();
  for (int k = 0; k < rho.dim(); ++k) {
    origin[k] -= static_cast<double>(pad) * h;
    shape[k] += 2 * pad;
  }
  GridField out(rho.dim(), origin, h, shape);
  std::array<double, 2> x{0.0, 0.0};
  for (std::size_t i = 0; i < rho.shape()[0]; ++i) {
    x[0] = rho.node(0, i);
    for (std::size_t j = 0; j < rho.shape()[1]; ++j) {
      const double mass = rho.weight(i, j) * rho(i, j);
      if (mass == 0.0) continue;
      if (rho.dim() == 2) x[1] = rho.node(1, j);
      std::span<const double> xs(x.data(), static_cast<std::size_t>(rho.dim()));
      for_nodes_near(out, xs, r, [&](std::size_t a, std::size_t b, auto off) {
        out(a, b) += mass * kernel(off);
      });
    }
  }
  return out;
}

std::variant<Mollifier, GridField> self_convolution(const Mollifier& kernel, int h_div) {
  if (kernel.family() == KernelFamily::gaussian) {
    return kernel.with_eps(std::sqrt(2.0) * kernel.eps());
  }
  const double eps = kernel.eps();
  const double h = eps / h_div;
  GridField base = make_grid(kernel.dim(), {-eps, -eps}, {eps, eps}, h);
  base = sample(base, [&](std::span<const double> x) { return kernel(x); });
  return convolve(base, kernel);
}

TestFunction TestFunction::gaussian_bump(int dim, std::array<double, 2> center, double width) {
  if (!(width > 0)) throw DomainError("test function width must be positive");
  return TestFunction(Kind::gaussian_bump, dim, center, width);
}

TestFunction TestFunction::poly_bump(int dim, std::array<double, 2> center, double width) {
  if (!(width > 0)) throw DomainError("test function width must be positive");
  return TestFunction(Kind::poly_bump, dim, center, width);
}

double TestFunction::support_radius() const {
  return kind_ == Kind::poly_bump ? width_ : 8.0 * width_;
}

double TestFunction::value(std::span<const double> x) const {
  double u2 = 0;
  for (int k = 0; k < dim_; ++k) u2 += (x[k] - center_[k]) * (x[k] - center_[k]);
  u2 /= width_ * width_;
  if (kind_ == Kind::gaussian_bump) return std::exp(-0.5 * u2);
  if (u2 >= 1.0) return 0.0;
  double s = 1.0 - u2;
  return s * s * s * s;
}

void TestFunction::gradient(std::span<const double> x, std::span<double> out) const {
  double u2 = 0;
  for (int k = 0; k < dim_; ++k) u2 += (x[k] - center_[k]) * (x[k] - center_[k]);
  u2 /= width_ * width_;
  double factor;
  if (kind_ == Kind::gaussian_bump) {
    factor = -std::exp(-0.5 * u2) / (width_ * width_);
  } else if (u2 >= 1.0) {
    factor = 0.0;
  } else {
    double s = 1.0 - u2;
    factor = -8.0 * s * s * s / (width_ * width_);
  }
  for (int k = 0; k < dim_; ++k) out[k] = factor * (x[k] - center_[k]);
}

double TestFunction::sup_gradient() const {
  if (kind_ == Kind::gaussian_bump) return std::exp(-0.5) / width_;
  // max of 8 u (1 - u^2)^3 at u = 1/sqrt(7)
  const double u = 1.0 / std::sqrt(7.0);
  const double s = 1.0 - u * u;
  return 8.0 * u * s * s * s / width_;
}

double TestFunction::sup_hessian() const {
  if (kind_ == Kind::gaussian_bump) return 1.0 / (width_ * width_);
  return 8.0 / (width_ * width_);
}

ErrorTerm error_term_z(const ParticleEnsemble& ens, const Mollifier& kernel,
                       const TestFunction& phi, const GridField& grid) {
  const int d = grid.dim();
  if (ens.dim() != d || kernel.dim() != d || phi.dim() != d) {
    throw SizeError("error_term_z: dimension mismatch");
  }
  const double r = kernel.truncation_radius();
  check_covers(grid, phi.center(), phi.support_radius() + r, "error_term_z");

  ErrorTerm out;
  out.components.assign(static_cast<std::size_t>(d), grid.like());
  out.density = grid.like();
  const double w = ens.weight();
  std::array<double, 2> gp{0.0, 0.0};
  std::array<double, 2> gx{0.0, 0.0};
  std::array<double, 2> node{0.0, 0.0};
  for (std::size_t p = 0; p < ens.size(); ++p) {
    auto xp = ens.position(p);
    phi.gradient(xp, gp);
    for_nodes_near(grid, xp, r, [&](std::size_t i, std::size_t j, auto off) {
      const double v = w * kernel(off);
      if (v == 0.0) return;
      node[0] = grid.node(0, i);
      if (d == 2) node[1] = grid.node(1, j);
      phi.gradient(std::span<const double>(node.data(), static_cast<std::size_t>(d)), gx);
      for (int k = 0; k < d; ++k) out.components[k](i, j) += v * (gp[k] - gx[k]);
      out.density(i, j) += v;
    });
  }
  out.magnitude = grid.like();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double s = 0;
    for (int k = 0; k < d; ++k) s += out.components[k].values()[n] * out.components[k].values()[n];
    out.magnitude.values()[n] = std::sqrt(s);
  }
  out.l1_norm = out.magnitude.integral();
  return out;
}

double sobolev_seminorm_m2(const GridField& field, double m) {
  GridField u = field.like();
  for (std::size_t n = 0; n < field.size(); ++n) {
    const double v = field.values()[n];
    u.values()[n] = v < 1e-14 ? 0.0 : std::pow(v, 0.5 * m);
  }
  const double h = field.spacing();
  auto diff = [&](int axis, std::size_t i, std::size_t j) {
    const std::size_t n = field.shape()[axis];
    if (n < 2) return 0.0;
    std::size_t k = axis == 0 ? i : j;
    auto at = [&](std::size_t kk) { return axis == 0 ? u(kk, j) : u(i, kk); };
    if (k == 0) return (at(1) - at(0)) / h;
    if (k + 1 == n) return (at(n - 1) - at(n - 2)) / h;
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
  };
  double sum = 0;
  for (std::size_t i = 0; i < field.shape()[0]; ++i) {
    for (std::size_t j = 0; j < field.shape()[1]; ++j) {
      double g2 = 0;
      for (int axis = 0; axis < field.dim(); ++axis) {
        double g = diff(axis, i, j);
        g2 += g * g;
      }
      sum += field.weight(i, j) * g2;
    }
  }
  return sum;
}

double lp_norm_pow(const GridField& field, double p) {
  double sum = 0;
  for (std::size_t i = 0; i < field.shape()[0]; ++i)
    for (std::size_t j = 0; j < field.shape()[1]; ++j) {
      const double v = field(i, j);
      if (v > 0) sum += field.weight(i, j) * (p == 1.0 ? v : std::pow(v, p));
    }
  return sum;
}

}  // namespace nld
