#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nld/ensemble.hpp"
#include "nld/grid.hpp"
#include "nld/kernel.hpp"

namespace nld {

/// v(y) = (1/N) sum_j V_eps(y - x_j) sampled on `grid`.
/// Throws CoverageError unless every particle's truncated kernel support lies
/// inside the grid.
GridField mollify(const ParticleEnsemble& ens, const Mollifier& kernel, const GridField& grid);

/// Same sum without the coverage check; contributions falling outside the grid are dropped.
GridField mollify_unchecked(const ParticleEnsemble& ens, const Mollifier& kernel,
                            const GridField& grid);

/// Discrete convolution V_eps * rho for a gridded density, returned on the
/// input grid extended by the kernel truncation radius.
GridField convolve(const GridField& rho, const Mollifier& kernel);

/// W_eps = V_eps * V_eps. Closed form (Gaussian of width sqrt(2) eps) for the
/// Gaussian family; grid-sampled discrete convolution with spacing eps/h_div for the bump.
std::variant<Mollifier, GridField> self_convolution(const Mollifier& kernel, int h_div = 128);

/// C^2 test functions with closed-form derivative bounds.
class TestFunction {
 public:
  enum class Kind { gaussian_bump, poly_bump };

  /// exp(-|x - c|^2 / (2 w^2)); numerically supported in |x - c| <= 8 w.
  static TestFunction gaussian_bump(int dim, std::array<double, 2> center, double width);
  /// (1 - |x - c|^2 / w^2)_+^4; supported in |x - c| <= w.
  static TestFunction poly_bump(int dim, std::array<double, 2> center, double width);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::array<double, 2>& center() const { return center_; }
  double width() const { return width_; }
  double support_radius() const;

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  double sup_gradient() const;  // ||grad phi||_inf
  double sup_hessian() const;   // ||D^2 phi||_inf, operator norm

 private:
  TestFunction(Kind kind, int dim, std::array<double, 2> center, double width)
      : kind_(kind), dim_(dim), center_(center), width_(width) {}
  Kind kind_;
  int dim_;
  std::array<double, 2> center_;
  double width_;
};

struct ErrorTerm {
  std::vector<GridField> components;  // z_k on the grid, k < d
  GridField magnitude;                // |z|
  GridField density;                  // v = V_eps * rho^N on the same grid
  double l1_norm = 0;
};

/// Commutator z(x) = (1/N) sum_j V_eps(x - x_j) [grad phi(x_j) - grad phi(x)].
/// The grid must cover supp(phi) padded by the kernel truncation radius.
ErrorTerm error_term_z(const ParticleEnsemble& ens, const Mollifier& kernel,
                       const TestFunction& phi, const GridField& grid);

/// int |grad field^{m/2}|^2 by central differences (one-sided on the boundary).
/// Values below 1e-14 are clamped to zero before taking the power.
double sobolev_seminorm_m2(const GridField& field, double m);

/// int field^p (trapezoid); p = 1 gives the mass.
double lp_norm_pow(const GridField& field, double p);

/// Sample a function of position on every grid node.
template <class F>
GridField sample(GridField grid, F&& f) {
  std::array<double, 2> x{0.0, 0.0};
  for (std::size_t i = 0; i < grid.shape()[0]; ++i) {
    x[0] = grid.node(0, i);
    for (std::size_t j = 0; j < grid.shape()[1]; ++j) {
      if (grid.dim() == 2) x[1] = grid.node(1, j);
      grid(i, j) = f(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
    }
  }
  return grid;
}

// Index ranges of grid nodes within distance r of a point, per axis (inclusive).
struct NodeRange {
  std::array<std::size_t, 2> lo{0, 0};
  std::array<std::size_t, 2> hi{0, 0};
  bool empty = true;
};
NodeRange nodes_near(const GridField& grid, std::span<const double> x, double r);

/// Calls f(i, j, offset) for every node within distance r of x (per axis),
/// where offset = node - x.
template <class F>
void for_nodes_near(const GridField& grid, std::span<const double> x, double r, F&& f) {
  NodeRange range = nodes_near(grid, x, r);
  if (range.empty) return;
  std::array<double, 2> off{0.0, 0.0};
  if (grid.dim() == 1) {
    for (std::size_t i = range.lo[0]; i <= range.hi[0]; ++i) {
      off[0] = grid.node(0, i) - x[0];
      f(i, std::size_t{0}, std::span<const double>(off.data(), 1));
    }
    return;
  }
  for (std::size_t i = range.lo[0]; i <= range.hi[0]; ++i) {
    off[0] = grid.node(0, i) - x[0];
    for (std::size_t j = range.lo[1]; j <= range.hi[1]; ++j) {
      off[1] = grid.node(1, j) - x[1];
      f(i, j, std::span<const double>(off.data(), 2));
    }
  }
}

}  // namespace nld
