#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace nld {

class Mollifier;
class ParticleEnsemble;

/// Scalar field sampled on a uniform tensor grid with equal spacing on each
/// axis. Values are stored row-major with the last axis fastest.
class GridField {
 public:
  GridField() = default;
  GridField(int dim, std::array<double, 2> origin, double h, std::array<std::size_t, 2> shape,
            double fill = 0.0);

  int dim() const { return dim_; }
  double spacing() const { return h_; }
  const std::array<double, 2>& origin() const { return origin_; }
  const std::array<std::size_t, 2>& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  double node(int axis, std::size_t i) const { return origin_[axis] + static_cast<double>(i) * h_; }
  double upper(int axis) const { return node(axis, shape_[axis] - 1); }

  std::size_t index(std::size_t i, std::size_t j = 0) const { return dim_ == 1 ? i : i * shape_[1] + j; }
  double& operator()(std::size_t i, std::size_t j = 0) { return values_[index(i, j)]; }
  double operator()(std::size_t i, std::size_t j = 0) const { return values_[index(i, j)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Product trapezoid weight of node (i, j), including h^d.
  double weight(std::size_t i, std::size_t j = 0) const;
  double integral() const;
  double max_value() const;

  /// Same geometry, new values.
  GridField like(double fill = 0.0) const { return GridField(dim_, origin_, h_, shape_, fill); }

 private:
  int dim_ = 1;
  std::array<double, 2> origin_{0.0, 0.0};
  double h_ = 1.0;
  std::array<std::size_t, 2> shape_{1, 1};
  std::vector<double> values_;
};

/// Node positions anchor + k h covering [lo, hi] on every axis. Grids with the
/// same anchor share node positions on their overlap.
GridField make_grid(int dim, std::array<double, 2> lo, std::array<double, 2> hi, double h,
                    std::array<double, 2> anchor = {0.0, 0.0});

struct Box {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
};

/// Spatial quadrature used for V_eps * rho and every integral against it.
struct QuadratureSpec {
  /// Grid spacing in units of eps; <= 0 selects the family default (1/4 for the
  /// Gaussian, 1/16 for the bump, whose C^2 edge needs finer sampling).
  double h_over_eps = 0.0;
  /// Padding around the particles in units of eps; <= 0 selects the family
  /// default (8 for the Gaussian, the support radius 1 for the bump).
  double pad_factor = 0.0;
  /// Fixed integration box. When absent the box follows the particles.
  std::optional<Box> box;
};

double quadrature_padding(const Mollifier& kernel, const QuadratureSpec& quad);
double quadrature_spacing(const Mollifier& kernel, const QuadratureSpec& quad);

/// Grid for an ensemble: the configured box, or the particle hull padded by the
/// kernel truncation radius on a lattice anchored at the centre of mass. The
/// anchor moves with translations of the ensemble and is conserved by the flow,
/// so a single particle always sits on a node. Throws CoverageError when a
/// particle sits closer than the padding to the boundary of a configured box.
GridField quadrature_grid(const ParticleEnsemble& ens, const Mollifier& kernel,
                          const QuadratureSpec& quad);

}  // namespace nld
