#include "nld/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nld/ensemble.hpp"
#include "nld/errors.hpp"
#include "nld/kernel.hpp"

namespace nld {

GridField::GridField(int dim, std::array<double, 2> origin, double h,
                     std::array<std::size_t, 2> shape, double fill)
    : dim_(dim), origin_(origin), h_(h), shape_(shape) {
  if (dim != 1 && dim != 2) throw SizeError("grid dimension must be 1 or 2");
  if (!(h > 0)) throw DomainError("grid spacing must be positive");
  if (dim == 1) shape_[1] = 1;
  values_.assign(shape_[0] * shape_[1], fill);
}

double GridField::weight(std::size_t i, std::size_t j) const {
  auto w = [](std::size_t k, std::size_t n) { return (n > 1 && (k == 0 || k + 1 == n)) ? 0.5 : 1.0; };
  if (dim_ == 1) return h_ * w(i, shape_[0]);
  return h_ * h_ * w(i, shape_[0]) * w(j, shape_[1]);
}

double GridField::integral() const {
  double sum = 0;
  for (std::size_t i = 0; i < shape_[0]; ++i)
    for (std::size_t j = 0; j < shape_[1]; ++j) sum += weight(i, j) * (*this)(i, j);
  return sum;
}

double GridField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

GridField make_grid(int dim, std::array<double, 2> lo, std::array<double, 2> hi, double h,
                    std::array<double, 2> anchor) {
  std::array<double, 2> origin{0.0, 0.0};
  std::array<std::size_t, 2> shape{1, 1};
  for (int k = 0; k < dim; ++k) {
    double first = std::floor((lo[k] - anchor[k]) / h);
    double last = std::ceil((hi[k] - anchor[k]) / h);
    origin[k] = anchor[k] + first * h;
    shape[k] = static_cast<std::size_t>(last - first) + 1;
  }
  return GridField(dim, origin, h, shape);
}

double quadrature_padding(const Mollifier& kernel, const QuadratureSpec& quad) {
  if (quad.pad_factor > 0) return quad.pad_factor * kernel.eps();
  return kernel.truncation_radius();
}

double quadrature_spacing(const Mollifier& kernel, const QuadratureSpec& quad) {
  if (quad.h_over_eps > 0) return quad.h_over_eps * kernel.eps();
  return (kernel.family() == KernelFamily::bump ? 0.0625 : 0.25) * kernel.eps();
}

GridField quadrature_grid(const ParticleEnsemble& ens, const Mollifier& kernel,
                          const QuadratureSpec& quad) {
  const int d = ens.dim();
  if (d != kernel.dim()) throw SizeError("ensemble and kernel dimensions differ");
  const double h = quadrature_spacing(kernel, quad);
  const double pad = quadrature_padding(kernel, quad);
  auto lo = ens.lower();
  auto hi = ens.upper();
  if (quad.box) {
    for (int k = 0; k < d; ++k) {
      if (lo[k] - pad < quad.box->lo[k] || hi[k] + pad > quad.box->hi[k]) {
        std::ostringstream msg;
        msg << "quadrature domain too small: particles span [" << lo[k] << ", " << hi[k]
            << "] on axis " << k << " but the box [" << quad.box->lo[k] << ", "
            << quad.box->hi[k] << "] must leave a margin of " << pad;
        throw CoverageError(msg.str());
      }
    }
    return make_grid(d, quad.box->lo, quad.box->hi, h);
  }
  for (int k = 0; k < d; ++k) {
    lo[k] -= pad + h;
    hi[k] += pad + h;
  }
  return make_grid(d, lo, hi, h, ens.center_of_mass());
}

}  // namespace nld
