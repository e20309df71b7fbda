#include "nld/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nld/errors.hpp"

namespace nld {

ParticleEnsemble::ParticleEnsemble(int dim, std::vector<double> positions, double time)
    : dim_(dim), positions_(std::move(positions)), time_(time) {
  if (dim != 1 && dim != 2) throw SizeError("ensemble dimension must be 1 or 2");
  if (positions_.empty() || positions_.size() % static_cast<std::size_t>(dim) != 0) {
    throw SizeError("ensemble needs N >= 1 particles with d coordinates each");
  }
  for (double x : positions_) {
    if (!std::isfinite(x)) throw DomainError("ensemble coordinates must be finite");
  }
}

std::array<double, 2> ParticleEnsemble::lower() const {
  std::array<double, 2> lo{std::numeric_limits<double>::infinity(), 0.0};
  lo[1] = lo[0];
  for (std::size_t i = 0; i < size(); ++i)
    for (int k = 0; k < dim_; ++k) lo[k] = std::min(lo[k], positions_[i * dim_ + k]);
  if (dim_ == 1) lo[1] = 0.0;
  return lo;
}

std::array<double, 2> ParticleEnsemble::upper() const {
  std::array<double, 2> hi{-std::numeric_limits<double>::infinity(), 0.0};
  hi[1] = hi[0];
  for (std::size_t i = 0; i < size(); ++i)
    for (int k = 0; k < dim_; ++k) hi[k] = std::max(hi[k], positions_[i * dim_ + k]);
  if (dim_ == 1) hi[1] = 0.0;
  return hi;
}

std::array<double, 2> ParticleEnsemble::center_of_mass() const {
  std::array<double, 2> c{0.0, 0.0};
  for (std::size_t i = 0; i < size(); ++i)
    for (int k = 0; k < dim_; ++k) c[k] += positions_[i * dim_ + k];
  for (auto& v : c) v /= static_cast<double>(size());
  return c;
}

ParticleEnsemble ParticleEnsemble::replicated(std::size_t k) const {
  std::vector<double> out;
  out.reserve(positions_.size() * k);
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t r = 0; r < k; ++r)
      for (int a = 0; a < dim_; ++a) out.push_back(positions_[i * dim_ + a]);
  return ParticleEnsemble(dim_, std::move(out), time_);
}

}  // namespace nld
