#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nld {

/// N equal-weight particles in d dimensions, rho^N = (1/N) sum_i delta_{x_i}.
/// Positions are stored row-major (particle i occupies [i*d, i*d + d)).
class ParticleEnsemble {
 public:
  ParticleEnsemble(int dim, std::vector<double> positions, double time = 0.0);

  static ParticleEnsemble from_1d(std::vector<double> xs, double time = 0.0) {
    return ParticleEnsemble(1, std::move(xs), time);
  }

  int dim() const { return dim_; }
  std::size_t size() const { return positions_.size() / static_cast<std::size_t>(dim_); }
  double weight() const { return 1.0 / static_cast<double>(size()); }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::span<const double> position(std::size_t i) const {
    return {positions_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> position(std::size_t i) {
    return {positions_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& positions() const { return positions_; }
  std::vector<double>& positions() { return positions_; }

  std::array<double, 2> lower() const;
  std::array<double, 2> upper() const;
  std::array<double, 2> center_of_mass() const;

  /// Each particle repeated k times; same empirical measure, k*N atoms.
  ParticleEnsemble replicated(std::size_t k) const;

 private:
  int dim_;
  std::vector<double> positions_;
  double time_;
};

}  // namespace nld
