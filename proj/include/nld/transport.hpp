#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nld/ensemble.hpp"

namespace nld {

enum class DistanceMethod { sorted_1d, assignment_exact };

struct DistanceReport {
  double value = 0;
  DistanceMethod method = DistanceMethod::sorted_1d;
  std::size_t n_points = 0;
};

/// Largest instance accepted by the exact assignment solver.
inline constexpr std::size_t kMaxAssignmentSize = 512;

/// 2-Wasserstein distance between equal-size 1D ensembles via sorted coupling.
DistanceReport w2_1d(const ParticleEnsemble& a, const ParticleEnsemble& b);
/// 1-Wasserstein distance, same coupling.
DistanceReport w1_1d(const ParticleEnsemble& a, const ParticleEnsemble& b);
/// 2-Wasserstein distance in any dimension via an exact linear assignment on
/// |x_i - y_j|^2. N <= kMaxAssignmentSize.
DistanceReport w2_assignment(const ParticleEnsemble& a, const ParticleEnsemble& b);
/// w2_1d in 1D, w2_assignment otherwise.
DistanceReport w2(const ParticleEnsemble& a, const ParticleEnsemble& b);

/// p-th moment (1/N) sum |x_i|^p.
double moment(const ParticleEnsemble& ens, double p);
inline double m1(const ParticleEnsemble& ens) { return moment(ens, 1.0); }
inline double m2(const ParticleEnsemble& ens) { return moment(ens, 2.0); }

struct Assignment {
  std::vector<std::size_t> row_to_col;
  double cost = 0;
};

/// Minimum-cost perfect matching for a dense n x n cost matrix (row-major),
/// shortest augmenting paths with potentials, O(n^3).
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace nld
