#include "nld/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nld/errors.hpp"

namespace nld {

namespace {

void require_1d_pair(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  if (a.dim() != 1 || b.dim() != 1) throw SizeError("sorted 1D distance needs 1D ensembles");
  if (a.size() != b.size()) throw SizeError("ensembles must have the same number of particles");
}

std::vector<double> sorted(const ParticleEnsemble& e) {
  std::vector<double> x = e.positions();
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

DistanceReport w2_1d(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  require_1d_pair(a, b);
  const auto xa = sorted(a);
  const auto xb = sorted(b);
  double sum = 0;
  for (std::size_t i = 0; i < xa.size(); ++i) sum += (xa[i] - xb[i]) * (xa[i] - xb[i]);
  return {std::sqrt(sum / static_cast<double>(xa.size())), DistanceMethod::sorted_1d, xa.size()};
}

DistanceReport w1_1d(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  require_1d_pair(a, b);
  const auto xa = sorted(a);
  const auto xb = sorted(b);
  double sum = 0;
  for (std::size_t i = 0; i < xa.size(); ++i) sum += std::abs(xa[i] - xb[i]);
  return {sum / static_cast<double>(xa.size()), DistanceMethod::sorted_1d, xa.size()};
}

Assignment solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw SizeError("assignment cost matrix must be n x n");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost[(r0 - 1) * n + (j - 1)] - u[r0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  Assignment out;
  out.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.row_to_col[match[j] - 1] = j - 1;
  // Recompute the cost from the matching rather than the dual value.
  for (std::size_t i = 0; i < n; ++i) out.cost += cost[i * n + out.row_to_col[i]];
  return out;
}

DistanceReport w2_assignment(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  if (a.dim() != b.dim()) throw SizeError("ensembles must share a dimension");
  if (a.size() != b.size()) throw SizeError("ensembles must have the same number of particles");
  const std::size_t n = a.size();
  if (n > kMaxAssignmentSize) {
    throw SizeError("assignment solver limited to " + std::to_string(kMaxAssignmentSize) +
                    " particles, got " + std::to_string(n));
  }
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = a.position(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto y = b.position(j);
      double c = 0;
      for (int k = 0; k < a.dim(); ++k) c += (x[k] - y[k]) * (x[k] - y[k]);
      cost[i * n + j] = c;
    }
  }
  const Assignment sol = solve_assignment(cost, n);
  return {std::sqrt(std::max(0.0, sol.cost) / static_cast<double>(n)),
          DistanceMethod::assignment_exact, n};
}

DistanceReport w2(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  return a.dim() == 1 ? w2_1d(a, b) : w2_assignment(a, b);
}

double moment(const ParticleEnsemble& ens, double p) {
  double sum = 0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    auto x = ens.position(i);
    double r2 = 0;
    for (int k = 0; k < ens.dim(); ++k) r2 += x[k] * x[k];
    sum += p == 2.0 ? r2 : std::pow(std::sqrt(r2), p);
  }
  return sum / static_cast<double>(ens.size());
}

}  // namespace nld
