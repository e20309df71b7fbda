#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nld/energy.hpp"
#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/reference.hpp"

using namespace nld;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("closed-form values of F and its derivatives", "[energy]") {
  const EnergyModel p2 = EnergyModel::power(2.0);
  CHECK(p2.f(3.0) == 9.0);
  CHECK(p2.f_prime(3.0) == 6.0);
  CHECK(p2.f_second(3.0) == 2.0);
  const EnergyModel h = EnergyModel::entropy();
  CHECK(h.f(1.0) == 0.0);
  CHECK(h.f_prime(1.0) == 1.0);
  CHECK(h.f(0.0) == 0.0);
  CHECK_THAT(EnergyModel::power(1.5).f_second(4.0), WithinAbs(0.75, 1e-15));
  CHECK(EnergyModel::power(1.5).f_prime(0.0) == 0.0);
}

TEST_CASE("pressure", "[energy]") {
  CHECK_THAT(EnergyModel::power(3.0).pressure(2.0), WithinAbs(8.0, 1e-14));
  CHECK_THAT(EnergyModel::entropy().pressure(0.7), WithinAbs(0.7, 1e-15));
  for (const auto& m : {EnergyModel::power(1.5), EnergyModel::power(2.0), EnergyModel::entropy()}) {
    CHECK(m.pressure(0.0) == 0.0);
    // P = x F' - F
    for (double x : {0.1, 0.5, 2.0, 7.0})
      CHECK_THAT(m.pressure(x), WithinRel(x * m.f_prime(x) - m.f(x), 1e-12));
  }
}

TEST_CASE("domain errors", "[energy]") {
  CHECK_THROWS_AS(EnergyModel::entropy().f_prime(0.0), DomainError);
  CHECK_THROWS_AS(EnergyModel::entropy().f_second(0.0), DomainError);
  CHECK_THROWS_AS(EnergyModel::power(1.0), DomainError);
  CHECK_THROWS_AS(EnergyModel::power(2.0).f(-1.0), DomainError);
}

TEST_CASE("negative-argument guard", "[energy]") {
  reset_negative_argument_count();
  CHECK(EnergyModel::power(1.5).f_prime(-1e-3) == 0.0);
  CHECK(negative_argument_count() == 1);
  reset_negative_argument_count();
  CHECK(negative_argument_count() == 0);
}

TEST_CASE("convexity probe", "[energy][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0), t01(0.0, 1.0);
  for (const auto& m : {EnergyModel::power(1.5), EnergyModel::power(2.0), EnergyModel::power(3.0),
                        EnergyModel::entropy()}) {
    for (int i = 0; i < 1000; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      const double t = t01(rng);
      REQUIRE(m.f(t * a + (1 - t) * b) <= t * m.f(a) + (1 - t) * m.f(b) + 1e-12);
    }
  }
}

TEST_CASE("derivatives match central differences", "[energy][property]") {
  for (const auto& m : {EnergyModel::power(1.5), EnergyModel::power(2.0), EnergyModel::power(3.0),
                        EnergyModel::entropy()}) {
    for (double x = 0.01; x <= 10.0; x *= 1.3) {
      const double h = 1e-6 * std::max(1.0, x);
      const double d1 = (m.f(x + h) - m.f(x - h)) / (2 * h);
      const double d2 = (m.f_prime(x + h) - m.f_prime(x - h)) / (2 * h);
      REQUIRE_THAT(m.f_prime(x), WithinAbs(d1, 1e-6 * std::max(1.0, std::abs(d1))));
      REQUIRE_THAT(m.f_second(x), WithinAbs(d2, 1e-6 * std::max(1.0, std::abs(d2))));
    }
  }
}

TEST_CASE("F'' sandwich holds with equality", "[energy][property]") {
  for (const auto& m : {EnergyModel::power(1.5), EnergyModel::power(2.5), EnergyModel::entropy()}) {
    for (double x : {0.01, 0.3, 1.0, 4.0}) {
      const double ref = std::pow(x, m.m() - 2.0);
      CHECK_THAT(m.f_second(x), WithinRel(m.c1() * ref, 1e-13));
      CHECK_THAT(m.f_second(x), WithinRel(m.c2() * ref, 1e-13));
    }
  }
}

TEST_CASE("energy of a single particle", "[energy]") {
  // int V_eps^2 = 1 / (2 eps sqrt(pi)) for the Gaussian.
  for (double eps : {0.5, 0.2}) {
    const Mollifier k(KernelFamily::gaussian, 1, eps);
    const double e = regularized_energy(ParticleEnsemble::from_1d({0.0}), k, EnergyModel::power(2.0), {});
    CHECK_THAT(e, WithinRel(1.0 / (2 * eps * std::sqrt(std::numbers::pi)), 1e-10));
  }
  const double e = regularized_energy(ParticleEnsemble::from_1d({0.0}), Mollifier(KernelFamily::gaussian, 1, 0.5),
                                      EnergyModel::power(2.0), {});
  CHECK_THAT(e, WithinAbs(0.564190, 1e-6));
}

TEST_CASE("energy of a gridded Gaussian density", "[energy]") {
  for (double sigma : {0.5, 1.0}) {
    for (double eps : {0.1, 0.3}) {
      const DensityProfile g = DensityProfile::gaussian(1, 0.0, sigma);
      const GridField rho = sample_profile(g, -10 * sigma, 10 * sigma, 0.01);
      const double e = regularized_energy(rho, Mollifier(KernelFamily::gaussian, 1, eps), EnergyModel::power(2.0));
      const double exact = 1.0 / (2.0 * std::sqrt(std::numbers::pi * (sigma * sigma + eps * eps)));
      CHECK_THAT(e, WithinRel(exact, 1e-8));
    }
  }
}

TEST_CASE("Young bound (m-1) F^eps[rho0] <= ||rho0||_m^m", "[energy]") {
  for (double m : {1.5, 2.0, 3.0}) {
    const auto fam = m < 2 ? KernelFamily::bump : KernelFamily::gaussian;
    const Mollifier k(fam, 1, 0.1);
    const GridField ind = sample(make_grid(1, {-0.5, 0.0}, {1.5, 0.0}, 0.005),
                                 [](auto x) { return x[0] >= 0.0 && x[0] <= 1.0 ? 1.0 : 0.0; });
    const EnergyModel model = EnergyModel::power(m);
    CHECK((m - 1) * regularized_energy(ind, k, model) <= lp_norm_pow(ind, m) * (1 + 1e-12));
  }
}

TEST_CASE("L^m contraction check", "[energy]") {
  const EnergyModel p2 = EnergyModel::power(2.0);
  SECTION("indicator of [0,1]") {
    const GridField ind = sample(make_grid(1, {-0.5, 0.0}, {1.5, 0.0}, 0.001),
                                 [](auto x) { return x[0] >= 0.0 && x[0] <= 1.0 ? 1.0 : 0.0; });
    auto r = lm_norm_bound_check(ind, Mollifier(KernelFamily::gaussian, 1, 0.1), p2);
    CHECK(r.ok);
    CHECK(r.lhs <= r.rhs);
  }
  SECTION("Barenblatt profile") {
    const DensityProfile b = DensityProfile::barenblatt(Barenblatt(2.0, 1, 1.0), 0.0);
    const GridField rho = sample_profile(b, b.lower(), b.upper(), 0.005);
    CHECK(lm_norm_bound_check(rho, Mollifier(KernelFamily::gaussian, 1, 0.1), p2).ok);
  }
  SECTION("single grid spike") {
    for (double h : {0.01, 0.001}) {
      GridField spike = make_grid(1, {-1.0, 0.0}, {1.0, 0.0}, h);
      const std::size_t mid = spike.shape()[0] / 2;
      spike(mid) = 1.0 / h;
      auto r = lm_norm_bound_check(spike, Mollifier(KernelFamily::gaussian, 1, 0.1), p2);
      CHECK(r.ok);
      CHECK(std::isfinite(r.lhs));
      CHECK_THAT(r.rhs, WithinRel(1.0 / h, 1e-12));
    }
  }
}

TEST_CASE("energy is translation invariant", "[energy][property]") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> x(40);
  for (double& v : x) v = g(rng);
  for (const auto& model : {EnergyModel::power(2.0), EnergyModel::power(3.0), EnergyModel::entropy()}) {
    const Mollifier k(KernelFamily::gaussian, 1, 0.2);
    const double e0 = regularized_energy(ParticleEnsemble(1, x), k, model, {});
    for (double c : {0.013, 0.37, -1.1}) {
      std::vector<double> y = x;
      for (double& v : y) v += c;
      CHECK_THAT(regularized_energy(ParticleEnsemble(1, y), k, model, {}), WithinAbs(e0, 1e-8));
    }
  }
}

TEST_CASE("energy quadrature is resolved at h = eps/4", "[energy]") {
  std::vector<double> x{-0.3, 0.0, 0.1, 0.45};
  const Mollifier k(KernelFamily::gaussian, 1, 0.2);
  QuadratureSpec coarse, fine;
  fine.h_over_eps = 0.125;
  const double a = regularized_energy(ParticleEnsemble(1, x), k, EnergyModel::power(2.0), coarse);
  const double b = regularized_energy(ParticleEnsemble(1, x), k, EnergyModel::power(2.0), fine);
  CHECK_THAT(a, WithinRel(b, 1e-10));
}

TEST_CASE("bump energy quadrature is resolved at the default spacing", "[energy]") {
  std::vector<double> x{-0.3, 0.0, 0.1, 0.45};
  const Mollifier k(KernelFamily::bump, 1, 0.2);
  QuadratureSpec def, fine, quarter;
  fine.h_over_eps = 1.0 / 64;
  quarter.h_over_eps = 0.25;
  for (double m : {1.5, 2.0, 3.0}) {
    const EnergyModel model = EnergyModel::power(m);
    const double a = regularized_energy(ParticleEnsemble(1, x), k, model, def);
    const double b = regularized_energy(ParticleEnsemble(1, x), k, model, fine);
    const double c = regularized_energy(ParticleEnsemble(1, x), k, model, quarter);
    CHECK_THAT(a, WithinRel(b, 1e-5));
    CHECK(std::abs(a - b) < std::abs(c - b) / 8);
  }
}
