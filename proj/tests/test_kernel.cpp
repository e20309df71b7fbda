#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nld/errors.hpp"
#include "nld/fields.hpp"
#include "nld/kernel.hpp"

using namespace nld;
using Catch::Approx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double eval1(const Mollifier& k, double x) { return k(std::span<const double>(&x, 1)); }

double grad1(const Mollifier& k, double x) {
  double g = 0;
  k.gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
  return g;
}

template <class F>
double gk(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("gaussian value at the origin", "[kernel]") {
  Mollifier k(KernelFamily::gaussian, 1, 1.0);
  CHECK_THAT(eval1(k, 0.0), WithinAbs(1.0 / std::sqrt(2 * std::numbers::pi), 1e-15));
  CHECK_THAT(eval1(k, 0.0), WithinAbs(0.398942, 1e-6));
}

TEST_CASE("bump vanishes outside its support", "[kernel]") {
  Mollifier k(KernelFamily::bump, 1, 0.5);
  CHECK(eval1(k, 0.6) == 0.0);
  CHECK(eval1(k, 0.5) == 0.0);
  CHECK(eval1(k, -0.5) == 0.0);
  CHECK(eval1(k, 0.4999) > 0.0);
  Mollifier k2(KernelFamily::bump, 2, 0.3);
  std::array<double, 2> x{0.25, 0.2};
  CHECK(k2(x) == 0.0);
}

TEST_CASE("evenness and odd gradients", "[kernel][property]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto fam : {KernelFamily::gaussian, KernelFamily::bump}) {
    for (int d : {1, 2}) {
      Mollifier k(fam, d, 0.7);
      for (int i = 0; i < 1000; ++i) {
        std::array<double, 2> x{u(rng), u(rng)}, mx{-x[0], -x[1]};
        std::array<double, 2> g{}, mg{};
        REQUIRE(k(std::span<const double>(x.data(), d)) == k(std::span<const double>(mx.data(), d)));
        REQUIRE(k(std::span<const double>(x.data(), d)) >= 0.0);
        k.gradient(std::span<const double>(x.data(), d), std::span<double>(g.data(), d));
        k.gradient(std::span<const double>(mx.data(), d), std::span<double>(mg.data(), d));
        for (int a = 0; a < d; ++a) REQUIRE(g[a] == -mg[a]);
      }
    }
  }
  Mollifier k(KernelFamily::gaussian, 2, 0.3);
  std::array<double, 2> a{0.1, -0.2}, b{-0.1, 0.2};
  CHECK(k(a) == k(b));
}

TEST_CASE("gradient closed forms", "[kernel]") {
  for (auto fam : {KernelFamily::gaussian, KernelFamily::bump}) {
    Mollifier k(fam, 2, 0.4);
    std::array<double, 2> zero{0.0, 0.0}, g{1.0, 1.0};
    k.gradient(zero, g);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
  }
  Mollifier k(KernelFamily::gaussian, 1, 1.0);
  CHECK_THAT(grad1(k, 1.0), WithinAbs(-std::exp(-0.5) / std::sqrt(2 * std::numbers::pi), 1e-15));
  CHECK_THAT(grad1(k, 1.0), WithinAbs(-0.241971, 1e-6));
}

TEST_CASE("gradient matches central differences", "[kernel][property]") {
  std::mt19937_64 rng(2);
  const double h = 1e-5;
  for (auto fam : {KernelFamily::gaussian, KernelFamily::bump}) {
    for (int d : {1, 2}) {
      Mollifier k(fam, d, 1.0);
      std::uniform_real_distribution<double> u(-1.2, 1.2);
      double worst = 0;
      for (int i = 0; i < 500; ++i) {
        std::array<double, 2> x{u(rng), u(rng)}, g{};
        k.gradient(std::span<const double>(x.data(), d), std::span<double>(g.data(), d));
        for (int a = 0; a < d; ++a) {
          auto xp = x, xm = x;
          xp[a] += h;
          xm[a] -= h;
          const double fd = (k(std::span<const double>(xp.data(), d)) - k(std::span<const double>(xm.data(), d))) / (2 * h);
          worst = std::max(worst, std::abs(fd - g[a]));
        }
      }
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("scaling law V_eps(x) = eps^-d V_1(x / eps)", "[kernel][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto fam : {KernelFamily::gaussian, KernelFamily::bump}) {
    for (int d : {1, 2}) {
      for (double eps : {0.1, 0.37, 2.0}) {
        Mollifier ke(fam, d, eps), k1(fam, d, 1.0);
        for (int i = 0; i < 100; ++i) {
          std::array<double, 2> x{u(rng) * eps, u(rng) * eps}, xs{x[0] / eps, x[1] / eps};
          const double lhs = ke(std::span<const double>(x.data(), d));
          const double rhs = std::pow(eps, -d) * k1(std::span<const double>(xs.data(), d));
          // 1 - r^2 loses digits near the bump edge, hence the looser relative bound.
          REQUIRE_THAT(lhs, WithinRel(rhs, 1e-11) || WithinAbs(0.0, 1e-300));
        }
      }
    }
  }
}

TEST_CASE("unit mass by adaptive quadrature", "[kernel][property]") {
  for (auto fam : {KernelFamily::gaussian, KernelFamily::bump}) {
    Mollifier k1(fam, 1, 0.3);
    const double r = k1.truncation_radius();
    const double mass = gk([&](double x) { return eval1(k1, x); }, -r, r);
    CHECK_THAT(mass, WithinAbs(1.0, 1e-8));

    Mollifier k2(fam, 2, 0.3);
    // Inner limits follow the support so the integrand stays smooth.
    const bool disc = fam == KernelFamily::bump;
    const double mass2 = gk(
        [&](double x) {
          const double ry = disc ? std::sqrt(std::max(0.0, r * r - x * x)) : r;
          if (ry == 0.0) return 0.0;
          return gk([&](double y) {
            std::array<double, 2> p{x, y};
            return k2(p);
          }, -ry, ry);
        },
        -r, r);
    CHECK_THAT(mass2, WithinAbs(1.0, 1e-8));
  }
}

TEST_CASE("bump normalisation constants", "[kernel]") {
  // c_1 = 35/32, c_2 = 4/pi from the polynomial integrals.
  CHECK_THAT(Mollifier(KernelFamily::bump, 1, 1.0).unit_normalisation(), WithinRel(35.0 / 32.0, 1e-13));
  CHECK_THAT(Mollifier(KernelFamily::bump, 2, 1.0).unit_normalisation(), WithinRel(4.0 / std::numbers::pi, 1e-13));
}

TEST_CASE("kernel moments", "[kernel]") {
  SECTION("gaussian second moment and its eps^2 scaling") {
    CHECK(kernel_moments(Mollifier(KernelFamily::gaussian, 1, 1.0)).m2 == Approx(1.0).epsilon(1e-15));
    CHECK(kernel_moments(Mollifier(KernelFamily::gaussian, 1, 0.5)).m2 == Approx(0.25).epsilon(1e-15));
    CHECK(kernel_moments(Mollifier(KernelFamily::gaussian, 2, 1.0)).m2 == Approx(2.0).epsilon(1e-15));
  }
  SECTION("bump second moment against a Riemann sum") {
    const Mollifier k(KernelFamily::bump, 1, 1.0);
    const int n = 200000;
    double mass = 0, m2 = 0, m1 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * 2.0 / n;
      const double v = eval1(k, x) * 2.0 / n;
      mass += v;
      m1 += std::abs(x) * v;
      m2 += x * x * v;
    }
    const KernelMoments km = kernel_moments(k);
    CHECK_THAT(km.mass, WithinAbs(1.0, 1e-8));
    CHECK_THAT(km.m2, WithinAbs(m2, 1e-9));
    CHECK_THAT(km.m1, WithinAbs(m1, 1e-9));
    CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
  }
  SECTION("bump second moment in 2D against a Riemann sum") {
    const Mollifier k(KernelFamily::bump, 2, 1.0);
    const int n = 1500;
    double m2 = 0;
    const double h = 2.0 / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::array<double, 2> x{-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h};
        m2 += (x[0] * x[0] + x[1] * x[1]) * k(x) * h * h;
      }
    CHECK_THAT(kernel_moments(k).m2, WithinAbs(m2, 1e-6));
  }
  SECTION("sup norms scale exactly") {
    for (auto fam : {KernelFamily::gaussian, KernelFamily::bump})
      for (int d : {1, 2}) {
        const KernelMoments a = kernel_moments(Mollifier(fam, d, 1.0));
        const KernelMoments b = kernel_moments(Mollifier(fam, d, 0.25));
        CHECK_THAT(b.sup_v, WithinRel(a.sup_v * std::pow(0.25, -d), 1e-14));
        CHECK_THAT(b.sup_d2v, WithinRel(a.sup_d2v * std::pow(0.25, -d - 2), 1e-14));
        CHECK_THAT(b.m2, WithinRel(a.m2 * 0.0625, 1e-14));
        CHECK_THAT(b.l1_gradv, WithinRel(a.l1_gradv * 4.0, 1e-14));
      }
  }
  SECTION("sup norms against sampled maxima") {
    for (auto fam : {KernelFamily::gaussian, KernelFamily::bump}) {
      const Mollifier k(fam, 1, 1.0);
      double vmax = 0, d2max = 0;
      for (int i = 0; i <= 40000; ++i) {
        const double r = i * 1e-4;
        vmax = std::max(vmax, k.radial(r));
        d2max = std::max(d2max, std::abs(k.radial_second_derivative(r)));
      }
      const KernelMoments km = kernel_moments(k);
      CHECK_THAT(km.sup_v, WithinRel(vmax, 1e-12));
      CHECK_THAT(km.sup_d2v, WithinRel(d2max, 1e-12));
    }
  }
  SECTION("l1 norm of the gradient against quadrature") {
    const Mollifier k(KernelFamily::bump, 1, 1.0);
    const double l1 = gk([&](double x) { return std::abs(grad1(k, x)); }, -1.0, 0.0) * 2.0;
    CHECK_THAT(kernel_moments(k).l1_gradv, WithinRel(l1, 1e-10));
  }
}

TEST_CASE("self-convolution", "[kernel]") {
  SECTION("gaussian closed form") {
    auto w = self_convolution(Mollifier(KernelFamily::gaussian, 1, 0.2));
    REQUIRE(std::holds_alternative<Mollifier>(w));
    const Mollifier& g = std::get<Mollifier>(w);
    CHECK_THAT(g.eps(), WithinAbs(0.282843, 1e-6));
    const double r = g.truncation_radius();
    CHECK_THAT(gk([&](double x) { return eval1(g, x); }, -r, r), WithinAbs(1.0, 1e-8));
  }
  SECTION("bump grid convolution against direct quadrature") {
    const Mollifier k(KernelFamily::bump, 1, 0.5);
    auto w = self_convolution(k);
    REQUIRE(std::holds_alternative<GridField>(w));
    const GridField& f = std::get<GridField>(w);
    CHECK_THAT(f.integral(), WithinAbs(1.0, 1e-8));
    const double h = f.spacing();
    for (double target : {0.0, 0.1, 0.33, -0.6, 0.9}) {
      const auto i = static_cast<std::size_t>(std::llround((target - f.origin()[0]) / h));
      const double x = f.node(0, i);
      const double a = std::max(-0.5, x - 0.5), b = std::min(0.5, x + 0.5);
      const double direct = a < b ? gk([&](double y) { return eval1(k, x - y) * eval1(k, y); }, a, b) : 0.0;
      CHECK_THAT(f(i), WithinAbs(direct, 1e-6));
      CHECK_THAT(f(i), WithinAbs(f(f.shape()[0] - 1 - i), 1e-12));
    }
  }
}

TEST_CASE("invalid kernel parameters are rejected", "[kernel]") {
  CHECK_THROWS_AS(Mollifier(KernelFamily::gaussian, 3, 1.0), DomainError);
  CHECK_THROWS_AS(Mollifier(KernelFamily::gaussian, 1, 0.0), DomainError);
  CHECK_THROWS_AS(parse_kernel_family("cauchy"), DomainError);
  CHECK(parse_kernel_family("bump") == KernelFamily::bump);
}
