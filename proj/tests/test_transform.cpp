#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "coxaff/cox_dist.hpp"
#include "coxaff/error.hpp"
#include "coxaff/transform.hpp"

using namespace coxaff;

TEST_CASE("zero horizon gives the identity transform") {
  const FellerModel f{1.0, 1.0, 1.0, 1.0};
  const auto c = cir_transform_closed_form(f, 1.7, 0.0);
  CHECK(c.alpha == 0.0);
  CHECK(c.beta[0] == 0.0);
  const auto o = solve_transform_ode(multivariate_cir(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 1),
                                                      Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)),
                                     1.0, 0.0);
  CHECK(o.alpha == 0.0);
  CHECK(o.beta.isZero());
  CHECK(laplace_hazard(f, 3.0, 0.0) == 1.0);
}

TEST_CASE("closed form against high-precision reference values") {
  // Log-ratio form evaluated at 40 digits.
  const auto c = cir_transform_closed_form(FellerModel{1.0, 1.0, 1.0, 1.0}, 1.0, 1.0);
  CHECK(c.alpha == doctest::Approx(-0.34988229617678618).epsilon(1e-14));
  CHECK(c.beta[0] == doctest::Approx(0.57526456443890539).epsilon(1e-14));
  CHECK(laplace_hazard(FellerModel{1.0, 1.0, 0.5, 1.0}, 1.0, 1.0) ==
        doctest::Approx(0.37545453942482342).epsilon(1e-14));
  CHECK(laplace_hazard(FellerModel{1.0, 1.0, 0.5, 1.0}, 2.0, 1.0) ==
        doctest::Approx(0.14648481779645953).epsilon(1e-14));
}

TEST_CASE("closed form agrees with the Riccati solver on the grid") {
  double worst = 0.0;
  for (double k : {0.01, 0.5, 2.0})
    for (double th : {0.05, 1.0})
      for (double s : {0.05, 0.5})
        for (double mu : {0.5, 1.0, 2.0})
          for (double dt : {0.1, 1.0, 10.0}) {
            const FellerModel f{k, th, s, th};
            const auto c = cir_transform_closed_form(f, mu, dt);
            const auto o = solve_transform_ode(as_affine(f), mu, dt);
            worst = std::max({worst, std::abs(c.alpha - o.alpha), std::abs(c.beta[0] - o.beta[0])});
          }
  CHECK(worst < 1e-8);
}

TEST_CASE("slow mean reversion: closed form and ODE agree") {
  const FellerModel f{0.0043, 0.065, 0.00267, 0.065};
  const double l = laplace_hazard(f, 1.0, 1.0);
  CHECK(l == doctest::Approx(0.93706753551386554).epsilon(1e-13));
  CHECK(std::abs(l - laplace_hazard(as_affine(f), 1.0, 1.0)) < 1e-8);
}

TEST_CASE("Vasicek transform against Gaussian quadrature") {
  const double k = 1.0, th = 0.05, s = 0.01, x0 = 0.05, dt = 1.0;
  const double m = th * dt + (x0 - th) * (1.0 - std::exp(-k * dt)) / k;
  const double v = s * s / (k * k) *
                   (dt - 2.0 * (1.0 - std::exp(-k * dt)) / k + (1.0 - std::exp(-2.0 * k * dt)) / (2.0 * k));
  // Simpson rule for E[exp(-Lambda)], Lambda ~ N(m, v).
  const double sd = std::sqrt(v);
  const int n = 20000;
  const double lo = m - 12.0 * sd, h = 24.0 * sd / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(-x) * std::exp(-0.5 * (x - m) * (x - m) / v) / (sd * std::sqrt(2.0 * M_PI));
  }
  const double quad = acc * h / 3.0;
  CHECK(quad == doctest::Approx(0.95123741920101884).epsilon(1e-12));
  CHECK(std::abs(laplace_hazard(vasicek(k, th, s, x0), 1.0, dt) - quad) < 1e-10);
}

TEST_CASE("deterministic limit") {
  const FellerModel f{1.0, 1.0, 1e-8, 1.0};
  for (double mu : {0.5, 1.0, 2.0})
    CHECK(std::abs(laplace_hazard(f, mu, 1.0) - std::exp(-mu)) < 1e-6);
  const FellerModel g{0.3, 2.0, 1e-8, 2.0};
  CHECK(std::abs(laplace_hazard(g, 1.0, 3.0) - std::exp(-6.0)) < 1e-6);
}

TEST_CASE("transform is decreasing in mu and lies in (0, 1]") {
  const FellerModel f{1.0, 1.0, 0.5, 1.0};
  double prev = laplace_hazard(f, 0.0, 2.0);
  CHECK(prev == 1.0);
  for (double mu = 0.25; mu <= 4.0; mu += 0.25) {
    const double l = laplace_hazard(f, mu, 2.0);
    CHECK(l < prev);
    CHECK(l > 0.0);
    prev = l;
  }
}

TEST_CASE("minus the first derivative at zero is the mean hazard") {
  for (double k : {0.01, 0.5, 2.0})
    for (double th : {0.05, 1.0})
      for (double s : {0.05, 0.5})
        for (double dt : {0.1, 1.0, 10.0}) {
          const FellerModel f{k, th, s, 0.5};
          const Jet l = laplace_hazard(f, Jet::variable(0.0, 1), dt);
          CHECK(-l[1] == doctest::Approx(mean_count(f, dt)).epsilon(1e-6));
        }
}

TEST_CASE("two-factor CIR transform is the product of the factors") {
  const Eigen::Vector2d k(1.0, 0.3), th(0.5, 2.0), s(0.4, 0.7), x0(0.6, 1.5);
  const AffineModel m = multivariate_cir(k, th, s, x0);
  const double l = laplace_hazard(m, 1.3, 2.0);
  const double l1 = laplace_hazard(FellerModel{1.0, 0.5, 0.4, 0.6}, 1.3, 2.0);
  const double l2 = laplace_hazard(FellerModel{0.3, 2.0, 0.7, 1.5}, 1.3, 2.0);
  CHECK(l == doctest::Approx(l1 * l2).epsilon(1e-9));
}

TEST_CASE("preconditions") {
  const FellerModel f{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(cir_transform_closed_form(f, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(cir_transform_closed_form(f, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(solve_transform_ode(as_affine(f), 1.0, -0.5), DomainError);
  AffineModel bad = as_affine(f);
  bad.rho1 = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(solve_transform_ode(bad, 1.0, 1.0), StructuralError);
}

TEST_CASE("negative intensity loading explodes and reports the time") {
  // mu < 0 drives the Feller Riccati equation to a finite-time blow-up.
  AffineModel m = as_affine(FellerModel{0.5, 1.0, 1.0, 1.0});
  m.rho1[0] = -3.0;
  try {
    solve_transform_ode(m, 1.0, 20.0);
    FAIL("expected explosion");
  } catch (const ExplosionError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 20.0);
  }
}
