#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coxaff/jet.hpp"
#include "coxaff/transform.hpp"

using coxaff::Jet;

TEST_CASE("exp of the variable gives 1/k!") {
  const Jet e = exp(Jet::variable(0.0, 8));
  double fact = 1.0;
  for (std::size_t k = 0; k <= 8; ++k) {
    if (k > 0) fact *= double(k);
    CHECK(e[k] == doctest::Approx(1.0 / fact).epsilon(1e-15));
  }
}

TEST_CASE("log1p, log and sqrt series") {
  const Jet x = Jet::variable(0.0, 6);
  const Jet l = log1p(x);
  for (std::size_t k = 1; k <= 6; ++k) {
    const double expect = ((k % 2) ? 1.0 : -1.0) / double(k);
    CHECK(l[k] == doctest::Approx(expect).epsilon(1e-15));
  }
  const Jet lg = log(Jet::variable(2.0, 4));
  CHECK(lg[0] == std::log(2.0));
  CHECK(lg[1] == doctest::Approx(0.5));
  CHECK(lg[2] == doctest::Approx(-0.125));
  // sqrt(1 + x) = 1 + x/2 - x^2/8 + x^3/16 - 5 x^4/128
  const Jet s = sqrt(Jet::variable(1.0, 4));
  CHECK(s[1] == doctest::Approx(0.5));
  CHECK(s[2] == doctest::Approx(-0.125));
  CHECK(s[3] == doctest::Approx(0.0625));
  CHECK(s[4] == doctest::Approx(-5.0 / 128.0));
}

TEST_CASE("division inverts multiplication") {
  const Jet a{1.5, -2.0, 0.25, 3.0};
  const Jet b{2.0, 0.5, -1.0, 0.75};
  const Jet q = a / b;
  const Jet back = q * b;
  for (std::size_t k = 0; k < 4; ++k) CHECK(back[k] == doctest::Approx(a[k]).epsilon(1e-14));
  // 1 / (1 - x) = sum x^k
  const Jet g = Jet(1.0) / (1.0 - Jet::variable(0.0, 5));
  for (std::size_t k = 0; k <= 5; ++k) CHECK(g[k] == doctest::Approx(1.0));
}

TEST_CASE("constants mix with any order, different orders do not") {
  const Jet a = Jet::variable(1.0, 3);
  const Jet c = 2.0 * a + 1.0;
  CHECK(c.order() == 3);
  CHECK(c[0] == 3.0);
  CHECK(c[1] == 2.0);
  CHECK_THROWS_AS(a + Jet::variable(1.0, 2), std::logic_error);
  CHECK(a[10] == 0.0);
}

TEST_CASE("pow matches repeated products") {
  const Jet x{1.5, 1.0, 0.0, 0.0};
  const Jet p = pow(x, 3.0);
  const Jet q = x * x * x;
  for (std::size_t k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(q[k]).epsilon(1e-13));
}

TEST_CASE("value part of the closed form is bitwise the scalar result") {
  const coxaff::FellerModel m{0.7, 1.3, 0.45, 0.9};
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    for (double dt : {0.0, 0.1, 1.0, 10.0}) {
      const auto s = coxaff::cir_transform_closed_form(m, mu, dt);
      const auto j = coxaff::cir_transform_closed_form(m, Jet::variable(mu, 6), dt);
      CHECK(j.alpha.value() == s.alpha);
      CHECK(j.beta[0].value() == s.beta[0]);
      const auto so = coxaff::solve_transform_ode(coxaff::as_affine(m), mu, dt);
      const auto jo = coxaff::solve_transform_ode(coxaff::as_affine(m), Jet::variable(mu, 6), dt);
      // The ODE path controls derivative error too, so its steps differ.
      CHECK(std::abs(jo.alpha.value() - so.alpha) < 1e-9);
      CHECK(std::abs(jo.beta[0].value() - so.beta[0]) < 1e-9);
    }
  }
}

TEST_CASE("jets live in Eigen vectors") {
  coxaff::Vec<Jet> v(2);
  v << Jet{1.0, 2.0}, Jet{3.0, 4.0};
  coxaff::Vec<Jet> w = v + v;
  CHECK(w[1][1] == 8.0);
}
