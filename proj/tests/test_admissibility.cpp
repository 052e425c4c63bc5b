#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coxaff/admissibility.hpp"
#include "coxaff/error.hpp"

using namespace coxaff;

TEST_CASE("Feller as affine: kappa theta > sigma^2 / 2") {
  const auto rep = check_admissibility(as_affine(FellerModel{1.0, 1.0, 1.0, 1.0}));
  REQUIRE(rep.condition_a_part1.size() == 1);
  CHECK(rep.condition_a_part1[0].stochastic);
  REQUIRE(rep.condition_a_part1[0].margins.size() >= 1);
  CHECK(rep.condition_a_part1[0].margins[0] == doctest::Approx(0.5));
  CHECK(rep.ok());

  const auto bad = check_admissibility(as_affine(FellerModel{0.2, 1.0, 1.0, 1.0}));
  CHECK_FALSE(bad.condition_a_ok());
  CHECK_FALSE(bad.messages.empty());
}

TEST_CASE("explicit boundary points") {
  const AffineModel m = as_affine(FellerModel{1.0, 1.0, 1.0, 1.0});
  const auto rep = check_admissibility(m, {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  // Only x = 0 lies on the face.
  REQUIRE(rep.condition_a_part1[0].points.size() == 1);
  CHECK(rep.condition_a_part1[0].ok);
}

TEST_CASE("Vasicek falls to the Gaussian test") {
  const auto rep = check_admissibility(vasicek(1.0, 0.05, 0.01, 0.05));
  CHECK_FALSE(rep.condition_a_part1[0].stochastic);
  CHECK(rep.condition_a_ok());
  REQUIRE(rep.gaussian_factors.size() == 1);
  const auto& g = rep.gaussian_factors[0];
  CHECK(g.mean == 0.05);
  CHECK(g.stddev == doctest::Approx(0.01 / std::sqrt(2.0)));
  CHECK(g.prob_nonnegative > 0.9999);
  CHECK(g.ok);
  CHECK(rep.ok());

  const auto loose = check_admissibility(vasicek(1.0, 0.05, 1.0, 0.05));
  CHECK_FALSE(loose.condition_b_ok());
}

TEST_CASE("certainty threshold is where Phi rounds to one") {
  const double g = gaussian_certainty_threshold();
  CHECK(g > 8.0);
  CHECK(g < 9.0);
  CHECK(0.5 * std::erfc(-g / std::sqrt(2.0)) == 1.0);
}

TEST_CASE("two-factor CIR passes both factors") {
  const auto rep = check_admissibility(multivariate_cir(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1),
                                                        Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)));
  REQUIRE(rep.condition_a_part1.size() == 2);
  for (const auto& c : rep.condition_a_part1) {
    CHECK(c.ok);
    CHECK_FALSE(c.points.empty());
    for (double mg : c.margins) CHECK(mg == doctest::Approx(0.5));
  }
  CHECK(rep.condition_a_part2 == std::vector<bool>{true, true});
  CHECK(rep.ok());
  CHECK(rep.domain_description.size() == 2);
}

TEST_CASE("non-proportional volatilities fail part 2") {
  AffineModel m = multivariate_cir(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1),
                                   Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1));
  m.sigma(0, 1) = 0.5;  // factor 0 now loads the second Brownian motion
  const auto rep = check_admissibility(m);
  CHECK_FALSE(rep.condition_a_part2[0]);
}

TEST_CASE("dimension mismatch is structural") {
  AffineModel m = as_affine(FellerModel{});
  m.b = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(check_admissibility(m), StructuralError);
  CHECK_THROWS_AS(check_admissibility(as_affine(FellerModel{}), {Eigen::VectorXd::Zero(3)}),
                  StructuralError);
}
