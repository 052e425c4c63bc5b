#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coxaff/model.hpp"

namespace coxaff {

// Drift condition on the face {x : a_i + b_i . x = 0} of the state domain,
// evaluated at the listed boundary points.
struct FactorBoundaryCheck {
  int factor = 0;
  bool stochastic = false;  // b_i != 0
  bool ok = true;           // drift pushes inward at every tested point
  std::vector<Eigen::VectorXd> points;
  std::vector<double> margins;  // b_i.K(Theta-x) - 1/2 b_i' Sigma Sigma' b_i
};

// Nonnegativity test for a factor with constant volatility (Gaussian).
struct GaussianFactorCheck {
  int factor = 0;
  double mean = 0.0;              // mu^D
  double stddev = 0.0;            // sigma^D
  double gamma_star = 0.0;        // inf{g : Phi(g) = 1} in double precision
  double prob_nonnegative = 0.0;  // Phi(mu^D / sigma^D)
  bool mean_positive = false;     // mu^D > 0
  bool ok = false;                // mu^D > 0 and gamma_star * mu^D > sigma^D
};

struct AdmissibilityReport {
  std::vector<FactorBoundaryCheck> condition_a_part1;
  std::vector<bool> condition_a_part2;  // per factor: proportional-volatility rule
  std::vector<GaussianFactorCheck> gaussian_factors;
  std::vector<std::string> domain_description;  // "a_i + b_i.x >= 0" constraints
  std::vector<std::string> messages;

  bool condition_a_ok() const;
  bool condition_b_ok() const;
  bool ok() const { return condition_a_ok() && condition_b_ok(); }
};

// Smallest g with Phi(g) == 1 in double arithmetic.
double gaussian_certainty_threshold();

// Checks the admissibility conditions at `boundary_points` (points where some
// a_i + b_i.x = 0). When none are given, boundary points are sampled
// automatically: the projection of Theta onto each face plus offsets along the
// face, kept only if they lie in the domain.
AdmissibilityReport check_admissibility(const AffineModel& model,
                                        const std::vector<Eigen::VectorXd>& boundary_points = {});

}  // namespace coxaff
