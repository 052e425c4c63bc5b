#pragma once

#include <Eigen/Dense>

namespace coxaff {

// One-dimensional square-root (Feller / CIR) intensity
//   d lambda = kappa (theta - lambda) dt + sigma sqrt(lambda) dW.
// Rates are per unit of model time.
struct FellerModel {
  double kappa = 1.0;    // mean-reversion rate
  double theta = 1.0;    // long-run intensity
  double sigma = 1.0;    // volatility
  double lambda0 = 1.0;  // initial intensity

  // 2 kappa theta >= sigma^2: the origin is unattainable. Reported, never
  // enforced.
  bool feller_condition() const { return 2.0 * kappa * theta >= sigma * sigma; }

  // Throws DomainError unless kappa, theta, sigma > 0 and lambda0 >= 0.
  void validate() const;
};

// d-dimensional affine diffusion
//   dX = K (Theta - X) dt + Sigma sqrt(diag(a_i + b_i . X)) dW,
// with intensity lambda = rho0 + rho1 . X. Row i of `b` is b_i.
struct AffineModel {
  Eigen::MatrixXd kappa;
  Eigen::VectorXd theta;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd a;
  Eigen::MatrixXd b;
  double rho0 = 0.0;
  Eigen::VectorXd rho1;
  Eigen::VectorXd x0;  // state at which transforms are evaluated

  Eigen::Index dim() const { return theta.size(); }

  // Throws StructuralError on any dimension mismatch.
  void validate() const;

  double intensity(const Eigen::VectorXd& x) const { return rho0 + rho1.dot(x); }

  // a_i + b_i . x for every factor.
  Eigen::VectorXd variance_levels(const Eigen::VectorXd& x) const { return a + b * x; }

  bool in_domain(const Eigen::VectorXd& x, double tol = 0.0) const {
    return (variance_levels(x).array() >= -tol).all();
  }
};

// Exact conditional mean and variance of lambda_{s+dt} given lambda_s.
struct TransitionMoments {
  double mean = 0.0;
  double variance = 0.0;
};
TransitionMoments cir_transition_moments(const FellerModel& m, double lambda_s, double dt);

AffineModel as_affine(const FellerModel& m);

// Gaussian (Ornstein-Uhlenbeck) intensity: a = 1, b = 0.
AffineModel vasicek(double kappa, double theta, double sigma, double x0);

// Independent square-root factors with lambda = sum of the factors.
AffineModel multivariate_cir(const Eigen::VectorXd& kappa, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& sigma, const Eigen::VectorXd& x0);

}  // namespace coxaff
