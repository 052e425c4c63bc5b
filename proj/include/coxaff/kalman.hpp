#pragma once

// Approximate linear Gaussian filter for a latent Feller intensity observed
// through its no-arrival probability.
//
//   state:   lambda_s = theta (1 - e^{-kappa delta}) + e^{-kappa delta} lambda_{s-1} + eta_s
//            Var(eta_s) = sigma^2 (1 - e^{-kappa delta}) / kappa
//                         * (theta / 2 (1 - e^{-kappa delta}) + e^{-kappa delta} lambda_{s-1})
//   measure: y_s = scale * (alpha(D) - beta(D) lambda_s) + chi_s,  chi_s ~ N(0, R^2)
//
// with (alpha, beta) the transform coefficients of the window D at mu = 1.

#include <cstddef>
#include <span>
#include <vector>

#include "coxaff/model.hpp"

namespace coxaff {

enum class Mapping {
  log_prob_no_arrival,  // y = scale * log P0 (linear in lambda)
  prob_no_arrival,      // y = scale * P0, linearised at the prediction
  direct,               // y = scale * lambda
};

struct StateSpaceSpec {
  double delta = 1.0;   // observation spacing
  double window = 1.0;  // horizon of the no-arrival probability
  Mapping mapping = Mapping::log_prob_no_arrival;
  double scale = 1.0;
  int burn_in = 1;  // leading innovations left out of the likelihood

  void validate() const;
};

struct FilterOutput {
  std::vector<double> predicted_mean, predicted_var;
  std::vector<double> filtered_mean, filtered_var;
  std::vector<double> innovations, innovation_var;
  std::vector<double> standardized_residuals;
  std::vector<double> fitted;  // one-step prediction of each observation
  double loglik = 0.0;
};

// Intercept and slope of the log-probability map for the given parameters.
struct MeasurementLoading {
  double alpha = 0.0;
  double beta = 0.0;
};
MeasurementLoading measurement_loading(const FellerModel& params, const StateSpaceSpec& spec);

// Starts from the stationary law (mean theta, variance theta sigma^2 / (2 kappa)).
// The log-likelihood sums the innovations after the burn-in:
//   -1/2 log(2 pi) (T - K) - 1/2 sum log S_t - 1/2 sum v_t^2 / S_t.
FilterOutput kalman_filter(const FellerModel& params, double R, std::span<const double> y,
                           const StateSpaceSpec& spec);

double qml_loglik(const FellerModel& params, double R, std::span<const double> y,
                  const StateSpaceSpec& spec);

}  // namespace coxaff
