#pragma once

// Quasi-maximum-likelihood estimation of (kappa, theta, sigma, R).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coxaff/kalman.hpp"
#include "coxaff/ljung_box.hpp"
#include "coxaff/model.hpp"

namespace coxaff {

// Parameter order used by every array below.
enum ParamIndex { kKappa = 0, kTheta = 1, kSigma = 2, kNoise = 3 };
inline constexpr std::array<const char*, 4> kParamNames{"kappa", "theta", "sigma", "R"};

struct FitOptions {
  int restarts = 5;              // random starts besides the initial point
  double restart_scale = 0.5;    // std dev of log-space perturbations
  double initial_step = 0.3;     // simplex edge in log space
  int max_iter = 5000;           // per start
  double simplex_tol = 1e-8;     // convergence: simplex size in log space
  std::size_t min_length = 20;
  std::array<bool, 4> fixed{false, false, false, false};
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::vector<int> ljung_box_lags{5, 10, 15};
};

struct StdErrorResult {
  std::array<double, 4> se{};   // delta-method, natural scale
  Eigen::Matrix4d cov_log;      // covariance of the log parameters
  bool positive_definite = true;
  std::string warning;
};

struct EstimationResult {
  FellerModel params;  // lambda0 set to theta
  double R = 0.0;
  std::array<double, 4> std_errors{};
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  int finite_starts = 0;
  LjungBoxReport diagnostics;
  std::vector<std::string> warnings;
};

// Crude starting values read off the data by inverting the measurement map
// with beta ~ window, alpha ~ 0.
struct InitialGuess {
  FellerModel params;
  double R = 0.0;
};
InitialGuess moment_initial_guess(std::span<const double> y, const StateSpaceSpec& spec);

// Nelder-Mead over the log parameters from `init` and `restarts` perturbed
// starts; the best finite optimum wins (ties to the lowest start index).
EstimationResult fit(std::span<const double> y, const StateSpaceSpec& spec, const FellerModel& init,
                     double init_R, const FitOptions& opt = {});

// Central-difference Hessian of the log-likelihood in log space (relative
// step 1e-4); fixed parameters get standard error 0.
StdErrorResult std_errors(const FellerModel& params, double R, std::span<const double> y,
                          const StateSpaceSpec& spec, const std::array<bool, 4>& fixed = {});

}  // namespace coxaff
