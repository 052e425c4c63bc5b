#pragma once

// Simulation diagnostic for the approach of window counts to stationarity.

#include <cstddef>
#include <vector>

#include "coxaff/model.hpp"
#include "coxaff/rng.hpp"

namespace coxaff {

enum class StartLaw { fixed, stationary };

struct DistanceOptions {
  double window = 1.0;  // counts over [t, t + window]
  int k_max = 40;
  StartLaw start = StartLaw::fixed;  // fixed: lambda_0 = model.lambda0
  double noise_multiple = 10.0;      // slope uses points with distance > multiple * floor
  unsigned jobs = 1;
};

struct DistanceResult {
  std::vector<double> t_grid;
  std::vector<double> distance;     // total variation to the stationary window law
  std::vector<double> noise_floor;  // expected distance from Monte Carlo noise alone
  std::vector<bool> used;           // point entered the slope fit
  double slope = 0.0;               // least squares slope of log distance on t
  bool slope_ok = false;            // at least two usable points
};

// For every t in t_grid, draws lambda_t on n_paths paths (exact transition
// from time 0) and averages the Poisson-mixture count law of the next window
// given lambda_t. The result is compared in total variation with the exact
// stationary window law.
DistanceResult distance_to_stationary(const FellerModel& m, const std::vector<double>& t_grid,
                                      std::size_t n_paths, const RngStream& rng,
                                      const DistanceOptions& opt = {});

}  // namespace coxaff
