#pragma once

// Monte Carlo study of the QML estimator on simulated state-space data.

#include <cstddef>
#include <string>
#include <vector>

#include "coxaff/fit.hpp"
#include "coxaff/kalman.hpp"
#include "coxaff/model.hpp"
#include "coxaff/rng.hpp"

namespace coxaff {

struct SimulatedSeries {
  std::vector<double> lambda;
  std::vector<double> y;
};

// lambda_1 from the stationary Gamma law, then exact transitions over
// spec.delta; y_t = map(lambda_t) + N(0, R^2).
SimulatedSeries simulate_state_space(const FellerModel& truth, double R, const StateSpaceSpec& spec,
                                     std::size_t length, RngStream& rng);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
};
Histogram histogram(const std::vector<double>& values, int bins);

struct ParameterSummary {
  std::string name;
  double true_value = 0.0;
  double mean = 0.0;
  double mqe = 0.0;      // mean (estimate - truth)^2
  double std_dev = 0.0;  // population standard deviation, so mqe = bias^2 + std_dev^2
  std::vector<double> estimates;
};

struct ReplicationOptions {
  StateSpaceSpec spec;
  double R = 0.001;
  FitOptions fit;  // fit.jobs is ignored; replications run in parallel instead
  bool init_from_moments = true;  // false: start every fit at the truth
  unsigned jobs = 1;
};

struct ReplicationSummary {
  std::vector<ParameterSummary> params;  // theta, kappa, sigma, R
  std::size_t n_reps = 0;
  std::size_t n_failed = 0;
  std::vector<std::string> failures;
  std::vector<int> ljung_box_lags;
  std::vector<double> ljung_box_pass_rate;  // share of fits with p > 0.05, per lag
  std::size_t n_converged = 0;
};

// Replication i draws its series from rng.split(i) and its restarts from
// seed rng.split(i).seed().
ReplicationSummary replication_study(const FellerModel& truth, std::size_t n_reps,
                                     std::size_t series_len, const RngStream& rng,
                                     const ReplicationOptions& opt = {});

// Columns: parameter, true_value, mean_estimate, mqe, std_error.
void write_replication_csv(const std::string& file, const ReplicationSummary& s,
                           const std::vector<std::string>& header = {});
void write_histogram_csv(const std::string& file, const Histogram& h,
                         const std::vector<std::string>& header = {});

}  // namespace coxaff
