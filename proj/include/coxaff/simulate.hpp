#pragma once

// Path simulation for the intensity and the Cox process it drives.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coxaff/cox_dist.hpp"
#include "coxaff/model.hpp"
#include "coxaff/rng.hpp"

namespace coxaff {

struct PathSample {
  std::vector<double> grid;
  std::vector<double> lambda;
  std::vector<double> cum_hazard;  // trapezoid rule, cum_hazard[0] = 0
  std::vector<double> arrivals;
};

// Above this d + l the Poisson-mixed chi-square draw is replaced by its
// moment-matched normal (the law is then normal to double precision).
inline constexpr double kGaussianTransitionThreshold = 1e10;

// lambda_{s+dt} | lambda_s = c X, X ~ noncentral chi-square(d, l) with
// c = sigma^2 (1 - e^{-kappa dt}) / (4 kappa), d = 4 kappa theta / sigma^2,
// l = lambda_s e^{-kappa dt} / c; X = 2 Gamma(d/2 + J), J ~ Poisson(l/2).
double sample_cir_transition(const FellerModel& m, double lambda_s, double dt, RngStream& rng);

// Draw from the stationary Gamma law of the intensity.
double sample_stationary_intensity(const FellerModel& m, RngStream& rng);

// Step count with dt <= min(0.01, 1 / (10 kappa)).
std::size_t default_steps(const FellerModel& m, double horizon);

// Exact transitions on a uniform grid; arrivals are left empty. The
// trapezoid hazard carries an O((horizon / n_steps)^2) bias.
PathSample simulate_path(const FellerModel& m, double horizon, std::size_t n_steps, RngStream& rng);

// Euler-Maruyama with full truncation of the variance levels. Biased; the
// intensity is floored at 0 before the hazard is accumulated.
PathSample simulate_path_euler(const AffineModel& m, double horizon, std::size_t n_steps,
                               RngStream& rng);

// Arrival times in [grid.front(), grid.back()]: inverts the piecewise-linear
// hazard at cumulative sums of unit exponentials.
std::vector<double> simulate_arrivals(const PathSample& path, RngStream& rng);

// Hazard Lambda_{0,horizon} of n_paths independent paths; path i uses
// rng.split(i). n_steps = 0 picks default_steps.
std::vector<double> simulate_hazards(const FellerModel& m, double horizon, std::size_t n_paths,
                                     const RngStream& rng, std::size_t n_steps = 0,
                                     unsigned jobs = 1);

// Counts N_horizon ~ Poisson(Lambda) per path, same streams as simulate_hazards.
std::vector<std::uint64_t> simulate_counts(const FellerModel& m, double horizon,
                                           std::size_t n_paths, const RngStream& rng,
                                           std::size_t n_steps = 0, unsigned jobs = 1);

struct MonteCarloPmf {
  CountPmf pmf;
  std::vector<double> std_errors;
  std::size_t n_paths = 0;
};

// p_k estimated as the path average of Poisson(k; Lambda).
MonteCarloPmf monte_carlo_pmf(const FellerModel& m, double horizon, std::size_t n_paths, int k_max,
                              const RngStream& rng, std::size_t n_steps = 0, unsigned jobs = 1);

// Columns t, lambda, cum_hazard; `header` lines are written first, each
// prefixed with "# ".
void write_path_csv(const std::string& file, const PathSample& path,
                    const std::vector<std::string>& header = {});
void write_arrivals_csv(const std::string& file, const std::vector<double>& arrivals,
                        const std::vector<std::string>& header = {});

}  // namespace coxaff
