#pragma once

// Count distributions and moments of the Cox process N with hazard Lambda.

#include <cstddef>
#include <vector>

#include "coxaff/model.hpp"
#include "coxaff/transform.hpp"

namespace coxaff {

inline constexpr int kDefaultKMax = 50;
inline constexpr double kNegativeProbabilityLimit = -1e-10;

struct CountPmf {
  std::vector<double> probs;  // p_0 .. p_kmax
  double horizon = 0.0;
  double tail_bound = 0.0;  // max(0, 1 - sum p_k)

  double sum() const;
  double mean() const;  // sum k p_k over the stored range
};

// P(N_{t+D} - N_t = 0) = L(1).
double prob_no_arrival(const FellerModel& m, double horizon);
double prob_no_arrival(const AffineModel& m, double horizon, double tol = kDefaultOdeTolerance);

// p_k = (-1)^k / k! L^{(k)}(1), all k from one jet evaluation at mu = 1.
// Throws PrecisionError if some p_k < -1e-10; small negative values are
// clamped to 0.
CountPmf pmf(const FellerModel& m, double horizon, int k_max = kDefaultKMax);
CountPmf pmf(const AffineModel& m, double horizon, int k_max = kDefaultKMax,
             double tol = kDefaultOdeTolerance);

// Turns the jet coefficients of L(1 + e) into a CountPmf.
CountPmf pmf_from_jet(const Jet& transform_at_one, double horizon);

// Cumulants kappa_1 .. kappa_order of Lambda_{0,t}, read from the jet of
// log L(mu) at mu = 0.
std::vector<double> hazard_cumulants(const FellerModel& m, double t, int order);
std::vector<double> hazard_cumulants(const AffineModel& m, double t, int order,
                                     double tol = kDefaultOdeTolerance);

// E[N_t] = theta t + (1 - e^{-kappa t}) / kappa (lambda0 - theta).
double mean_count(const FellerModel& m, double t);

// Var(N_t) = E[Lambda_t] + Var(Lambda_t), Var(Lambda_t) from the transform.
double var_count(const FellerModel& m, double t);

// The closed-form variance display as printed, kept for comparison with
// var_count. Not used by the library.
double var_count_printed(const FellerModel& m, double t);

struct GammaLaw {
  double shape = 1.0;
  double rate = 1.0;

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
};

// Negative binomial on k = 0, 1, ...:
//   P(k) = Gamma(size + k) / (Gamma(size) k!) p^size (1 - p)^k.
struct NegBinLaw {
  double size = 1.0;
  double p = 0.5;

  double pmf(long long k) const;
  std::vector<double> pmf_range(int k_max) const;
  double mean() const { return size * (1.0 - p) / p; }
  double variance() const { return size * (1.0 - p) / (p * p); }
};

// Stationary law of the intensity: Gamma(2 kappa theta / sigma^2, 2 kappa / sigma^2).
GammaLaw stationary_intensity(const FellerModel& m);

// Count over a window of length t with the intensity frozen at a stationary
// draw: NegBin(shape, rate / (rate + t)).
NegBinLaw stationary_count(const FellerModel& m, double window);

// Exact window-count law under a stationary start,
//   E[L(mu | lambda0)] = e^{alpha} (1 + beta / rate)^{-shape},
// differentiated at mu = 1 like pmf().
CountPmf stationary_window_pmf(const FellerModel& m, double window, int k_max = kDefaultKMax);

// Rate at which the law of lambda_t approaches the Gamma law from a
// deterministic start.
double convergence_rate(const FellerModel& m);

}  // namespace coxaff
