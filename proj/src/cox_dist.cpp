#include "coxaff/cox_dist.hpp"

#include <cmath>
#include <sstream>

#include "coxaff/error.hpp"

namespace coxaff {

namespace {

void check_k_max(int k_max) {
  if (k_max < 0) throw DomainError("pmf: k_max must be >= 0");
}

std::vector<double> cumulants_from_log_jet(const Jet& log_l, int order) {
  std::vector<double> out(static_cast<std::size_t>(order));
  double fact = 1.0;
  for (int n = 1; n <= order; ++n) {
    fact *= double(n);
    // log L(mu) = sum_n kappa_n (-mu)^n / n!
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    out[std::size_t(n - 1)] = sign * fact * log_l[std::size_t(n)];
  }
  return out;
}

}  // namespace

double CountPmf::sum() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

double CountPmf::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) s += double(k) * probs[k];
  return s;
}

double prob_no_arrival(const FellerModel& m, double horizon) { return laplace_hazard(m, 1.0, horizon); }

double prob_no_arrival(const AffineModel& m, double horizon, double tol) {
  return laplace_hazard(m, 1.0, horizon, tol);
}

CountPmf pmf_from_jet(const Jet& l, double horizon) {
  CountPmf out;
  out.horizon = horizon;
  out.probs.resize(l.size());
  for (std::size_t k = 0; k < l.size(); ++k) {
    double p = (k % 2 == 0) ? l[k] : -l[k];
    if (p < kNegativeProbabilityLimit) {
      std::ostringstream os;
      os << "pmf: p_" << k << " = " << p
         << " is negative beyond rounding; reduce k_max or use a higher-precision evaluation";
      throw PrecisionError(os.str());
    }
    out.probs[k] = std::max(p, 0.0);
  }
  out.tail_bound = std::max(0.0, 1.0 - out.sum());
  return out;
}

CountPmf pmf(const FellerModel& m, double horizon, int k_max) {
  check_k_max(k_max);
  return pmf_from_jet(laplace_hazard(m, Jet::variable(1.0, std::size_t(k_max)), horizon), horizon);
}

CountPmf pmf(const AffineModel& m, double horizon, int k_max, double tol) {
  check_k_max(k_max);
  return pmf_from_jet(laplace_hazard(m, Jet::variable(1.0, std::size_t(k_max)), horizon, tol),
                      horizon);
}

std::vector<double> hazard_cumulants(const FellerModel& m, double t, int order) {
  if (order < 1) throw DomainError("hazard_cumulants: order must be >= 1");
  const auto c = cir_transform_closed_form(m, Jet::variable(0.0, std::size_t(order)), t);
  return cumulants_from_log_jet(c.alpha - c.beta[0] * m.lambda0, order);
}

std::vector<double> hazard_cumulants(const AffineModel& m, double t, int order, double tol) {
  if (order < 1) throw DomainError("hazard_cumulants: order must be >= 1");
  const auto c = solve_transform_ode(m, Jet::variable(0.0, std::size_t(order)), t, tol);
  return cumulants_from_log_jet(c.log_transform(m.x0), order);
}

double mean_count(const FellerModel& m, double t) {
  m.validate();
  if (!(t >= 0.0)) throw DomainError("mean_count: t must be >= 0");
  return m.theta * t - std::expm1(-m.kappa * t) / m.kappa * (m.lambda0 - m.theta);
}

double var_count(const FellerModel& m, double t) {
  if (!(t >= 0.0)) throw DomainError("var_count: t must be >= 0");
  const auto k = hazard_cumulants(m, t, 2);
  return mean_count(m, t) + k[1];
}

double var_count_printed(const FellerModel& m, double t) {
  const double k = m.kappa, th = m.theta, s2 = m.sigma * m.sigma, l0 = m.lambda0;
  const double e1 = std::exp(-k * t), e2 = std::exp(-2.0 * k * t);
  return 2.0 * th * t / k * ((e1 + 1.0) * (l0 - th) - 2.0 * (th + l0)) +
         s2 / (k * k * k) * (th * e1 / 2.0 + (4.0 * std::exp(-k) - 5.0) / 2.0 - l0 * e2) +
         s2 * t / k * ((3.0 * th - 2.0 * l0) / k);
}

double NegBinLaw::pmf(long long k) const {
  if (k < 0) return 0.0;
  const double kk = double(k);
  return std::exp(std::lgamma(size + kk) - std::lgamma(size) - std::lgamma(kk + 1.0) +
                  size * std::log(p) + kk * std::log1p(-p));
}

std::vector<double> NegBinLaw::pmf_range(int k_max) const {
  std::vector<double> out(std::size_t(std::max(k_max, -1) + 1));
  for (int k = 0; k <= k_max; ++k) out[std::size_t(k)] = pmf(k);
  return out;
}

GammaLaw stationary_intensity(const FellerModel& m) {
  m.validate();
  const double s2 = m.sigma * m.sigma;
  return {2.0 * m.kappa * m.theta / s2, 2.0 * m.kappa / s2};
}

NegBinLaw stationary_count(const FellerModel& m, double window) {
  if (!(window > 0.0)) throw DomainError("stationary_count: window must be > 0");
  const GammaLaw g = stationary_intensity(m);
  return {g.shape, g.rate / (g.rate + window)};
}

CountPmf stationary_window_pmf(const FellerModel& m, double window, int k_max) {
  check_k_max(k_max);
  const GammaLaw g = stationary_intensity(m);
  const auto c = cir_transform_closed_form(m, Jet::variable(1.0, std::size_t(k_max)), window);
  const Jet l = exp(c.alpha - g.shape * log1p(c.beta[0] / g.rate));
  return pmf_from_jet(l, window);
}

double convergence_rate(const FellerModel& m) { return 2.0 * m.kappa; }

}  // namespace coxaff
