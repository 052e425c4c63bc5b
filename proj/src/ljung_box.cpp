#include "coxaff/ljung_box.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_cdf.h>

#include "coxaff/error.hpp"

namespace coxaff {

double ljung_box_p_value(double q, int lags) {
  if (lags < 1) throw DomainError("ljung_box: lags must be >= 1");
  if (!(q >= 0.0)) throw DomainError("ljung_box: statistic must be >= 0");
  return std::clamp(gsl_cdf_chisq_Q(q, double(lags)), 0.0, 1.0);
}

LjungBoxReport ljung_box(std::span<const double> r, const std::vector<int>& lags) {
  const std::size_t T = r.size();
  int max_lag = 0;
  for (int L : lags) {
    if (L < 1) throw DomainError("ljung_box: lags must be >= 1");
    max_lag = std::max(max_lag, L);
  }
  if (T <= std::size_t(max_lag)) throw DomainError("ljung_box: need more residuals than the largest lag");

  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= double(T);
  double c0 = 0.0;
  for (double v : r) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw NumericalError("ljung_box: constant residual series, autocorrelation undefined");

  std::vector<double> acc(std::size_t(max_lag) + 1, 0.0);
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = std::size_t(k); t < T; ++t) ck += (r[t] - mean) * (r[t - std::size_t(k)] - mean);
    const double rho = ck / c0;
    acc[std::size_t(k)] = acc[std::size_t(k) - 1] + rho * rho / double(T - std::size_t(k));
  }

  LjungBoxReport rep;
  const double n = double(T);
  for (int L : lags) {
    const double q = n * (n + 2.0) * acc[std::size_t(L)];
    rep.lags.push_back(L);
    rep.statistics.push_back(q);
    rep.p_values.push_back(ljung_box_p_value(q, L));
  }
  return rep;
}

}  // namespace coxaff
