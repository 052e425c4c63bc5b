#pragma once

#include <span>
#include <vector>

namespace coxaff {

struct LjungBoxReport {
  std::vector<int> lags;
  std::vector<double> statistics;  // Q(L)
  std::vector<double> p_values;    // chi-square(L) survival at Q(L)
};

// Q(L) = T (T + 2) sum_{k <= L} rho_k^2 / (T - k).
LjungBoxReport ljung_box(std::span<const double> residuals, const std::vector<int>& lags);

double ljung_box_p_value(double q, int lags);

}  // namespace coxaff
