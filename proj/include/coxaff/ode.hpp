#pragma once

// Adaptive Dormand-Prince 5(4) integrator for autonomous systems y' = f(y).
// The state scalar may be double or Jet; for jets every Taylor coefficient
// enters the error norm, so derivatives are controlled as well as values.

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Core>

#include "coxaff/error.hpp"
#include "coxaff/jet.hpp"

namespace coxaff {

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct OdeStats {
  int accepted = 0;
  int rejected = 0;
};

namespace detail {

// out = y + h * sum_k c_k k_k over the stages actually used.
template <typename T, std::size_t N>
Vec<T> combine(const Vec<T>& y, double h, const double (&c)[N], const Vec<T>* const (&k)[N]) {
  Vec<T> out = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    for (std::size_t s = 0; s < N; ++s)
      if (c[s] != 0.0) out[i] += (h * c[s]) * (*k[s])[i];
  }
  return out;
}

}  // namespace detail

// Integrates from 0 to t_end. Throws ExplosionError if |y| exceeds `blowup`
// or the step size collapses.
template <typename T, typename Rhs>
Vec<T> integrate_dopri5(Rhs&& f, Vec<T> y, double t_end, double tol, OdeStats* stats = nullptr,
                        double blowup = 1e12) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  if (t_end <= 0.0) return y;
  double t = 0.0;
  double h = std::min(t_end, 1e-2 * std::max(t_end, 1e-3));
  Vec<T> k1 = f(y);
  int guard = 0;
  while (t < t_end) {
    if (++guard > 10000000) throw NumericalError("integrate_dopri5: step budget exhausted");
    if (t + h > t_end) h = t_end - t;
    const Vec<T> y2 = detail::combine<T, 1>(y, h, {a21}, {&k1});
    const Vec<T> k2 = f(y2);
    const Vec<T> y3 = detail::combine<T, 2>(y, h, {a31, a32}, {&k1, &k2});
    const Vec<T> k3 = f(y3);
    const Vec<T> y4 = detail::combine<T, 3>(y, h, {a41, a42, a43}, {&k1, &k2, &k3});
    const Vec<T> k4 = f(y4);
    const Vec<T> y5 = detail::combine<T, 4>(y, h, {a51, a52, a53, a54}, {&k1, &k2, &k3, &k4});
    const Vec<T> k5 = f(y5);
    const Vec<T> y6 =
        detail::combine<T, 5>(y, h, {a61, a62, a63, a64, a65}, {&k1, &k2, &k3, &k4, &k5});
    const Vec<T> k6 = f(y6);
    const Vec<T> yn =
        detail::combine<T, 6>(y, h, {b1, 0.0, b3, b4, b5, b6}, {&k1, &k2, &k3, &k4, &k5, &k6});
    const Vec<T> k7 = f(yn);

    double err = 0.0;
    bool finite = true;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const std::size_t nc = coeff_count(yn[i]);
      for (std::size_t c = 0; c < nc; ++c) {
        const double e =
            h * (e1 * coeff_at(k1[i], c) + e3 * coeff_at(k3[i], c) + e4 * coeff_at(k4[i], c) +
                 e5 * coeff_at(k5[i], c) + e6 * coeff_at(k6[i], c) + e7 * coeff_at(k7[i], c));
        const double sc =
            tol + tol * std::max(std::abs(coeff_at(y[i], c)), std::abs(coeff_at(yn[i], c)));
        err = std::max(err, std::abs(e) / sc);
        if (!std::isfinite(coeff_at(yn[i], c))) finite = false;
      }
    }
    if (!finite) err = 1e10;

    if (err <= 1.0) {
      t = (h >= t_end - t) ? t_end : t + h;
      y = yn;
      k1 = k7;
      if (stats) ++stats->accepted;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::abs(value_of(y[i])) > blowup) {
          std::ostringstream os;
          os << "Riccati solution exploded near t = " << t;
          throw ExplosionError(t, os.str());
        }
      }
    } else if (stats) {
      ++stats->rejected;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
    if (t < t_end && h < 1e-14 * std::max(1.0, t)) {
      std::ostringstream os;
      os << "Riccati solution exploded near t = " << t << " (step size collapsed)";
      throw ExplosionError(t, os.str());
    }
  }
  return y;
}

}  // namespace coxaff
