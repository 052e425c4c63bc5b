#pragma once

// Exponential-affine transforms of the hazard process
//   L(mu) = E[exp(-mu Lambda_{0,D})] = exp(alpha(D) - beta(D) . x0).
// Every function is templated on the scalar of mu: double for plain values,
// Jet to carry the Taylor expansion in mu (count probabilities, moments).

#include <cmath>

#include <Eigen/Core>

#include "coxaff/error.hpp"
#include "coxaff/jet.hpp"
#include "coxaff/model.hpp"
#include "coxaff/ode.hpp"

namespace coxaff {

template <typename T>
struct TransformCoeffs {
  T alpha;
  Vec<T> beta;
  T mu;
  double horizon = 0.0;

  // alpha - beta . x, the log of the transform at state x.
  T log_transform(const Eigen::VectorXd& x) const {
    T r = alpha;
    for (Eigen::Index i = 0; i < beta.size(); ++i) r -= beta[i] * x[i];
    return r;
  }
};

inline constexpr double kDefaultOdeTolerance = 1e-10;

// Closed form for the square-root intensity, gamma = sqrt(kappa^2 + 2 sigma^2 mu):
//   beta  = 2 mu (1 - e^{-gamma D}) / ((gamma + kappa) + (gamma - kappa) e^{-gamma D})
//   alpha = (2 kappa theta / sigma^2) log(2 gamma e^{(kappa - gamma) D / 2} / (...same denominator))
// alpha is evaluated as
//   (2 kappa theta / sigma^2) log1p(sigma^2 beta / (gamma + kappa)) - 2 kappa theta mu D / (gamma + kappa)
// which is the same quantity without cancellation as sigma -> 0.
template <typename T>
TransformCoeffs<T> cir_transform_closed_form(const FellerModel& m, const T& mu, double horizon) {
  m.validate();
  if (!(horizon >= 0.0)) throw DomainError("cir_transform_closed_form: horizon must be >= 0");
  if (!(value_of(mu) >= 0.0)) throw DomainError("cir_transform_closed_form: mu must be >= 0");
  const double k = m.kappa;
  const double s2 = m.sigma * m.sigma;
  const double c = 2.0 * k * m.theta;

  const T gamma = sqrt(k * k + (2.0 * s2) * mu);
  const T gpk = gamma + k;
  const T gmk = (2.0 * s2) * mu / gpk;
  const T decay = exp(-gamma * horizon);
  const T beta = (2.0 * mu) * (1.0 - decay) / (gpk + gmk * decay);
  const T alpha = (c / s2) * log1p(s2 * beta / gpk) - (c * horizon) * mu / gpk;

  TransformCoeffs<T> r;
  r.alpha = alpha;
  r.beta = Vec<T>(1);
  r.beta[0] = beta;
  r.mu = mu;
  r.horizon = horizon;
  return r;
}

// Integrates the Riccati system (time to maturity D, alpha(0) = beta(0) = 0)
//   beta'  = mu rho1 - K' beta - 1/2 sum_i (Sigma' beta)_i^2 b_i
//   alpha' = -mu rho0 - (K Theta) . beta + 1/2 sum_i a_i (Sigma' beta)_i^2
// with adaptive Dormand-Prince steps to the given local tolerance.
template <typename T>
TransformCoeffs<T> solve_transform_ode(const AffineModel& m, const T& mu, double horizon,
                                       double tol = kDefaultOdeTolerance, OdeStats* stats = nullptr) {
  m.validate();
  if (!(horizon >= 0.0)) throw DomainError("solve_transform_ode: horizon must be >= 0");
  if (!(tol > 0.0)) throw DomainError("solve_transform_ode: tol must be > 0");
  const Eigen::Index d = m.dim();
  const Eigen::VectorXd ktheta = m.kappa * m.theta;

  auto rhs = [&](const Vec<T>& y) {
    Vec<T> dy(d + 1);
    Vec<T> sq(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      T w(0.0);
      for (Eigen::Index j = 0; j < d; ++j)
        if (m.sigma(j, k) != 0.0) w += m.sigma(j, k) * y[1 + j];
      sq[k] = w * w;
    }
    T da = -(mu * m.rho0);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (ktheta[j] != 0.0) da -= ktheta[j] * y[1 + j];
      if (m.a[j] != 0.0) da += (0.5 * m.a[j]) * sq[j];
    }
    dy[0] = da;
    for (Eigen::Index i = 0; i < d; ++i) {
      T db = mu * m.rho1[i];
      for (Eigen::Index j = 0; j < d; ++j) {
        if (m.kappa(j, i) != 0.0) db -= m.kappa(j, i) * y[1 + j];
        if (m.b(j, i) != 0.0) db -= (0.5 * m.b(j, i)) * sq[j];
      }
      dy[1 + i] = db;
    }
    return dy;
  };

  Vec<T> y0(d + 1);
  for (Eigen::Index i = 0; i <= d; ++i) y0[i] = T(0.0);
  const Vec<T> y = integrate_dopri5<T>(rhs, y0, horizon, tol, stats);

  TransformCoeffs<T> r;
  r.alpha = y[0];
  r.beta = y.tail(d);
  r.mu = mu;
  r.horizon = horizon;
  return r;
}

// L(mu) = exp(alpha - beta lambda0) by the closed form.
template <typename T>
T laplace_hazard(const FellerModel& m, const T& mu, double horizon) {
  const auto c = cir_transform_closed_form(m, mu, horizon);
  return exp(c.alpha - c.beta[0] * m.lambda0);
}

// L(mu) = exp(alpha - beta . x0) by the Riccati solver.
template <typename T>
T laplace_hazard(const AffineModel& m, const T& mu, double horizon, double tol = kDefaultOdeTolerance) {
  const auto c = solve_transform_ode(m, mu, horizon, tol);
  return exp(c.log_transform(m.x0));
}

}  // namespace coxaff
