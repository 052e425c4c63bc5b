#include "coxaff/kalman.hpp"

#include <cmath>
#include <sstream>

#include "coxaff/error.hpp"
#include "coxaff/transform.hpp"

namespace coxaff {

void StateSpaceSpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("StateSpaceSpec: delta must be > 0");
  if (!(window > 0.0) || !std::isfinite(window)) throw DomainError("StateSpaceSpec: window must be > 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("StateSpaceSpec: scale must be > 0");
  if (burn_in < 0) throw DomainError("StateSpaceSpec: burn_in must be >= 0");
}

MeasurementLoading measurement_loading(const FellerModel& params, const StateSpaceSpec& spec) {
  if (spec.mapping == Mapping::direct) return {0.0, -1.0};
  const auto c = cir_transform_closed_form(params, 1.0, spec.window);
  return {c.alpha, c.beta[0]};
}

FilterOutput kalman_filter(const FellerModel& params, double R, std::span<const double> y,
                           const StateSpaceSpec& spec) {
  params.validate();
  spec.validate();
  if (y.empty()) throw DataError("kalman_filter: empty observation series");
  if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("kalman_filter: R must be >= 0");
  for (std::size_t t = 0; t < y.size(); ++t)
    if (!std::isfinite(y[t])) {
      std::ostringstream os;
      os << "kalman_filter: observation " << t << " is not finite";
      throw DataError(t, os.str());
    }

  const MeasurementLoading ld = measurement_loading(params, spec);
  const double k = params.kappa, th = params.theta, s2 = params.sigma * params.sigma;
  const double e = std::exp(-k * spec.delta);
  const double one_m_e = -std::expm1(-k * spec.delta);
  const double R2 = R * R;
  const std::size_t T = y.size();

  FilterOutput out;
  out.predicted_mean.resize(T);
  out.predicted_var.resize(T);
  out.filtered_mean.resize(T);
  out.filtered_var.resize(T);
  out.innovations.resize(T);
  out.innovation_var.resize(T);
  out.standardized_residuals.resize(T);
  out.fitted.resize(T);

  const double log2pi = std::log(2.0 * M_PI);
  double m = th, P = th * s2 / (2.0 * k);
  double ll = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) {
      const double f = out.filtered_mean[t - 1];
      m = th * one_m_e + e * f;
      P = e * e * out.filtered_var[t - 1] + s2 / k * one_m_e * (0.5 * th * one_m_e + e * f);
    }
    double pred, H;
    switch (spec.mapping) {
      case Mapping::log_prob_no_arrival:
      case Mapping::direct:
        pred = spec.scale * (ld.alpha - ld.beta * m);
        H = -spec.scale * ld.beta;
        break;
      case Mapping::prob_no_arrival:
      default: {
        const double p0 = std::exp(ld.alpha - ld.beta * m);
        pred = spec.scale * p0;
        H = -spec.scale * ld.beta * p0;
        break;
      }
    }
    const double v = y[t] - pred;
    const double S = H * H * P + R2;
    if (!(S > 0.0) || !std::isfinite(S)) {
      std::ostringstream os;
      os << "kalman_filter: innovation variance " << S << " at step " << t;
      throw NumericalError(os.str());
    }
    const double gain = P * H / S;
    const double fm = m + gain * v;
    const double fv = R2 > 0.0 ? P * R2 / S : std::max(0.0, (1.0 - gain * H) * P);

    out.predicted_mean[t] = m;
    out.predicted_var[t] = P;
    out.filtered_mean[t] = std::max(fm, 0.0);
    out.filtered_var[t] = fv;
    out.innovations[t] = v;
    out.innovation_var[t] = S;
    out.standardized_residuals[t] = v / std::sqrt(S);
    out.fitted[t] = pred;
    if (int(t) >= spec.burn_in) ll += -0.5 * (log2pi + std::log(S) + v * v / S);
  }
  out.loglik = ll;
  if (!std::isfinite(ll)) throw NumericalError("kalman_filter: log-likelihood is not finite");
  return out;
}

double qml_loglik(const FellerModel& params, double R, std::span<const double> y,
                  const StateSpaceSpec& spec) {
  return kalman_filter(params, R, y, spec).loglik;
}

}  // namespace coxaff
