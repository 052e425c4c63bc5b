#include "coxaff/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "coxaff/error.hpp"
#include "coxaff/parallel.hpp"
#include "coxaff/rng.hpp"

namespace coxaff {

namespace {

constexpr double kPenalty = 1e100;

using Log4 = std::array<double, 4>;

void quiet_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

FellerModel to_model(const Log4& x) {
  FellerModel m;
  m.kappa = std::exp(x[kKappa]);
  m.theta = std::exp(x[kTheta]);
  m.sigma = std::exp(x[kSigma]);
  m.lambda0 = m.theta;
  return m;
}

double loglik_at(const Log4& x, std::span<const double> y, const StateSpaceSpec& spec) {
  try {
    const double ll = qml_loglik(to_model(x), std::exp(x[kNoise]), y, spec);
    return std::isfinite(ll) ? ll : -kPenalty;
  } catch (const Error&) {
    return -kPenalty;
  }
}

struct Objective {
  std::span<const double> y;
  const StateSpaceSpec* spec;
  Log4 base;
  std::vector<int> free;  // indices optimised

  Log4 expand(const gsl_vector* v) const {
    Log4 x = base;
    for (std::size_t i = 0; i < free.size(); ++i) x[std::size_t(free[i])] = gsl_vector_get(v, i);
    return x;
  }
};

double gsl_objective(const gsl_vector* v, void* p) {
  const auto* obj = static_cast<const Objective*>(p);
  const double ll = loglik_at(obj->expand(v), obj->y, *obj->spec);
  return ll > -kPenalty ? -ll : kPenalty;
}

struct StartResult {
  Log4 x{};
  double loglik = -kPenalty;
  bool converged = false;
  int iterations = 0;
};

StartResult run_simplex(const Objective& obj, const Log4& start, const FitOptions& opt) {
  StartResult res;
  res.x = start;
  const std::size_t n = obj.free.size();
  if (n == 0) {
    res.loglik = loglik_at(start, obj.y, *obj.spec);
    res.converged = true;
    return res;
  }
  Objective local = obj;
  local.base = start;
  gsl_multimin_function f{&gsl_objective, n, &local};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, start[std::size_t(obj.free[i])]);
    gsl_vector_set(step, i, opt.initial_step);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &f, x, step);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.simplex_tol) == GSL_SUCCESS) {
      res.converged = true;
      break;
    }
  }
  res.iterations = it;
  res.x = local.expand(gsl_multimin_fminimizer_x(s));
  const double fmin = gsl_multimin_fminimizer_minimum(s);
  res.loglik = fmin < kPenalty ? -fmin : -kPenalty;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return res;
}

}  // namespace

InitialGuess moment_initial_guess(std::span<const double> y, const StateSpaceSpec& spec) {
  spec.validate();
  if (y.size() < 3) throw DataError("moment_initial_guess: need at least 3 observations");
  std::vector<double> lam(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double v = y[t] / spec.scale;
    switch (spec.mapping) {
      case Mapping::direct: lam[t] = v; break;
      case Mapping::prob_no_arrival: lam[t] = -std::log(std::max(v, 1e-300)) / spec.window; break;
      case Mapping::log_prob_no_arrival:
      default: lam[t] = -v / spec.window; break;
    }
  }
  const double n = double(lam.size());
  const double mean = std::accumulate(lam.begin(), lam.end(), 0.0) / n;
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t t = 0; t < lam.size(); ++t) {
    c0 += (lam[t] - mean) * (lam[t] - mean);
    if (t) c1 += (lam[t] - mean) * (lam[t - 1] - mean);
  }
  const double var = c0 / n;
  const double rho = c0 > 0.0 ? std::clamp(c1 / c0, 0.05, 0.995) : 0.5;
  InitialGuess g;
  g.params.theta = std::max(mean, 1e-8);
  g.params.kappa = -std::log(rho) / spec.delta;
  g.params.sigma = std::sqrt(std::max(2.0 * g.params.kappa * var / g.params.theta, 1e-16));
  g.params.lambda0 = g.params.theta;
  const double sd_y = std::sqrt(std::max(var, 1e-300)) * spec.window * spec.scale;
  g.R = std::max(0.1 * sd_y, 1e-12);
  return g;
}

StdErrorResult std_errors(const FellerModel& params, double R, std::span<const double> y,
                          const StateSpaceSpec& spec, const std::array<bool, 4>& fixed) {
  const Log4 x0{std::log(params.kappa), std::log(params.theta), std::log(params.sigma), std::log(R)};
  std::vector<int> free;
  for (int i = 0; i < 4; ++i)
    if (!fixed[std::size_t(i)]) free.push_back(i);
  const std::size_t n = free.size();
  StdErrorResult out;
  out.cov_log.setZero();

  auto f = [&](const Log4& x) { return loglik_at(x, y, spec); };
  const double f0 = f(x0);
  Eigen::MatrixXd H(n, n);
  std::vector<double> h(n);
  for (std::size_t a = 0; a < n; ++a) h[a] = 1e-4 * std::max(1.0, std::abs(x0[std::size_t(free[a])]));
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = std::size_t(free[a]);
    Log4 xp = x0, xm = x0;
    xp[i] += h[a];
    xm[i] -= h[a];
    H(a, a) = (f(xp) - 2.0 * f0 + f(xm)) / (h[a] * h[a]);
    for (std::size_t b = 0; b < a; ++b) {
      const std::size_t j = std::size_t(free[b]);
      Log4 pp = x0, pm = x0, mp = x0, mm = x0;
      pp[i] += h[a]; pp[j] += h[b];
      pm[i] += h[a]; pm[j] -= h[b];
      mp[i] -= h[a]; mp[j] += h[b];
      mm[i] -= h[a]; mm[j] -= h[b];
      H(a, b) = H(b, a) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[a] * h[b]);
    }
  }

  Eigen::MatrixXd cov(n, n);
  cov.setZero();
  if (n > 0) {
    const Eigen::MatrixXd negH = -H;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(negH);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (!(ev.minCoeff() > 0.0) || !negH.allFinite()) {
      out.positive_definite = false;
      out.warning = "negative Hessian is not positive definite; standard errors from its pseudo-inverse";
    }
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (ev[k] > 1e-12 * top && std::isfinite(ev[k]))
        cov += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose() / ev[k];
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out.cov_log(free[a], free[b]) = cov(a, b);

  const Log4 nat{params.kappa, params.theta, params.sigma, R};
  for (std::size_t i = 0; i < 4; ++i)
    out.se[i] = fixed[i] ? 0.0 : nat[i] * std::sqrt(std::max(out.cov_log(Eigen::Index(i), Eigen::Index(i)), 0.0));
  return out;
}

EstimationResult fit(std::span<const double> y, const StateSpaceSpec& spec, const FellerModel& init,
                     double init_R, const FitOptions& opt) {
  quiet_gsl();
  spec.validate();
  init.validate();
  if (y.size() < opt.min_length)
    throw DataError("fit: series has " + std::to_string(y.size()) + " observations, need at least " +
                    std::to_string(opt.min_length));
  if (!(init_R > 0.0)) throw DomainError("fit: initial R must be > 0");
  for (std::size_t t = 0; t < y.size(); ++t)
    if (!std::isfinite(y[t])) throw DataError(t, "fit: observation " + std::to_string(t) + " is not finite");

  Objective obj{y, &spec, {}, {}};
  const Log4 x0{std::log(init.kappa), std::log(init.theta), std::log(init.sigma), std::log(init_R)};
  obj.base = x0;
  for (int i = 0; i < 4; ++i)
    if (!opt.fixed[std::size_t(i)]) obj.free.push_back(i);

  const int n_starts = 1 + std::max(0, opt.restarts);
  std::vector<Log4> starts(std::size_t(n_starts), x0);
  const RngStream base(opt.seed, 0);
  for (int s = 1; s < n_starts; ++s) {
    RngStream r = base.split(std::uint64_t(s));
    for (int i : obj.free) starts[std::size_t(s)][std::size_t(i)] += opt.restart_scale * r.normal();
  }

  std::vector<StartResult> results(starts.size());
  parallel_for(starts.size(), opt.jobs, [&](std::size_t s) { results[s] = run_simplex(obj, starts[s], opt); });

  std::size_t best = 0;
  int finite = 0;
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (results[s].loglik > -kPenalty) ++finite;
    if (results[s].loglik > results[best].loglik) best = s;
  }
  if (finite == 0) throw EstimationError("fit: no start produced a finite log-likelihood");

  const StartResult& b = results[best];
  EstimationResult out;
  out.params = to_model(b.x);
  out.R = std::exp(b.x[kNoise]);
  out.loglik = b.loglik;
  out.converged = b.converged;
  out.iterations = b.iterations;
  out.finite_starts = finite;
  if (!out.converged) out.warnings.push_back("simplex did not reach the size tolerance");

  const StdErrorResult se = std_errors(out.params, out.R, y, spec, opt.fixed);
  out.std_errors = se.se;
  if (!se.warning.empty()) out.warnings.push_back(se.warning);

  const FilterOutput fo = kalman_filter(out.params, out.R, y, spec);
  const std::size_t skip = std::min<std::size_t>(std::size_t(spec.burn_in), fo.standardized_residuals.size());
  std::span<const double> resid(fo.standardized_residuals);
  try {
    out.diagnostics = ljung_box(resid.subspan(skip), opt.ljung_box_lags);
  } catch (const Error& e) {
    out.warnings.push_back(std::string("Ljung-Box not computed: ") + e.what());
  }
  return out;
}

}  // namespace coxaff
