#include "coxaff/replication.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include "coxaff/error.hpp"
#include "coxaff/format.hpp"
#include "coxaff/parallel.hpp"
#include "coxaff/simulate.hpp"

namespace coxaff {

SimulatedSeries simulate_state_space(const FellerModel& truth, double R, const StateSpaceSpec& spec,
                                     std::size_t length, RngStream& rng) {
  truth.validate();
  spec.validate();
  const MeasurementLoading ld = measurement_loading(truth, spec);
  SimulatedSeries s;
  s.lambda.resize(length);
  s.y.resize(length);
  double lam = sample_stationary_intensity(truth, rng);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) lam = sample_cir_transition(truth, lam, spec.delta, rng);
    s.lambda[t] = lam;
    double mean;
    switch (spec.mapping) {
      case Mapping::prob_no_arrival: mean = spec.scale * std::exp(ld.alpha - ld.beta * lam); break;
      case Mapping::log_prob_no_arrival:
      case Mapping::direct:
      default: mean = spec.scale * (ld.alpha - ld.beta * lam); break;
    }
    s.y[t] = mean + R * rng.normal();
  }
  return s;
}

Histogram histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw DomainError("histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(std::size_t(bins), 0);
  if (values.empty()) {
    for (int i = 0; i <= bins; ++i) h.edges.push_back(double(i) / bins);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) {
    const double pad = std::max(std::abs(lo) * 1e-6, 1e-12);
    lo -= pad;
    hi += pad;
  }
  for (int i = 0; i <= bins; ++i) h.edges.push_back(lo + (hi - lo) * double(i) / bins);
  for (double v : values) {
    std::size_t b = std::size_t(std::floor((v - lo) / (hi - lo) * bins));
    h.counts[std::min(b, std::size_t(bins) - 1)] += 1;
  }
  return h;
}

ReplicationSummary replication_study(const FellerModel& truth, std::size_t n_reps,
                                     std::size_t series_len, const RngStream& rng,
                                     const ReplicationOptions& opt) {
  if (n_reps < 1) throw DomainError("replication_study: n_reps must be >= 1");
  truth.validate();

  struct Rep {
    std::optional<EstimationResult> est;
    std::string error;
  };
  std::vector<Rep> reps(n_reps);
  parallel_for(n_reps, opt.jobs, [&](std::size_t i) {
    RngStream r = rng.split(i);
    try {
      const SimulatedSeries s = simulate_state_space(truth, opt.R, opt.spec, series_len, r);
      FitOptions fo = opt.fit;
      fo.jobs = 1;
      fo.seed = r.split(0).seed();
      FellerModel init = truth;
      double init_R = opt.R;
      if (opt.init_from_moments) {
        const InitialGuess g = moment_initial_guess(s.y, opt.spec);
        init = g.params;
        init_R = g.R;
      }
      reps[i].est = fit(s.y, opt.spec, init, init_R, fo);
    } catch (const Error& e) {
      reps[i].error = "replication " + std::to_string(i) + ": " + e.what();
    }
  });

  ReplicationSummary out;
  out.n_reps = n_reps;
  out.ljung_box_lags = opt.fit.ljung_box_lags;
  out.ljung_box_pass_rate.assign(out.ljung_box_lags.size(), 0.0);
  const char* names[4] = {"theta", "kappa", "sigma", "R"};
  const double truths[4] = {truth.theta, truth.kappa, truth.sigma, opt.R};
  for (int p = 0; p < 4; ++p) out.params.push_back({names[p], truths[p], 0.0, 0.0, 0.0, {}});

  std::size_t with_lb = 0;
  for (const Rep& rep : reps) {
    if (!rep.est) {
      ++out.n_failed;
      out.failures.push_back(rep.error);
      continue;
    }
    const EstimationResult& e = *rep.est;
    if (e.converged) ++out.n_converged;
    const double est[4] = {e.params.theta, e.params.kappa, e.params.sigma, e.R};
    for (int p = 0; p < 4; ++p) out.params[std::size_t(p)].estimates.push_back(est[p]);
    if (e.diagnostics.p_values.size() == out.ljung_box_lags.size()) {
      ++with_lb;
      for (std::size_t l = 0; l < out.ljung_box_lags.size(); ++l)
        if (e.diagnostics.p_values[l] > 0.05) out.ljung_box_pass_rate[l] += 1.0;
    }
  }
  for (double& r : out.ljung_box_pass_rate) r = with_lb ? r / double(with_lb) : 0.0;

  for (ParameterSummary& ps : out.params) {
    const double n = double(ps.estimates.size());
    if (n == 0) continue;
    double s = 0.0, q = 0.0;
    for (double v : ps.estimates) {
      s += v;
      q += (v - ps.true_value) * (v - ps.true_value);
    }
    ps.mean = s / n;
    ps.mqe = q / n;
    double v2 = 0.0;
    for (double v : ps.estimates) v2 += (v - ps.mean) * (v - ps.mean);
    ps.std_dev = std::sqrt(v2 / n);
  }
  return out;
}

void write_replication_csv(const std::string& file, const ReplicationSummary& s,
                           const std::vector<std::string>& header) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file);
  for (const auto& h : header) out << "# " << h << '\n';
  out << "parameter,true_value,mean_estimate,mqe,std_error\n";
  for (const auto& p : s.params)
    out << p.name << ',' << fmt_num(p.true_value) << ',' << fmt_num(p.mean) << ',' << fmt_num(p.mqe)
        << ',' << fmt_num(p.std_dev) << '\n';
}

void write_histogram_csv(const std::string& file, const Histogram& h,
                         const std::vector<std::string>& header) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file);
  for (const auto& l : header) out << "# " << l << '\n';
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << fmt_num(h.edges[i]) << ',' << fmt_num(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
}

}  // namespace coxaff
