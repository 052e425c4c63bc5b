#include "coxaff/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "coxaff/error.hpp"
#include "coxaff/format.hpp"
#include "coxaff/parallel.hpp"

namespace coxaff {

namespace {

constexpr std::size_t kBlock = 1024;

void check_steps(std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("simulate: n_steps must be >= 1");
}

void check_horizon(double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw DomainError("simulate: horizon must be finite and >= 0");
}

// Lambda of one path without storing the grid.
double path_hazard(const FellerModel& m, double horizon, std::size_t n_steps, RngStream& rng) {
  const double dt = horizon / double(n_steps);
  if (dt == 0.0) return 0.0;
  double lam = m.lambda0, acc = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double next = sample_cir_transition(m, lam, dt, rng);
    acc += 0.5 * dt * (lam + next);
    lam = next;
  }
  return acc;
}

template <typename PathFn>
void for_paths(std::size_t n_paths, const RngStream& rng, unsigned jobs, PathFn&& fn) {
  const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
  parallel_for(n_blocks, jobs, [&](std::size_t b) {
    const std::size_t end = std::min(n_paths, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      RngStream r = rng.split(i);
      fn(i, r);
    }
  });
}

void write_header(std::ofstream& out, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
}

}  // namespace

double sample_cir_transition(const FellerModel& m, double lambda_s, double dt, RngStream& rng) {
  if (!(lambda_s >= 0.0)) throw DomainError("sample_cir_transition: lambda_s must be >= 0");
  if (!(dt > 0.0)) throw DomainError("sample_cir_transition: dt must be > 0");
  const double s2 = m.sigma * m.sigma;
  const double c = s2 * (-std::expm1(-m.kappa * dt)) / (4.0 * m.kappa);
  const double d = 4.0 * m.kappa * m.theta / s2;
  const double l = lambda_s * std::exp(-m.kappa * dt) / c;
  if (!(d + l <= kGaussianTransitionThreshold)) {
    const TransitionMoments mom = cir_transition_moments(m, lambda_s, dt);
    return std::max(0.0, mom.mean + std::sqrt(mom.variance) * rng.normal());
  }
  const double j = double(rng.poisson(0.5 * l));
  return c * 2.0 * rng.gamma(0.5 * d + j);
}

double sample_stationary_intensity(const FellerModel& m, RngStream& rng) {
  const GammaLaw g = stationary_intensity(m);
  return rng.gamma(g.shape, 1.0 / g.rate);
}

std::size_t default_steps(const FellerModel& m, double horizon) {
  const double dt = std::min(0.01, 1.0 / (10.0 * m.kappa));
  return std::max<std::size_t>(1, std::size_t(std::ceil(horizon / dt - 1e-9)));
}

PathSample simulate_path(const FellerModel& m, double horizon, std::size_t n_steps, RngStream& rng) {
  m.validate();
  check_steps(n_steps);
  check_horizon(horizon);
  PathSample p;
  p.grid.resize(n_steps + 1);
  p.lambda.resize(n_steps + 1);
  p.cum_hazard.resize(n_steps + 1);
  const double dt = horizon / double(n_steps);
  p.grid[0] = 0.0;
  p.lambda[0] = m.lambda0;
  p.cum_hazard[0] = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    p.grid[i] = horizon * double(i) / double(n_steps);
    p.lambda[i] = dt > 0.0 ? sample_cir_transition(m, p.lambda[i - 1], dt, rng) : m.lambda0;
    p.cum_hazard[i] = p.cum_hazard[i - 1] + 0.5 * dt * (p.lambda[i - 1] + p.lambda[i]);
  }
  return p;
}

PathSample simulate_path_euler(const AffineModel& m, double horizon, std::size_t n_steps,
                               RngStream& rng) {
  m.validate();
  check_steps(n_steps);
  check_horizon(horizon);
  const Eigen::Index d = m.dim();
  const double dt = horizon / double(n_steps);
  const double sdt = std::sqrt(dt);
  PathSample p;
  p.grid.resize(n_steps + 1);
  p.lambda.resize(n_steps + 1);
  p.cum_hazard.resize(n_steps + 1);
  Eigen::VectorXd x = m.x0;
  Eigen::VectorXd z(d);
  p.grid[0] = 0.0;
  p.lambda[0] = std::max(0.0, m.intensity(x));
  p.cum_hazard[0] = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
    const Eigen::VectorXd vol = m.variance_levels(x).cwiseMax(0.0).cwiseSqrt();
    x += m.kappa * (m.theta - x) * dt + m.sigma * (vol.cwiseProduct(z) * sdt);
    p.grid[i] = horizon * double(i) / double(n_steps);
    p.lambda[i] = std::max(0.0, m.intensity(x));
    p.cum_hazard[i] = p.cum_hazard[i - 1] + 0.5 * dt * (p.lambda[i - 1] + p.lambda[i]);
  }
  return p;
}

std::vector<double> simulate_arrivals(const PathSample& path, RngStream& rng) {
  std::vector<double> out;
  if (path.grid.size() < 2) return out;
  const double total = path.cum_hazard.back();
  double level = rng.exponential();
  std::size_t i = 0;
  while (level <= total) {
    while (path.cum_hazard[i + 1] < level) ++i;
    const double h0 = path.cum_hazard[i], h1 = path.cum_hazard[i + 1];
    const double t0 = path.grid[i], t1 = path.grid[i + 1];
    const double t = h1 > h0 ? t0 + (level - h0) / (h1 - h0) * (t1 - t0) : t1;
    out.push_back(std::clamp(t, t0, t1));
    level += rng.exponential();
  }
  return out;
}

std::vector<double> simulate_hazards(const FellerModel& m, double horizon, std::size_t n_paths,
                                     const RngStream& rng, std::size_t n_steps, unsigned jobs) {
  m.validate();
  check_horizon(horizon);
  if (n_steps == 0) n_steps = default_steps(m, horizon);
  std::vector<double> out(n_paths);
  for_paths(n_paths, rng, jobs,
            [&](std::size_t i, RngStream& r) { out[i] = path_hazard(m, horizon, n_steps, r); });
  return out;
}

std::vector<std::uint64_t> simulate_counts(const FellerModel& m, double horizon,
                                           std::size_t n_paths, const RngStream& rng,
                                           std::size_t n_steps, unsigned jobs) {
  m.validate();
  check_horizon(horizon);
  if (n_steps == 0) n_steps = default_steps(m, horizon);
  std::vector<std::uint64_t> out(n_paths);
  for_paths(n_paths, rng, jobs, [&](std::size_t i, RngStream& r) {
    out[i] = r.poisson(path_hazard(m, horizon, n_steps, r));
  });
  return out;
}

MonteCarloPmf monte_carlo_pmf(const FellerModel& m, double horizon, std::size_t n_paths, int k_max,
                              const RngStream& rng, std::size_t n_steps, unsigned jobs) {
  if (n_paths < 1) throw DomainError("monte_carlo_pmf: n_paths must be >= 1");
  if (k_max < 0) throw DomainError("monte_carlo_pmf: k_max must be >= 0");
  const std::vector<double> hz = simulate_hazards(m, horizon, n_paths, rng, n_steps, jobs);
  const std::size_t K = std::size_t(k_max) + 1;
  std::vector<double> sum(K, 0.0), sum2(K, 0.0), p(K);
  for (double h : hz) {
    p[0] = std::exp(-h);
    for (std::size_t k = 1; k < K; ++k) p[k] = p[k - 1] * h / double(k);
    for (std::size_t k = 0; k < K; ++k) {
      sum[k] += p[k];
      sum2[k] += p[k] * p[k];
    }
  }
  MonteCarloPmf out;
  out.n_paths = n_paths;
  out.pmf.horizon = horizon;
  out.pmf.probs.resize(K);
  out.std_errors.resize(K);
  const double n = double(n_paths);
  for (std::size_t k = 0; k < K; ++k) {
    const double mean = sum[k] / n;
    const double var = n > 1 ? std::max(0.0, (sum2[k] - n * mean * mean) / (n - 1.0)) : 0.0;
    out.pmf.probs[k] = mean;
    out.std_errors[k] = std::sqrt(var / n);
  }
  out.pmf.tail_bound = std::max(0.0, 1.0 - out.pmf.sum());
  return out;
}

void write_path_csv(const std::string& file, const PathSample& path,
                    const std::vector<std::string>& header) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file);
  write_header(out, header);
  out << "t,lambda,cum_hazard\n";
  for (std::size_t i = 0; i < path.grid.size(); ++i)
    out << fmt_num(path.grid[i]) << ',' << fmt_num(path.lambda[i]) << ','
        << fmt_num(path.cum_hazard[i]) << '\n';
}

void write_arrivals_csv(const std::string& file, const std::vector<double>& arrivals,
                        const std::vector<std::string>& header) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file);
  write_header(out, header);
  out << "t\n";
  for (double t : arrivals) out << fmt_num(t) << '\n';
}

}  // namespace coxaff
