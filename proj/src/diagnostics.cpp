#include "coxaff/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "coxaff/cox_dist.hpp"
#include "coxaff/error.hpp"
#include "coxaff/parallel.hpp"
#include "coxaff/simulate.hpp"
#include "coxaff/transform.hpp"

namespace coxaff {

namespace {

constexpr std::size_t kBlock = 1024;

struct Accum {
  std::vector<double> sum, sum2;  // [t][k] flattened
};

}  // namespace

DistanceResult distance_to_stationary(const FellerModel& m, const std::vector<double>& t_grid,
                                      std::size_t n_paths, const RngStream& rng,
                                      const DistanceOptions& opt) {
  m.validate();
  if (n_paths < 2) throw DomainError("distance_to_stationary: n_paths must be >= 2");
  if (!(opt.window > 0.0)) throw DomainError("distance_to_stationary: window must be > 0");
  if (opt.k_max < 1) throw DomainError("distance_to_stationary: k_max must be >= 1");
  for (double t : t_grid)
    if (!(t >= 0.0)) throw DomainError("distance_to_stationary: times must be >= 0");

  const std::size_t K = std::size_t(opt.k_max) + 1;
  const std::size_t T = t_grid.size();
  const auto coeffs = cir_transform_closed_form(m, Jet::variable(1.0, K - 1), opt.window);
  const CountPmf target = stationary_window_pmf(m, opt.window, opt.k_max);

  const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
  std::vector<Accum> blocks(n_blocks);
  parallel_for(n_blocks, opt.jobs, [&](std::size_t b) {
    Accum& acc = blocks[b];
    acc.sum.assign(T * K, 0.0);
    acc.sum2.assign(T * K, 0.0);
    const std::size_t end = std::min(n_paths, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      RngStream r = rng.split(i);
      const double start =
          opt.start == StartLaw::stationary ? sample_stationary_intensity(m, r) : m.lambda0;
      for (std::size_t j = 0; j < T; ++j) {
        const double lam = t_grid[j] > 0.0 ? sample_cir_transition(m, start, t_grid[j], r) : start;
        const Jet l = exp(coeffs.alpha - coeffs.beta[0] * lam);
        for (std::size_t k = 0; k < K; ++k) {
          const double p = (k % 2 == 0) ? l[k] : -l[k];
          acc.sum[j * K + k] += p;
          acc.sum2[j * K + k] += p * p;
        }
      }
    }
  });

  std::vector<double> sum(T * K, 0.0), sum2(T * K, 0.0);
  for (const auto& acc : blocks)
    for (std::size_t q = 0; q < T * K; ++q) {
      sum[q] += acc.sum[q];
      sum2[q] += acc.sum2[q];
    }

  DistanceResult out;
  out.t_grid = t_grid;
  out.distance.resize(T);
  out.noise_floor.resize(T);
  out.used.assign(T, false);
  const double n = double(n_paths);
  const double half_mean_abs = 0.5 * std::sqrt(2.0 / M_PI);
  for (std::size_t j = 0; j < T; ++j) {
    double tv = 0.0, floor = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double mean = sum[j * K + k] / n;
      const double var = std::max(0.0, (sum2[j * K + k] - n * mean * mean) / (n - 1.0));
      tv += std::abs(mean - target.probs[k]);
      floor += std::sqrt(var / n);
    }
    out.distance[j] = 0.5 * (tv + target.tail_bound);
    out.noise_floor[j] = half_mean_abs * floor;
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (std::size_t j = 0; j < T; ++j) {
    if (!(out.distance[j] > opt.noise_multiple * out.noise_floor[j]) || out.distance[j] <= 0.0) continue;
    out.used[j] = true;
    const double x = t_grid[j], y = std::log(out.distance[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used >= 2) {
    const double den = used * sxx - sx * sx;
    if (den > 0.0) {
      out.slope = (used * sxy - sx * sy) / den;
      out.slope_ok = true;
    }
  }
  return out;
}

}  // namespace coxaff
