#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coxaff/cox_dist.hpp"
#include "coxaff/error.hpp"
#include "coxaff/simulate.hpp"

using namespace coxaff;

namespace {

struct Stats {
  double mean = 0.0, var = 0.0, se_mean = 0.0, se_var = 0.0;
};

Stats stats(const std::vector<double>& x) {
  const double n = double(x.size());
  Stats s;
  for (double v : x) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  s.var = m2 / (n - 1.0);
  s.se_mean = std::sqrt(s.var / n);
  s.se_var = std::sqrt((m4 / n - s.var * s.var) / n);
  return s;
}

}  // namespace

TEST_CASE("transition moments match the exact conditional moments") {
  const FellerModel m{0.8, 1.2, 0.6, 1.0};
  for (double lam : {0.0, 0.4, 2.5}) {
    RngStream r(100 + std::uint64_t(lam * 10));
    std::vector<double> x(1000000);
    for (double& v : x) v = sample_cir_transition(m, lam, 0.5, r);
    const Stats s = stats(x);
    const TransitionMoments mom = cir_transition_moments(m, lam, 0.5);
    CHECK(std::abs(s.mean - mom.mean) < 3.0 * s.se_mean);
    CHECK(std::abs(s.var - mom.variance) < 3.0 * s.se_var);
    for (double v : x) REQUIRE(v >= 0.0);
  }
}

TEST_CASE("from zero the transition is a scaled central chi-square") {
  const FellerModel m{1.0, 0.3, 1.5, 0.0};  // d = 0.53 < 1
  const double dt = 0.2;
  const double c = m.sigma * m.sigma * (1.0 - std::exp(-m.kappa * dt)) / (4.0 * m.kappa);
  const double d = 4.0 * m.kappa * m.theta / (m.sigma * m.sigma);
  RngStream r(7);
  std::vector<double> x(400000);
  for (double& v : x) {
    v = sample_cir_transition(m, 0.0, dt, r);
    REQUIRE(v > 0.0);
  }
  const Stats s = stats(x);
  CHECK(std::abs(s.mean - c * d) < 3.0 * s.se_mean);
  CHECK(std::abs(s.var - 2.0 * c * c * d) < 3.0 * s.se_var);
}

TEST_CASE("deterministic limit uses the moment-matched normal") {
  const FellerModel m{1.0, 1.0, 1e-12, 1.0};
  RngStream r(3);
  const PathSample p = simulate_path(m, 5.0, 500, r);
  for (double l : p.lambda) CHECK(l == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(p.cum_hazard.back() - 5.0) < 1e-10);
}

TEST_CASE("path invariants") {
  const FellerModel m{2.0, 0.5, 1.2, 0.1};
  RngStream r(5);
  const PathSample p = simulate_path(m, 3.0, 300, r);
  REQUIRE(p.grid.size() == 301);
  CHECK(p.grid.front() == 0.0);
  CHECK(p.grid.back() == 3.0);
  CHECK(p.cum_hazard.front() == 0.0);
  for (std::size_t i = 1; i < p.grid.size(); ++i) {
    CHECK(p.lambda[i] >= 0.0);
    CHECK(p.cum_hazard[i] >= p.cum_hazard[i - 1]);
  }
  const auto arr = simulate_arrivals(p, r);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    CHECK(arr[i] >= 0.0);
    CHECK(arr[i] <= 3.0);
    if (i) CHECK(arr[i] >= arr[i - 1]);
  }
  CHECK_THROWS_AS(simulate_path(m, 1.0, 0, r), DomainError);
}

TEST_CASE("long-run mean of the intensity") {
  const FellerModel m{1.0, 1.0, 0.5, 3.0};
  const RngStream base(17);
  std::vector<double> x(100000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    RngStream r = base.split(i);
    x[i] = simulate_path(m, 15.0, 30, r).lambda.back();
  }
  const Stats s = stats(x);
  CHECK(std::abs(s.mean - 1.0) < 3.0 * s.se_mean);
  CHECK(std::abs(s.var - stationary_intensity(m).variance()) < 3.0 * s.se_var);
}

TEST_CASE("trapezoid hazard error falls four-fold per halving") {
  // Smooth path: deterministic intensity relaxing from lambda0 to theta.
  const FellerModel m{1.5, 1.0, 1e-12, 3.0};
  const double exact = mean_count(m, 2.0);
  double prev = 0.0;
  for (std::size_t n : {10, 20, 40, 80}) {
    RngStream r(1);
    const double err = std::abs(simulate_path(m, 2.0, n, r).cum_hazard.back() - exact);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("arrivals from constant and zero intensity") {
  PathSample p;
  const double horizon = 1e4;
  for (int i = 0; i <= 100; ++i) {
    p.grid.push_back(horizon * i / 100.0);
    p.lambda.push_back(1.0);
    p.cum_hazard.push_back(horizon * i / 100.0);
  }
  RngStream r(9);
  const auto arr = simulate_arrivals(p, r);
  CHECK(std::abs(double(arr.size()) / horizon - 1.0) < 3.0 / std::sqrt(horizon));

  PathSample z = p;
  std::fill(z.lambda.begin(), z.lambda.end(), 0.0);
  std::fill(z.cum_hazard.begin(), z.cum_hazard.end(), 0.0);
  CHECK(simulate_arrivals(z, r).empty());
  CHECK(simulate_arrivals(PathSample{}, r).empty());
}

TEST_CASE("conditional on the path, window counts are Poisson") {
  const FellerModel m{0.5, 3.0, 1.0, 3.0};
  RngStream r(31);
  const PathSample p = simulate_path(m, 400.0, 40000, r);
  const auto arr = simulate_arrivals(p, r);
  // Dispersion statistic sum (N_j - Lambda_j)^2 / Lambda_j over unit windows.
  std::vector<double> counts(400, 0.0);
  for (double t : arr) counts[std::min<std::size_t>(399, std::size_t(t))] += 1.0;
  double stat = 0.0;
  int used = 0;
  for (std::size_t j = 0; j < 400; ++j) {
    const double lam = p.cum_hazard[(j + 1) * 100] - p.cum_hazard[j * 100];
    if (lam < 0.5) continue;
    stat += (counts[j] - lam) * (counts[j] - lam) / lam;
    ++used;
  }
  REQUIRE(used > 300);
  CHECK(std::abs(stat - used) < 4.0 * std::sqrt(2.0 * used));
}

TEST_CASE("parallel hazards are bit-identical to serial ones") {
  const FellerModel m{1.0, 1.0, 0.5, 1.0};
  const auto a = simulate_hazards(m, 1.0, 5000, RngStream(4, 2), 40, 1);
  const auto b = simulate_hazards(m, 1.0, 5000, RngStream(4, 2), 40, 4);
  CHECK(a == b);
  const auto c = simulate_hazards(m, 1.0, 5000, RngStream(4, 3), 40, 1);
  CHECK(a != c);
  const auto ma = monte_carlo_pmf(m, 1.0, 3000, 8, RngStream(5), 20, 1);
  const auto mb = monte_carlo_pmf(m, 1.0, 3000, 8, RngStream(5), 20, 3);
  CHECK(ma.pmf.probs == mb.pmf.probs);
}

TEST_CASE("Monte Carlo pmf") {
  const FellerModel m{1.0, 1.0, 0.5, 1.0};
  const auto z = monte_carlo_pmf(m, 0.0, 10, 5, RngStream(1));
  CHECK(z.pmf.probs[0] == 1.0);
  for (std::size_t k = 1; k <= 5; ++k) CHECK(z.pmf.probs[k] == 0.0);

  // Rao-Blackwellized estimate against the histogram of sampled counts.
  const std::size_t n = 100000;
  const auto mc = monte_carlo_pmf(m, 1.0, n, 6, RngStream(2), 50);
  const auto counts = simulate_counts(m, 1.0, n, RngStream(3), 50);
  for (std::size_t k = 0; k <= 6; ++k) {
    double f = 0.0;
    for (auto c : counts) f += (c == k) ? 1.0 : 0.0;
    f /= double(n);
    const double se = std::sqrt(f * (1.0 - f) / double(n) + mc.std_errors[k] * mc.std_errors[k]);
    CHECK(std::abs(f - mc.pmf.probs[k]) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("Euler scheme for a general affine model") {
  // Two-factor CIR; Euler carries discretisation bias, so the check is loose.
  const AffineModel am = multivariate_cir(Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(0.5, 1.0),
                                          Eigen::Vector2d(0.3, 0.4), Eigen::Vector2d(0.5, 1.0));
  const double exact = hazard_cumulants(am, 1.0, 1)[0];
  const RngStream base(8);
  std::vector<double> h(20000);
  for (std::size_t i = 0; i < h.size(); ++i) {
    RngStream r = base.split(i);
    const PathSample p = simulate_path_euler(am, 1.0, 100, r);
    for (double l : p.lambda) REQUIRE(l >= 0.0);
    h[i] = p.cum_hazard.back();
  }
  const Stats s = stats(h);
  CHECK(std::abs(s.mean - exact) < 3.0 * s.se_mean + 1e-3);
}

TEST_CASE("CSV export") {
  PathSample p;
  p.grid = {0.0, 0.5};
  p.lambda = {1.0, 0.25};
  p.cum_hazard = {0.0, 0.3125};
  const std::string f = "test_simulate_path.csv";
  write_path_csv(f, p, {"seed=1"});
  std::ifstream in(f);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "# seed=1\nt,lambda,cum_hazard\n0,1,0\n0.5,0.25,0.3125\n");
  std::remove(f.c_str());
  write_arrivals_csv(f, {0.125, 0.75});
  std::ifstream in2(f);
  std::stringstream s2;
  s2 << in2.rdbuf();
  CHECK(s2.str() == "t\n0.125\n0.75\n");
  std::remove(f.c_str());
}
