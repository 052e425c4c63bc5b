#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coxaff/error.hpp"
#include "coxaff/events.hpp"
#include "coxaff/model_json.hpp"
#include "coxaff/series.hpp"
#include "coxaff/simulate.hpp"

using namespace coxaff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coxaff_test_data_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::int64_t at(const char* iso) { return *parse_timestamp(iso); }

}  // namespace

TEST_CASE("timestamps") {
  CHECK(at("1970-01-01T00:00:00.000") == 0);
  CHECK(at("1970-01-02T00:00:00.001") == kMillisPerDay + 1);
  CHECK(at("2012-10-01 10:00:00.5") == at("2012-10-01T10:00:00.500"));
  CHECK(at("2012-10-01T10:00:00Z") == at("2012-10-01T10:00:00.000"));
  CHECK(format_timestamp(at("2012-10-31T17:59:59.999")) == "2012-10-31T17:59:59.999");
  CHECK(format_timestamp(at("1969-12-31T23:59:59.999")) == "1969-12-31T23:59:59.999");
  CHECK_FALSE(parse_timestamp("2012-02-30T10:00:00.000"));
  CHECK_FALSE(parse_timestamp("2012-10-01T25:00:00.000"));
  CHECK_FALSE(parse_timestamp("2012-10-01T10:00:00.1234"));
  CHECK_FALSE(parse_timestamp("yesterday"));
}

TEST_CASE("empty file gives an empty log") {
  const fs::path p = scratch("empty.csv");
  { std::ofstream(p).flush(); }
  EventLoadReport rep;
  CHECK(load_events(p.string(), &rep).empty());
  CHECK(rep.rejected_lines.empty());
  CHECK_THROWS_AS(load_events(scratch("missing.csv").string()), DataError);
}

TEST_CASE("bad rows are rejected by line and disorder is sorted") {
  std::istringstream in(
      "timestamp,side,instrument\n"
      "2012-10-01T10:00:02.000,sell,A\n"
      "not a time,sell,A\n"
      "2012-10-01T10:00:01.000,buy,A\n"
      "2012-10-01T10:00:03.000,hold,A\n"
      "2012-10-01T10:00:01.000,,B\n");
  EventLoadReport rep;
  const EventLog log = read_events(in, &rep);
  CHECK(rep.rejected_lines == std::vector<std::size_t>{3, 5});
  CHECK(rep.resorted);
  REQUIRE(log.size() == 3);
  CHECK(log.timestamps[0] == at("2012-10-01T10:00:01.000"));
  CHECK(log.sides[0] == Side::buy);
  CHECK(log.instruments[1] == "B");
  CHECK(log.sides[1] == Side::unknown);
  CHECK(log.sides[2] == Side::sell);
}

TEST_CASE("535-record session round-trips bit-identically") {
  RngStream r(535);
  EventLog log;
  std::int64_t t = at("2012-10-15T10:00:00.000");
  for (int i = 0; i < 535; ++i) {
    t += std::int64_t(r.exponential() * 50'000.0);
    log.push_back(t, i % 3 == 0 ? Side::buy : Side::sell, i % 2 ? "BOVA11" : "");
  }
  const fs::path a = scratch("rt_a.csv"), b = scratch("rt_b.csv");
  save_events(a.string(), log);
  const EventLog back = load_events(a.string());
  CHECK(back == log);
  save_events(b.string(), back);
  CHECK(slurp(a) == slurp(b));

  const ObservationSeries s1 = aggregate(log), s2 = aggregate(back);
  CHECK(s1.counts == s2.counts);
  CHECK(s1.interval_start == s2.interval_start);
}

TEST_CASE("one event per minute gives unit counts") {
  EventLog log;
  const std::int64_t open = at("2012-10-01T10:00:00.000");
  for (int i = 0; i < 60; ++i) log.push_back(open + i * 60'000 + 30'000, Side::sell);
  AggregateOptions opt;
  opt.session.end_ms = 11 * 3'600'000;
  const ObservationSeries s = aggregate(log, opt);
  REQUIRE(s.size() == 60);
  for (double c : s.counts) CHECK(c == 1.0);
  CHECK(s.interval_start[0] == open);
  CHECK(s.interval_start[59] == open + 59 * 60'000);
  CHECK(s.n_days == 1);
}

TEST_CASE("events outside the session are dropped and counted") {
  EventLog log;
  log.push_back(at("2012-10-01T09:59:59.999"));
  log.push_back(at("2012-10-01T10:00:00.000"));
  log.push_back(at("2012-10-01T17:59:59.999"));
  log.push_back(at("2012-10-01T18:00:00.000"));
  log.push_back(at("2012-10-02T03:00:00.000"));
  const ObservationSeries s = aggregate(log);
  CHECK(s.dropped == 3);
  CHECK(s.n_days == 2);  // the night event still marks day two as traded
  CHECK(s.size() == 960);
  double total = 0.0;
  for (double c : s.counts) total += c;
  CHECK(total == 2.0);
  CHECK(s.counts[0] == 1.0);
  CHECK(s.counts[479] == 1.0);

  EventLog night;
  night.push_back(at("2012-10-01T03:00:00.000"));
  const ObservationSeries e = aggregate(night);
  CHECK(e.size() == 0);
  CHECK(e.warnings.size() == 1);
}

TEST_CASE("filters and day averaging") {
  EventLog log;
  log.push_back(at("2012-10-01T10:00:10.000"), Side::sell, "A");
  log.push_back(at("2012-10-01T10:00:20.000"), Side::buy, "A");
  log.push_back(at("2012-10-02T10:00:10.000"), Side::sell, "A");
  log.push_back(at("2012-10-02T10:00:11.000"), Side::sell, "A");
  log.push_back(at("2012-10-02T10:01:11.000"), Side::sell, "B");
  AggregateOptions opt;
  opt.side = Side::sell;
  opt.instrument = "A";
  const ObservationSeries pooled = aggregate(log, opt);
  CHECK(pooled.dropped == 2);
  CHECK(pooled.size() == 960);
  CHECK(pooled.counts[0] == 1.0);
  CHECK(pooled.counts[480] == 2.0);
  opt.average_days = true;
  const ObservationSeries avg = aggregate(log, opt);
  CHECK(avg.size() == 480);
  CHECK(avg.counts[0] == 1.5);
  CHECK(avg.interval_start[0] == 10 * 3'600'000);
  CHECK(format_timestamp(avg.interval_start[1]) == "1970-01-01T10:01:00.000");
}

TEST_CASE("sum of counts equals in-session events") {
  RngStream r(7);
  EventLog log;
  std::int64_t t = at("2012-10-01T08:00:00.000");
  for (int i = 0; i < 20000; ++i) {
    t += std::int64_t(r.exponential() * 20'000.0);
    log.push_back(t, Side::sell);
  }
  const ObservationSeries s = aggregate(log);
  double total = 0.0;
  for (double c : s.counts) total += c;
  CHECK(total + double(s.dropped) == 20000.0);
  CHECK(s.n_days >= 4);
}

TEST_CASE("Poisson stream at five per minute") {
  RngStream r(99);
  EventLog log;
  const std::int64_t open = at("2012-10-01T10:00:00.000");
  double t = 0.0;
  for (;;) {
    t += r.exponential() / 5.0;
    if (t >= 480.0) break;
    log.push_back(open + std::int64_t(std::floor(t * 60'000.0)));
  }
  const ObservationSeries s = aggregate(log);
  double m = 0.0;
  for (double c : s.counts) m += c;
  m /= double(s.size());
  CHECK(std::abs(m - 5.0) < 3.0 * std::sqrt(5.0 / double(s.size())));
}

TEST_CASE("observable construction") {
  ObservationSeries s;
  s.counts = {0.0, 300.0, 6000.0, 7000.0};
  s.interval_start = {0, 60'000, 120'000, 180'000};
  const ObservationSeries f = to_observable(s, 6000);
  CHECK(f.observable[0] == 0.0);
  CHECK(f.observable[1] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(f.over_capacity == std::vector<std::size_t>{3});
  const ObservationSeries n = to_observable(s, 6000, Observable::no_arrival);
  CHECK(n.observable[1] == doctest::Approx(0.95).epsilon(1e-15));
  CHECK_THROWS_AS(to_observable(s, 0), DomainError);

  const auto y = measurement_series(f, Mapping::log_prob_no_arrival, Observable::frequency);
  CHECK(y[0] == doctest::Approx(std::log(1.0 / 12000.0)));
  const auto z = measurement_series(f, Mapping::log_prob_no_arrival, Observable::no_arrival);
  CHECK(z[0] == doctest::Approx(std::log(1.0 - 1.0 / 12000.0)));
  CHECK(z[2] == doctest::Approx(std::log(1.0 / 12000.0)));
  CHECK(z[3] == z[2]);
  const auto d = measurement_series(f, Mapping::direct);
  CHECK(d[1] == 300.0);

  const StateSpaceSpec spec = state_space_for(f, Mapping::log_prob_no_arrival);
  CHECK(spec.delta == 1.0);
  CHECK(spec.window == doctest::Approx(1.0 / 6000.0));
}

TEST_CASE("pipeline on simulated arrivals reproduces the no-arrival frequency") {
  // One session minute per simulated path; an off-session marker keeps
  // empty days in the series. The share of empty minutes estimates P0.
  const FellerModel m{1.0, 1.0, 0.5, 1.0};
  const std::int64_t open = at("2012-10-01T10:00:00.000");
  const RngStream base(17);
  const int n = 4000;
  EventLog log;
  for (int i = 0; i < n; ++i) {
    // Each path fills one minute of its own session day.
    RngStream r = base.split(std::uint64_t(i));
    PathSample p = simulate_path(m, 1.0, 100, r);
    p.arrivals = simulate_arrivals(p, r);
    for (double t : p.arrivals)
      log.push_back(open + std::int64_t(i) * kMillisPerDay + std::int64_t(std::floor(t * 60'000.0)));
    if (p.arrivals.empty()) log.push_back(open + std::int64_t(i) * kMillisPerDay + 3'600'000);
  }
  AggregateOptions opt;
  opt.session.end_ms = opt.session.start_ms + 60'000;
  const ObservationSeries s = aggregate(log, opt);
  REQUIRE(s.size() == std::size_t(n));
  double zero = 0.0;
  for (double c : s.counts) zero += c == 0.0 ? 1.0 : 0.0;
  const double freq = zero / n;
  const double p0 = prob_no_arrival(m, 1.0);
  CHECK(std::abs(freq - p0) < 3.0 * std::sqrt(p0 * (1.0 - p0) / n));
}

TEST_CASE("series CSV round trip") {
  EventLog log;
  for (int i = 0; i < 100; ++i) log.push_back(at("2012-10-01T10:00:00.000") + i * 7'000);
  const ObservationSeries s = to_observable(aggregate(log), 6000, Observable::no_arrival);
  const fs::path p = scratch("series.csv");
  write_series_csv(p.string(), s, {"test"});
  const ObservationSeries back = load_series_csv(p.string());
  CHECK(back.counts == s.counts);
  CHECK(back.observable == s.observable);
  CHECK(back.interval_start == s.interval_start);
  CHECK(back.interval_ms == 60'000);
}

TEST_CASE("data config") {
  const auto c = parse_data_config(nlohmann::json::parse(
      R"({"interval_seconds": 30, "session": {"start": "09:30", "end": "16:00"}, "M": 3000,
          "side": "sell", "average_days": true, "proxy": "frequency", "mapping": "direct"})"));
  CHECK(c.aggregate.interval_ms == 30'000);
  CHECK(c.aggregate.session.start_ms == 9 * 3'600'000 + 30 * 60'000);
  CHECK(c.aggregate.session.end_ms == 16 * 3'600'000);
  CHECK(c.M == 3000);
  CHECK(c.aggregate.side == Side::sell);
  CHECK(c.aggregate.average_days);
  CHECK(c.proxy == Observable::frequency);
  CHECK(c.mapping == Mapping::direct);
  const auto back = parse_data_config(to_json(c));
  CHECK(to_json(back) == to_json(c));
  const auto d = parse_data_config(nlohmann::json::object());
  CHECK(d.M == 6000);
  CHECK(d.aggregate.interval_ms == 60'000);
  CHECK(d.mapping == Mapping::log_prob_no_arrival);
  CHECK_THROWS_AS(parse_data_config(nlohmann::json::parse(R"({"M": 0})")), DomainError);
  CHECK_THROWS_AS(parse_data_config(nlohmann::json::parse(R"({"session": {"start": "ten"}})")), DataError);
  CHECK_THROWS_AS(parse_data_config(nlohmann::json::parse(R"({"mapping": "cubic"})")), DataError);
}

TEST_CASE("model documents") {
  const auto f = parse_model(nlohmann::json::parse(R"({"kind":"feller","kappa":0.2,"theta":0.04,"sigma":0.05})"));
  CHECK(f.kind == ModelKind::feller);
  CHECK(f.feller.lambda0 == 0.04);
  CHECK_FALSE(f.R);
  const auto back = parse_model(to_json(f));
  CHECK(back.feller.kappa == 0.2);

  const AffineModel two = multivariate_cir(Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(1.0, 2.0),
                                           Eigen::Vector2d(0.3, 0.4), Eigen::Vector2d(1.0, 2.0));
  const auto a = parse_model(to_json(two));
  CHECK(a.kind == ModelKind::affine);
  CHECK(a.affine.kappa == two.kappa);
  CHECK(a.affine.b == two.b);
  CHECK(a.affine.x0 == two.x0);

  CHECK_THROWS_AS(parse_model(nlohmann::json::parse(R"({"kind":"feller","kappa":0.2})")), DataError);
  CHECK_THROWS_AS(parse_model(nlohmann::json::parse(R"({"kind":"feller","kappa":-1,"theta":1,"sigma":1})")),
                  DomainError);
  CHECK_THROWS_AS(parse_model(nlohmann::json::parse(R"({"kind":"hawkes"})")), DataError);
  CHECK_THROWS_AS(parse_model(nlohmann::json::parse(
                      R"({"kind":"affine","kappa":[[1]],"theta":[1,2],"sigma":[[1]],"a":[0],"b":[[1]],"rho1":[1],"x0":[1]})")),
                  StructuralError);
}

TEST_CASE("bundled sample file") {
  EventLoadReport rep;
  const EventLog log = load_events(std::string(COXAFF_SOURCE_DIR) + "/data/sample_events.csv", &rep);
  CHECK(rep.rejected_lines.empty());
  CHECK_FALSE(rep.resorted);
  const ObservationSeries s = aggregate(log);
  CHECK(s.n_days == 3);
  CHECK(s.size() == 1440);
  CHECK(s.dropped == 0);
}
