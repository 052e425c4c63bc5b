// Writes the bundled sample event file: one continuous Feller path in
// trading time (minutes), cut into 10:00-18:00 sessions on consecutive days.

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "coxaff/events.hpp"
#include "coxaff/simulate.hpp"

int main(int argc, char** argv) {
  using namespace coxaff;
  const std::string path = argc > 1 ? argv[1] : "data/sample_events.csv";
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20121001;

  const FellerModel m{0.2, 5.0, 0.5, 5.0};  // per minute
  const int sessions = 3;
  const double session_minutes = 480.0;
  const std::int64_t first_day = *parse_timestamp("2012-10-01T00:00:00") / kMillisPerDay;
  const std::int64_t open_ms = 10 * 3'600'000;

  RngStream rng(seed);
  const double horizon = sessions * session_minutes;
  PathSample p = simulate_path(m, horizon, default_steps(m, horizon), rng);
  p.arrivals = simulate_arrivals(p, rng);

  EventLog log;
  for (double t : p.arrivals) {
    const int s = std::min(sessions - 1, int(t / session_minutes));
    const double in_session = t - s * session_minutes;
    const auto ms = std::int64_t(std::floor(in_session * 60'000.0));
    log.push_back((first_day + s) * kMillisPerDay + open_ms + std::min<std::int64_t>(ms, 480 * 60'000 - 1),
                  Side::sell, "SIM");
  }
  save_events(path, log);
  std::cout << log.size() << " events written to " << path << '\n';
}
