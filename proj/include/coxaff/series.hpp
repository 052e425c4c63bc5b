#pragma once

// Aggregation of events into fixed-interval counts and the observable fed to
// the filter. Model time is measured in minutes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coxaff/events.hpp"
#include "coxaff/kalman.hpp"

namespace coxaff {

struct Session {
  std::int64_t start_ms = 10 * 3'600'000;  // time of day
  std::int64_t end_ms = 18 * 3'600'000;
};

struct AggregateOptions {
  std::int64_t interval_ms = 60'000;
  Session session;
  bool average_days = false;    // average counts at matching intra-day slots
  std::optional<Side> side;     // keep only this side
  std::string instrument;       // keep only this tag; empty keeps all
};

enum class Observable {
  frequency,   // count / M
  no_arrival,  // 1 - count / M
};

struct ObservationSeries {
  std::int64_t interval_ms = 60'000;
  // Absolute interval starts; for day-averaged series the time of day
  // (i.e. on 1970-01-01).
  std::vector<std::int64_t> interval_start;
  std::vector<double> counts;  // averages are fractional
  std::vector<double> observable;
  int M = 6000;
  std::vector<std::size_t> over_capacity;  // rows with count > M
  std::size_t n_days = 0;
  std::size_t dropped = 0;  // events outside the session or filtered out
  std::vector<std::string> warnings;

  std::size_t size() const { return counts.size(); }
  double interval_minutes() const { return double(interval_ms) / 60'000.0; }
};

// Days are those with at least one event passing the side/instrument
// filters, inside the session or not; each contributes
// (end - start) / interval slots. Pooled sessions are concatenated in
// trading time, so overnight gaps vanish.
ObservationSeries aggregate(const EventLog& log, const AggregateOptions& opt = {});

// observable = count / M, or 1 - count / M; rows with count > M are
// flagged, not altered.
ObservationSeries to_observable(ObservationSeries series, int M = 6000,
                                Observable kind = Observable::frequency);

// Measurement for the filter: the chosen proxy clamped to
// [1/(2M), 1 - 1/(2M)], logged for the log mapping. The direct mapping
// returns count per minute.
std::vector<double> measurement_series(const ObservationSeries& s, Mapping mapping,
                                       Observable proxy = Observable::no_arrival);

// delta = interval in minutes, window = interval / M (one latency slot).
StateSpaceSpec state_space_for(const ObservationSeries& s, Mapping mapping);

// Columns interval_start, count, observable.
void write_series_csv(const std::string& path, const ObservationSeries& s,
                      const std::vector<std::string>& header = {});
ObservationSeries load_series_csv(const std::string& path, int M = 6000);

struct DataConfig {
  AggregateOptions aggregate;
  int M = 6000;
  Observable proxy = Observable::no_arrival;
  Mapping mapping = Mapping::log_prob_no_arrival;
};

// {"interval_seconds": 60, "session": {"start": "10:00", "end": "18:00"},
//  "M": 6000, "average_days": false, "side": "sell", "instrument": "",
//  "proxy": "no_arrival", "mapping": "log_prob_no_arrival"}; every key optional.
DataConfig parse_data_config(const nlohmann::json& doc);
DataConfig load_data_config(const std::string& path);
nlohmann::json to_json(const DataConfig& c);

std::string mapping_name(Mapping m);
Mapping parse_mapping(const std::string& name);

}  // namespace coxaff
