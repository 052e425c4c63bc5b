#include "coxaff/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "coxaff/error.hpp"
#include "coxaff/format.hpp"

namespace coxaff {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t parse_clock(const std::string& s) {
  int h = 0, m = 0, sec = 0;
  char tail = 0;
  const int n = std::sscanf(s.c_str(), "%d:%d:%d%c", &h, &m, &sec, &tail);
  if (n < 2 || n > 3 || h < 0 || h > 24 || m < 0 || m > 59 || sec < 0 || sec > 59)
    throw DataError("config: bad clock time '" + s + "' (expected HH:MM)");
  return ((std::int64_t(h) * 60 + m) * 60 + sec) * 1000;
}

std::string format_clock(std::int64_t ms) {
  char buf[16];
  const std::int64_t s = ms / 1000;
  if (s % 60)
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", int(s / 3600), int(s / 60 % 60), int(s % 60));
  else
    std::snprintf(buf, sizeof buf, "%02d:%02d", int(s / 3600), int(s / 60 % 60));
  return buf;
}

}  // namespace

ObservationSeries aggregate(const EventLog& log, const AggregateOptions& opt) {
  if (opt.interval_ms <= 0) throw DomainError("aggregate: interval must be > 0");
  if (opt.session.end_ms <= opt.session.start_ms || opt.session.start_ms < 0 ||
      opt.session.end_ms > kMillisPerDay)
    throw DomainError("aggregate: session must satisfy 0 <= start < end <= 24:00");
  const std::int64_t slots = (opt.session.end_ms - opt.session.start_ms) / opt.interval_ms;
  if (slots < 1) throw DomainError("aggregate: session shorter than one interval");
  const std::int64_t session_end = opt.session.start_ms + slots * opt.interval_ms;

  ObservationSeries out;
  out.interval_ms = opt.interval_ms;
  std::map<std::int64_t, std::vector<double>> days;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if ((opt.side && log.sides[i] != *opt.side) ||
        (!opt.instrument.empty() && log.instruments[i] != opt.instrument)) {
      ++out.dropped;
      continue;
    }
    const std::int64_t day = floor_div(log.timestamps[i], kMillisPerDay);
    const std::int64_t tod = log.timestamps[i] - day * kMillisPerDay;
    auto& c = days[day];
    if (c.empty()) c.assign(std::size_t(slots), 0.0);
    if (tod < opt.session.start_ms || tod >= session_end) {
      ++out.dropped;
      continue;
    }
    c[std::size_t((tod - opt.session.start_ms) / opt.interval_ms)] += 1.0;
  }
  out.n_days = days.size();
  if (out.dropped == log.size()) {
    out.counts.clear();
    out.interval_start.clear();
    out.warnings.push_back("no events inside the session; the series is empty");
    return out;
  }
  if (opt.average_days) {
    out.counts.assign(std::size_t(slots), 0.0);
    for (const auto& [day, c] : days)
      for (std::size_t k = 0; k < c.size(); ++k) out.counts[k] += c[k];
    for (double& c : out.counts) c /= double(days.size());
    for (std::int64_t k = 0; k < slots; ++k) out.interval_start.push_back(opt.session.start_ms + k * opt.interval_ms);
  } else {
    for (const auto& [day, c] : days) {
      for (std::int64_t k = 0; k < slots; ++k) {
        out.interval_start.push_back(day * kMillisPerDay + opt.session.start_ms + k * opt.interval_ms);
        out.counts.push_back(c[std::size_t(k)]);
      }
    }
  }
  out.observable.assign(out.counts.size(), 0.0);
  return out;
}

ObservationSeries to_observable(ObservationSeries s, int M, Observable kind) {
  if (M <= 0) throw DomainError("to_observable: M must be > 0");
  s.M = M;
  s.over_capacity.clear();
  s.observable.resize(s.counts.size());
  for (std::size_t i = 0; i < s.counts.size(); ++i) {
    const double f = s.counts[i] / M;
    s.observable[i] = kind == Observable::frequency ? f : 1.0 - f;
    if (s.counts[i] > M) s.over_capacity.push_back(i);
  }
  if (!s.over_capacity.empty())
    s.warnings.push_back(std::to_string(s.over_capacity.size()) + " interval(s) exceed M = " + std::to_string(M));
  return s;
}

std::vector<double> measurement_series(const ObservationSeries& s, Mapping mapping, Observable proxy) {
  std::vector<double> y(s.size());
  const double M = s.M;
  const double lo = 0.5 / M, hi = 1.0 - 0.5 / M;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (mapping == Mapping::direct) {
      y[i] = s.counts[i] / s.interval_minutes();
      continue;
    }
    const double f = s.counts[i] / M;
    const double p = std::clamp(proxy == Observable::frequency ? f : 1.0 - f, lo, hi);
    y[i] = mapping == Mapping::log_prob_no_arrival ? std::log(p) : p;
  }
  return y;
}

StateSpaceSpec state_space_for(const ObservationSeries& s, Mapping mapping) {
  StateSpaceSpec spec;
  spec.delta = s.interval_minutes();
  spec.window = s.interval_minutes() / s.M;
  spec.mapping = mapping;
  return spec;
}

void write_series_csv(const std::string& path, const ObservationSeries& s, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& h : header) out << "# " << h << '\n';
  out << "interval_start,count,observable\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << format_timestamp(s.interval_start[i]) << ',' << fmt_num(s.counts[i]) << ','
        << fmt_num(s.observable[i]) << '\n';
}

ObservationSeries load_series_csv(const std::string& path, int M) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open series file " + path);
  ObservationSeries s;
  s.M = M;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("interval_start", 0) == 0) continue;
    std::stringstream ss(line);
    std::string t, c, o;
    std::getline(ss, t, ',');
    std::getline(ss, c, ',');
    std::getline(ss, o, ',');
    const auto ts = parse_timestamp(t);
    char* end = nullptr;
    const double count = std::strtod(c.c_str(), &end);
    if (!ts || c.empty() || *end != '\0' || !(count >= 0.0))
      throw DataError(lineno, path + ": bad row at line " + std::to_string(lineno));
    s.interval_start.push_back(*ts);
    s.counts.push_back(count);
    s.observable.push_back(o.empty() ? 0.0 : std::strtod(o.c_str(), nullptr));
  }
  if (s.size() >= 2) s.interval_ms = s.interval_start[1] - s.interval_start[0];
  if (s.interval_ms <= 0) throw DataError(path + ": interval starts must increase");
  return s;
}

std::string mapping_name(Mapping m) {
  switch (m) {
    case Mapping::prob_no_arrival: return "prob_no_arrival";
    case Mapping::direct: return "direct";
    default: return "log_prob_no_arrival";
  }
}

Mapping parse_mapping(const std::string& n) {
  if (n == "log_prob_no_arrival") return Mapping::log_prob_no_arrival;
  if (n == "prob_no_arrival") return Mapping::prob_no_arrival;
  if (n == "direct") return Mapping::direct;
  throw DataError("unknown mapping '" + n + "'");
}

DataConfig parse_data_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw DataError("config: document must be a JSON object");
  DataConfig c;
  try {
    if (doc.contains("interval_seconds")) {
      const double s = doc.at("interval_seconds").get<double>();
      if (!(s > 0.0)) throw DomainError("config: interval_seconds must be > 0");
      c.aggregate.interval_ms = std::llround(s * 1000.0);
    }
    if (doc.contains("session")) {
      const auto& ses = doc.at("session");
      if (ses.contains("start")) c.aggregate.session.start_ms = parse_clock(ses.at("start").get<std::string>());
      if (ses.contains("end")) c.aggregate.session.end_ms = parse_clock(ses.at("end").get<std::string>());
    }
    if (doc.contains("M")) c.M = doc.at("M").get<int>();
    if (c.M <= 0) throw DomainError("config: M must be > 0");
    c.aggregate.average_days = doc.value("average_days", false);
    if (doc.contains("side")) {
      const std::string side = doc.at("side").get<std::string>();
      if (side != "any") {
        const auto s = parse_side(side);
        if (!s || *s == Side::unknown) throw DataError("config: side must be buy, sell or any");
        c.aggregate.side = *s;
      }
    }
    c.aggregate.instrument = doc.value("instrument", std::string());
    if (doc.contains("proxy")) {
      const std::string p = doc.at("proxy").get<std::string>();
      if (p == "no_arrival") c.proxy = Observable::no_arrival;
      else if (p == "frequency") c.proxy = Observable::frequency;
      else throw DataError("config: proxy must be no_arrival or frequency");
    }
    if (doc.contains("mapping")) c.mapping = parse_mapping(doc.at("mapping").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return c;
}

DataConfig load_data_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config file " + path + ": " + e.what());
  }
  return parse_data_config(doc);
}

nlohmann::json to_json(const DataConfig& c) {
  nlohmann::json j;
  j["interval_seconds"] = double(c.aggregate.interval_ms) / 1000.0;
  j["session"] = {{"start", format_clock(c.aggregate.session.start_ms)},
                  {"end", format_clock(c.aggregate.session.end_ms)}};
  j["M"] = c.M;
  j["average_days"] = c.aggregate.average_days;
  j["side"] = c.aggregate.side ? std::string(side_name(*c.aggregate.side)) : std::string("any");
  j["instrument"] = c.aggregate.instrument;
  j["proxy"] = c.proxy == Observable::frequency ? "frequency" : "no_arrival";
  j["mapping"] = mapping_name(c.mapping);
  return j;
}

}  // namespace coxaff
