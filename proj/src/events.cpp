#include "coxaff/events.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "coxaff/error.hpp"

namespace coxaff {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  const auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return r.ec == std::errc();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void EventLog::push_back(std::int64_t t, Side side, std::string instrument) {
  timestamps.push_back(t);
  sides.push_back(side);
  instruments.push_back(std::move(instrument));
}

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  int y, mo, d, h, mi, sec, ms = 0;
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':')
    return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, h) ||
      !read_int(s, 14, 2, mi) || !read_int(s, 17, 2, sec))
    return std::nullopt;
  if (s.size() > 19) {
    if (s[19] != '.' || s.size() == 20 || s.size() > 23) return std::nullopt;
    const std::size_t digits = s.size() - 20;
    if (!read_int(s, 20, digits, ms)) return std::nullopt;
    for (std::size_t i = digits; i < 3; ++i) ms *= 10;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * kMillisPerDay + ((std::int64_t(h) * 60 + mi) * 60 + sec) * 1000 + ms;
}

std::string format_timestamp(std::int64_t ms) {
  using namespace std::chrono;
  std::int64_t days = ms / kMillisPerDay, rem = ms % kMillisPerDay;
  if (rem < 0) {
    rem += kMillisPerDay;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()), int(rem / 3'600'000), int(rem / 60'000 % 60), int(rem / 1000 % 60),
                int(rem % 1000));
  return buf;
}

std::string_view side_name(Side s) {
  switch (s) {
    case Side::buy: return "buy";
    case Side::sell: return "sell";
    default: return "";
  }
}

std::optional<Side> parse_side(std::string_view t) {
  t = trim(t);
  if (t.empty()) return Side::unknown;
  if (t == "buy" || t == "BUY" || t == "B") return Side::buy;
  if (t == "sell" || t == "SELL" || t == "S") return Side::sell;
  return std::nullopt;
}

EventLog read_events(std::istream& in, EventLoadReport* report) {
  EventLoadReport local;
  EventLoadReport& rep = report ? *report : local;
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    if (lineno == 1 && v.substr(0, 9) == "timestamp") continue;
    std::string_view fields[3];
    int nf = 0;
    bool too_many = false;
    while (true) {
      const std::size_t c = v.find(',');
      if (nf == 3) {
        too_many = true;
        break;
      }
      fields[nf++] = v.substr(0, c);
      if (c == std::string_view::npos) break;
      v.remove_prefix(c + 1);
    }
    const auto t = parse_timestamp(fields[0]);
    const auto side = nf > 1 ? parse_side(fields[1]) : std::optional<Side>(Side::unknown);
    if (too_many || !t || !side) {
      rep.rejected_lines.push_back(lineno);
      continue;
    }
    log.push_back(*t, *side, nf > 2 ? std::string(trim(fields[2])) : std::string());
  }
  if (!rep.rejected_lines.empty())
    rep.warnings.push_back(std::to_string(rep.rejected_lines.size()) + " unparseable row(s) skipped");
  if (!std::is_sorted(log.timestamps.begin(), log.timestamps.end())) {
    std::vector<std::size_t> order(log.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return log.timestamps[a] < log.timestamps[b]; });
    EventLog sorted;
    for (std::size_t i : order) sorted.push_back(log.timestamps[i], log.sides[i], std::move(log.instruments[i]));
    log = std::move(sorted);
    rep.resorted = true;
    rep.warnings.push_back("events were out of order and have been sorted");
  }
  return log;
}

EventLog load_events(const std::string& path, EventLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open event file " + path);
  return read_events(in, report);
}

void write_events(std::ostream& out, const EventLog& log) {
  out << "timestamp,side,instrument\n";
  for (std::size_t i = 0; i < log.size(); ++i) {
    const std::string& ins = log.instruments[i];
    if (ins.find_first_of(",\n\r") != std::string::npos)
      throw DataError(i, "instrument tag '" + ins + "' cannot be written to CSV");
    out << format_timestamp(log.timestamps[i]) << ',' << side_name(log.sides[i]) << ',' << ins << '\n';
  }
}

void save_events(const std::string& path, const EventLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_events(out, log);
}

}  // namespace coxaff
