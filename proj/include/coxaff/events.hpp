#pragma once

// Timestamped order events.
//
// CSV layout:
//   timestamp,side,instrument
//   2012-10-01T10:00:00.123,sell,PETR4
// Timestamps are ISO-8601 with exactly millisecond resolution, read as UTC
// wall-clock time. `side` is buy, sell or empty; `instrument` may be empty
// and must not contain commas.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coxaff {

enum class Side { unknown, buy, sell };

inline constexpr std::int64_t kMillisPerDay = 86'400'000;

struct EventLog {
  std::vector<std::int64_t> timestamps;  // ms since 1970-01-01T00:00:00
  std::vector<Side> sides;
  std::vector<std::string> instruments;

  std::size_t size() const { return timestamps.size(); }
  bool empty() const { return timestamps.empty(); }
  void push_back(std::int64_t t, Side side = Side::unknown, std::string instrument = {});

  bool operator==(const EventLog&) const = default;
};

struct EventLoadReport {
  std::vector<std::size_t> rejected_lines;  // 1-based line numbers
  bool resorted = false;
  std::vector<std::string> warnings;
};

// "YYYY-MM-DDTHH:MM:SS[.fff][Z]" (a space may replace the T). Fractions
// beyond milliseconds are rejected.
std::optional<std::int64_t> parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t ms);

std::string_view side_name(Side s);
std::optional<Side> parse_side(std::string_view text);

// Rows that do not parse are skipped and listed in the report; out-of-order
// rows are stably sorted with a warning. Throws DataError if the file
// cannot be opened.
EventLog read_events(std::istream& in, EventLoadReport* report = nullptr);
EventLog load_events(const std::string& path, EventLoadReport* report = nullptr);

void write_events(std::ostream& out, const EventLog& log);
void save_events(const std::string& path, const EventLog& log);

}  // namespace coxaff
