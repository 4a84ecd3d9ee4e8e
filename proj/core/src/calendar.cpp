#include "riseer/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace riseer {
namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::optional<Month> Month::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  int y = 0, m = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m)) {
    return std::nullopt;
  }
  if (m < 1 || m > 12) return std::nullopt;
  return Month::of(y, m);
}

Date Month::first_day() const {
  return Date{std::chrono::year{year()},
              std::chrono::month{static_cast<unsigned>(month())}, std::chrono::day{1}};
}

Date Month::last_day() const {
  std::chrono::year_month_day_last last{
      std::chrono::year{year()},
      std::chrono::month_day_last{std::chrono::month{static_cast<unsigned>(month())}}};
  return Date{last};
}

std::string Month::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month());
  return buf;
}

}  // namespace riseer
