#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace riseer {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Returns nullopt on any
/// malformed or non-existent date.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

/// Calendar month, the canonical clock of the engine. Stored as a running
/// month count (year * 12 + month - 1) so ranges are plain integer ranges.
class Month {
 public:
  constexpr Month() = default;
  static constexpr Month from_index(int index) { return Month(index); }
  static constexpr Month of(int year, int month) {
    return Month(year * 12 + month - 1);
  }
  static Month of(const Date& date) {
    return of(static_cast<int>(date.year()),
              static_cast<int>(static_cast<unsigned>(date.month())));
  }
  /// Parses "YYYY-MM".
  static std::optional<Month> parse(std::string_view text);

  constexpr int index() const { return index_; }
  constexpr int year() const { return floor_div(index_, 12); }
  constexpr int month() const { return index_ - year() * 12 + 1; }

  Date first_day() const;
  Date last_day() const;
  std::string to_string() const;

  constexpr Month operator+(int months) const { return Month(index_ + months); }
  constexpr Month operator-(int months) const { return Month(index_ - months); }
  constexpr int operator-(Month other) const { return index_ - other.index_; }
  constexpr Month& operator++() {
    ++index_;
    return *this;
  }

  constexpr auto operator<=>(const Month&) const = default;

 private:
  constexpr explicit Month(int index) : index_(index) {}
  static constexpr int floor_div(int a, int b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
  }

  int index_ = 0;
};

/// Inclusive month range.
struct MonthRange {
  Month first;
  Month last;

  int size() const { return last - first + 1; }
  bool contains(Month m) const { return first <= m && m <= last; }
};

}  // namespace riseer
