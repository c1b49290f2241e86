#pragma once

/// @file carbon_ledger/date.hpp
/// @brief UTC calendar day with strict ISO-8601 `YYYY-MM-DD` text form.

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace carbon_ledger {

class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int y, unsigned m, unsigned d)
      : days_(std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}}) {}

  static std::optional<Date> try_parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int parts[3] = {0, 0, 0};
    const std::size_t starts[3] = {0, 5, 8};
    const std::size_t lens[3] = {4, 2, 2};
    for (int i = 0; i < 3; ++i) {
      for (std::size_t k = 0; k < lens[i]; ++k) {
        const char c = text[starts[i] + k];
        if (c < '0' || c > '9') return std::nullopt;
        parts[i] = parts[i] * 10 + (c - '0');
      }
    }
    const std::chrono::year_month_day ymd{std::chrono::year{parts[0]},
                                          std::chrono::month{static_cast<unsigned>(parts[1])},
                                          std::chrono::day{static_cast<unsigned>(parts[2])}};
    if (!ymd.ok()) return std::nullopt;
    return Date(std::chrono::sys_days{ymd});
  }

  static Date parse(std::string_view text) {
    auto d = try_parse(text);
    if (!d) throw std::invalid_argument("not an ISO date (YYYY-MM-DD): '" + std::string(text) + "'");
    return *d;
  }

  std::string to_string() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  constexpr std::chrono::sys_days days() const { return days_; }
  constexpr Date next() const { return Date(days_ + std::chrono::days{1}); }
  constexpr Date plus(int n) const { return Date(days_ + std::chrono::days{n}); }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;
  friend constexpr bool operator==(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Inclusive date range; `from > to` is the empty range.
struct DateRange {
  std::optional<Date> from;
  std::optional<Date> to;

  bool contains(const Date& d) const {
    return (!from || *from <= d) && (!to || d <= *to);
  }
};

}  // namespace carbon_ledger
