#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace entrank {

struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  /// Canonical "YYYY-MM-DD".
  std::string to_string() const;
};

/// Strict ISO calendar date ("YYYY-MM-DD", four-digit year, valid day of month).
std::optional<Date> parse_date(std::string_view text);

enum class Granularity { day, month, year };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view text);

/// A publication period of fixed granularity. Ordered by key, which for a
/// single granularity is chronological.
struct TimeBucket {
  Granularity granularity = Granularity::day;
  std::string key;

  bool operator==(const TimeBucket& other) const { return key == other.key; }
  auto operator<=>(const TimeBucket& other) const { return key <=> other.key; }
};

TimeBucket bucketize(const Date& date, Granularity granularity = Granularity::day);

}  // namespace entrank
