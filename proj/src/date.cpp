#include "entrank/date.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>

namespace entrank {

namespace {

std::optional<int> parse_digits(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = parse_digits(text.substr(0, 4));
  auto m = parse_digits(text.substr(5, 2));
  auto d = parse_digits(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;

  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d)};
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::day:
      return "day";
    case Granularity::month:
      return "month";
    case Granularity::year:
      return "year";
  }
  return "day";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
  if (text == "day") return Granularity::day;
  if (text == "month") return Granularity::month;
  if (text == "year") return Granularity::year;
  return std::nullopt;
}

TimeBucket bucketize(const Date& date, Granularity granularity) {
  std::string key = date.to_string();
  switch (granularity) {
    case Granularity::day:
      break;
    case Granularity::month:
      key.resize(7);
      break;
    case Granularity::year:
      key.resize(4);
      break;
  }
  return TimeBucket{granularity, std::move(key)};
}

}  // namespace entrank
