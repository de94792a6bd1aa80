#include "epidss/date.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace epidss {

namespace {

constexpr std::array<std::string_view, 12> kMonthAbbr = {
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};

std::optional<int> parse_digits(std::string_view text) {
  if (text.empty()) {
    return std::nullopt;
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::optional<Date> checked(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                  std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) {
    return std::nullopt;
  }
  return std::chrono::sys_days{ymd};
}

std::optional<Date> parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    return std::nullopt;
  }
  auto y = parse_digits(text.substr(0, 4));
  auto m = parse_digits(text.substr(5, 2));
  auto d = parse_digits(text.substr(8, 2));
  if (!y || !m || !d) {
    return std::nullopt;
  }
  return checked(*y, *m, *d);
}

// 10-May-21 or 10-May-2021
std::optional<Date> parse_day_month_abbr(std::string_view text) {
  auto first = text.find('-');
  auto second = text.find('-', first == std::string_view::npos ? first : first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos) {
    return std::nullopt;
  }
  auto d = parse_digits(text.substr(0, first));
  auto month_text = text.substr(first + 1, second - first - 1);
  auto year_text = text.substr(second + 1);
  auto y = parse_digits(year_text);
  if (!d || !y || month_text.size() != 3) {
    return std::nullopt;
  }
  int month = 0;
  for (std::size_t i = 0; i < kMonthAbbr.size(); ++i) {
    bool same = true;
    for (std::size_t c = 0; c < 3; ++c) {
      if (std::tolower(static_cast<unsigned char>(month_text[c])) != kMonthAbbr[i][c]) {
        same = false;
        break;
      }
    }
    if (same) {
      month = static_cast<int>(i) + 1;
      break;
    }
  }
  if (month == 0) {
    return std::nullopt;
  }
  int year = *y;
  if (year_text.size() == 2) {
    year += 2000;
  } else if (year_text.size() != 4) {
    return std::nullopt;
  }
  return checked(year, month, *d);
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
  return std::chrono::sys_days{std::chrono::year_month_day{
      std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}};
}

std::optional<Date> parse_date(std::string_view text, DateFormat format) {
  switch (format) {
    case DateFormat::iso:
      return parse_iso(text);
    case DateFormat::day_month_abbr:
      return parse_day_month_abbr(text);
    case DateFormat::automatic:
      if (auto iso = parse_iso(text)) {
        return iso;
      }
      return parse_day_month_abbr(text);
  }
  return std::nullopt;
}

std::string format_iso(Date date) {
  std::chrono::year_month_day ymd{date};
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buffer;
}

std::optional<DateFormat> date_format_from_string(std::string_view name) {
  if (name == "auto") return DateFormat::automatic;
  if (name == "iso") return DateFormat::iso;
  if (name == "dd-mon-yy") return DateFormat::day_month_abbr;
  return std::nullopt;
}

std::string to_string(DateFormat format) {
  switch (format) {
    case DateFormat::automatic:
      return "auto";
    case DateFormat::iso:
      return "iso";
    case DateFormat::day_month_abbr:
      return "dd-mon-yy";
  }
  return "auto";
}

}  // namespace epidss
