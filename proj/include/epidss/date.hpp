#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace epidss {

using Date = std::chrono::sys_days;

enum class DateFormat {
  automatic,     // ISO-8601 first, then DD-Mon-YY / DD-Mon-YYYY
  iso,           // YYYY-MM-DD
  day_month_abbr // DD-Mon-YY (covid19india daily files)
};

Date make_date(int year, unsigned month, unsigned day);

std::optional<Date> parse_date(std::string_view text, DateFormat format = DateFormat::automatic);

std::string format_iso(Date date);

std::optional<DateFormat> date_format_from_string(std::string_view name);
std::string to_string(DateFormat format);

}  // namespace epidss
