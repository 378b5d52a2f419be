#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace solarcast {

/// UTC instant with one-second resolution. Hourly samples sit on hour marks.
using Timestamp = std::chrono::sys_seconds;

/// Accepts `YYYY-MM-DDTHH:MM[:SS][Z]` (a space may replace the `T`).
/// Throws Error("bad_timestamp") on anything else.
Timestamp parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp ts);
std::string format_date(std::chrono::sys_days day);

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0);

int hour_of_day(Timestamp ts);
/// 1-based ordinal day within the calendar year (1..366).
int day_of_year(std::chrono::sys_days day);
/// Ordinal day with February 29 collapsed out, so every year has 365 slots.
/// Throws for February 29 itself.
int day_of_year_noleap(std::chrono::sys_days day);
bool is_leap_day(std::chrono::sys_days day);

}  // namespace solarcast
