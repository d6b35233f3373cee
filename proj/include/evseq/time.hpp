#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace evseq {

// UTC instant with millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::year_month_day;

// Parses an ISO-8601 date-time that carries a zone designator ("Z" or
// "+hh:mm"/"-hh:mm"). Fractional seconds are truncated to milliseconds.
// Returns nullopt on any syntax error, out-of-range field or missing zone.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Canonical UTC rendering: YYYY-MM-DDTHH:MM:SS.mmmZ
std::string format_timestamp(Timestamp t);

// YYYY-MM-DD
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

Date date_of(Timestamp t);

// Monday = 0 ... Sunday = 6.
int weekday_index(Date d);
int weekday_index(Timestamp t);

std::optional<int> parse_weekday(std::string_view name);
const char* weekday_name(int index);
const char* month_name(int index);

double seconds_between(Timestamp from, Timestamp to);

}  // namespace evseq
