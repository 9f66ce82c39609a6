#pragma once

#include <cstdint>
#include <string>

namespace windclime {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;
/// Canonical sampling step: one record every 3 hours.
inline constexpr std::int64_t kGridStepSeconds = 3 * kSecondsPerHour;

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
};

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);

CivilTime civil_from_time(std::int64_t utc_seconds);

std::int64_t make_time(int year, int month, int day, int hour = 0, int minute = 0,
                       int second = 0);

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (also accepts a space separator and no 'Z').
std::int64_t parse_iso8601(const std::string& text);

std::string format_iso8601(std::int64_t utc_seconds);

int month_of(std::int64_t utc_seconds);
int year_of(std::int64_t utc_seconds);

bool is_leap_year(int year);
int days_in_year(int year);

}  // namespace windclime
