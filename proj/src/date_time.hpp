#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace emrsim {

/// Seconds since 1970-01-01 00:00:00 (proleptic Gregorian, no leap seconds).
/// Negative values reach back before 1970; the supported span is 1900-2100.
using DateTime = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr double kDaysPerYear = 365.2425;
constexpr double kSecondsPerYear = kDaysPerYear * kSecondsPerDay;

struct CivilDateTime {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;
};

/// Days between 1970-01-01 and the given civil date (may be negative).
std::int64_t days_from_civil(int year, int month, int day);

CivilDateTime civil_from_datetime(DateTime t);

DateTime datetime_from_civil(int year, int month, int day, int hour = 0,
                             int minute = 0, int second = 0);

bool is_valid_civil_date(int year, int month, int day);

/// Accepts `YYYY-MM-DD` or `M/D/YYYY`. Returns false on malformed input.
bool parse_date(std::string_view text, DateTime& out);

/// Accepts `YYYY-MM-DD HH:MM:SS`. Returns false on malformed input.
bool parse_datetime(std::string_view text, DateTime& out);

/// `YYYY-MM-DD HH:MM:SS`, zero padded, 24-hour clock.
/// Throws std::invalid_argument outside years 1900-2100.
std::string format_datetime(DateTime t);

/// Renders the date part as `M/D/YYYY` (the range-table form).
std::string format_date_slash(DateTime t);

/// Completed calendar years between dob and `at` (birthday arithmetic).
int civil_age_years(DateTime dob, DateTime at);

/// Fractional years between two instants, using the mean Gregorian year.
inline double years_between(DateTime from, DateTime to) {
    return static_cast<double>(to - from) / kSecondsPerYear;
}

}  // namespace emrsim
