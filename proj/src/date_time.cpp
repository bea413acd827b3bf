#include "date_time.hpp"

#include <cstdio>
#include <stdexcept>

namespace emrsim {

namespace {

struct CivilDate {
    int year;
    int month;
    int day;
};

// Howard Hinnant's branchless civil-date algorithms.
CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m),
            static_cast<int>(d)};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::int64_t days_from_civil(int year, int month, int day) {
    const int y = year - (month <= 2);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDateTime civil_from_datetime(DateTime t) {
    const std::int64_t days = floor_div(t, kSecondsPerDay);
    std::int64_t sec = t - days * kSecondsPerDay;
    const CivilDate d = civil_from_days(days);
    CivilDateTime out;
    out.year = d.year;
    out.month = d.month;
    out.day = d.day;
    out.hour = static_cast<int>(sec / 3600);
    sec %= 3600;
    out.minute = static_cast<int>(sec / 60);
    out.second = static_cast<int>(sec % 60);
    return out;
}

DateTime datetime_from_civil(int year, int month, int day, int hour,
                             int minute, int second) {
    return days_from_civil(year, month, day) * kSecondsPerDay + hour * 3600 +
           minute * 60 + second;
}

bool is_valid_civil_date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    const CivilDate back = civil_from_days(days_from_civil(year, month, day));
    return back.year == year && back.month == month && back.day == day;
}

bool parse_date(std::string_view text, DateTime& out) {
    int y = 0;
    int m = 0;
    int d = 0;
    char trail = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &trail) == 3) {
        // ISO order.
    } else if (std::sscanf(s.c_str(), "%d/%d/%d%c", &m, &d, &y, &trail) == 3) {
        // M/D/YYYY as printed in the range tables.
    } else {
        return false;
    }
    if (!is_valid_civil_date(y, m, d)) return false;
    out = datetime_from_civil(y, m, d);
    return true;
}

bool parse_datetime(std::string_view text, DateTime& out) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char trail = 0;
    const std::string str(text);
    if (std::sscanf(str.c_str(), "%d-%d-%d %d:%d:%d%c", &y, &mo, &d, &h, &mi,
                    &s, &trail) != 6)
        return false;
    if (!is_valid_civil_date(y, mo, d)) return false;
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) return false;
    out = datetime_from_civil(y, mo, d, h, mi, s);
    return true;
}

std::string format_datetime(DateTime t) {
    const CivilDateTime c = civil_from_datetime(t);
    if (c.year < 1900 || c.year > 2100) {
        throw std::invalid_argument("datetime year " + std::to_string(c.year) +
                                    " outside supported range 1900-2100");
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", c.year,
                  c.month, c.day, c.hour, c.minute, c.second);
    return buf;
}

std::string format_date_slash(DateTime t) {
    const CivilDateTime c = civil_from_datetime(t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%d/%d/%d", c.month, c.day, c.year);
    return buf;
}

int civil_age_years(DateTime dob, DateTime at) {
    const CivilDateTime b = civil_from_datetime(dob);
    const CivilDateTime a = civil_from_datetime(at);
    int age = a.year - b.year;
    if (a.month < b.month || (a.month == b.month && a.day < b.day)) --age;
    return age;
}

}  // namespace emrsim
