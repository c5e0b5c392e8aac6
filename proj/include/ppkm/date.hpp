#ifndef PPKM_DATE_HPP
#define PPKM_DATE_HPP

#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "ppkm/error.hpp"

namespace ppkm {

/// Calendar date stored as a serial day count (days since 1970-01-01).
/// Only whole-day arithmetic is needed: series are day-indexed.
struct date {
    std::int64_t serial = 0;

    auto operator<=>(const date&) const = default;

    date operator+(long days) const { return date{serial + days}; }
    date operator-(long days) const { return date{serial - days}; }
    long operator-(const date& other) const {
        return static_cast<long>(serial - other.serial);
    }

    date& operator++() {
        ++serial;
        return *this;
    }
};

namespace detail {

// Civil-calendar conversion (proleptic Gregorian), Howard Hinnant's algorithm.
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yy = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yy + (m <= 2);
}

inline bool is_leap(int y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline unsigned last_day_of_month(int y, unsigned m) {
    static constexpr unsigned char table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : table[m - 1];
}

} // namespace detail

/// Parses a strict ISO-8601 calendar date "YYYY-MM-DD".
inline date parse_date(std::string_view text) {
    auto fail = [&] {
        throw error(errc::parse_error, "invalid ISO date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
    auto digits = [&](std::size_t pos, std::size_t n) {
        long v = 0;
        for (std::size_t i = pos; i < pos + n; ++i) {
            char c = text[i];
            if (c < '0' || c > '9') fail();
            v = v * 10 + (c - '0');
        }
        return v;
    };
    const int y = static_cast<int>(digits(0, 4));
    const unsigned m = static_cast<unsigned>(digits(5, 2));
    const unsigned d = static_cast<unsigned>(digits(8, 2));
    if (m < 1 || m > 12 || d < 1 || d > detail::last_day_of_month(y, m)) fail();
    return date{detail::days_from_civil(y, m, d)};
}

inline std::string to_iso(const date& dt) {
    int y;
    unsigned m, d;
    detail::civil_from_days(dt.serial, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return std::string(buf);
}

} // namespace ppkm

#endif
