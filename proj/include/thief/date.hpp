#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "thief/common.hpp"

namespace thief {

// Calendar day, stored as days since 1970-01-01. ISO-8601 text form.
struct Date {
    std::int32_t serial = 0;

    static Date from_ymd(int year, unsigned month, unsigned day) {
        const std::chrono::year_month_day ymd{std::chrono::year{year},
                                              std::chrono::month{month},
                                              std::chrono::day{day}};
        if (!ymd.ok()) throw ValidationError(cat("invalid calendar date ", year, "-", month, "-", day));
        const std::chrono::sys_days days{ymd};
        return Date{static_cast<std::int32_t>(days.time_since_epoch().count())};
    }

    static Date parse(std::string_view text) {
        int y = 0;
        unsigned m = 0, d = 0;
        char extra = 0;
        const std::string buf(text);
        if (std::sscanf(buf.c_str(), "%d-%u-%u%c", &y, &m, &d, &extra) != 3)
            throw ValidationError(cat("cannot parse date '", buf, "' (expected YYYY-MM-DD)"));
        return from_ymd(y, m, d);
    }

    std::string to_string() const {
        const std::chrono::sys_days days{std::chrono::days{serial}};
        const std::chrono::year_month_day ymd{days};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    // ISO weekday: 1 = Monday ... 7 = Sunday.
    int iso_weekday() const {
        const std::chrono::sys_days days{std::chrono::days{serial}};
        return static_cast<int>(std::chrono::weekday{days}.iso_encoding());
    }

    Date operator+(int days) const { return Date{serial + days}; }
    Date operator-(int days) const { return Date{serial - days}; }
    int operator-(Date other) const { return serial - other.serial; }
    Date& operator++() { ++serial; return *this; }

    auto operator<=>(const Date&) const = default;
};

}  // namespace thief
