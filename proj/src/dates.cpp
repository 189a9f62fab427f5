#include "webkg/dates.hpp"

#include <cstdio>

#include "webkg/strings.hpp"

namespace webkg {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) {
        return false;
    }
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') {
            return false;
        }
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

bool boundary_at(std::string_view s, std::size_t pos) {
    return pos >= s.size() || !(s[pos] >= '0' && s[pos] <= '9');
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : kDays[m - 1];
}

bool valid(const CivilDate& d) {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

}  // namespace

std::string CivilDate::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<CivilDate> parse_civil_date(std::string_view text) {
    auto s = trim(text);
    CivilDate d;
    if (read_int(s, 0, 4, d.year) && s.size() >= 10 && s[4] == '-' && s[7] == '-' &&
        read_int(s, 5, 2, d.month) && read_int(s, 8, 2, d.day) && boundary_at(s, 10)) {
        if (valid(d)) {
            return d;
        }
        return std::nullopt;
    }
    if (s.size() >= 10 && s[2] == '/' && s[5] == '/' && read_int(s, 0, 2, d.month) &&
        read_int(s, 3, 2, d.day) && read_int(s, 6, 4, d.year) && boundary_at(s, 10)) {
        if (valid(d)) {
            return d;
        }
    }
    return std::nullopt;
}

CivilDate previous_day(CivilDate d) {
    if (--d.day >= 1) {
        return d;
    }
    if (--d.month < 1) {
        d.month = 12;
        --d.year;
    }
    d.day = days_in_month(d.year, d.month);
    return d;
}

}  // namespace webkg
