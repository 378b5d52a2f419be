#include "solarcast/time.hpp"

#include <charconv>
#include <cstdio>

#include "solarcast/error.hpp"

namespace solarcast {

using namespace std::chrono;

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > text.size()) return false;
    const char* first = text.data() + pos;
    const char* last = first + width;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

[[noreturn]] void bad(std::string_view text) {
    throw Error("bad_timestamp", "unparseable timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r'))
        text.remove_suffix(1);

    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':')
        bad(text);
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
        !read_int(text, 11, 2, h) || !read_int(text, 14, 2, mi))
        bad(text);
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_int(text, pos + 1, 2, s)) bad(text);
        pos += 3;
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) bad(text);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) bad(text);
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp ts) {
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss hms{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string format_date(sys_days day) {
    const year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp make_timestamp(int y, unsigned m, unsigned d, int h) {
    return sys_days{year{y} / month{m} / day{d}} + hours{h};
}

int hour_of_day(Timestamp ts) {
    return static_cast<int>(floor<hours>(ts - floor<days>(ts)).count());
}

int day_of_year(sys_days d) {
    const year_month_day ymd{d};
    return static_cast<int>((d - sys_days{ymd.year() / January / 1}).count()) + 1;
}

bool is_leap_day(sys_days d) {
    const year_month_day ymd{d};
    return ymd.month() == February && ymd.day() == day{29};
}

int day_of_year_noleap(sys_days d) {
    if (is_leap_day(d)) throw Error("leap_day", "February 29 has no slot in a 365-day year");
    const year_month_day ymd{d};
    int n = day_of_year(d);
    if (ymd.year().is_leap() && ymd.month() > February) --n;
    return n;
}

}  // namespace solarcast
