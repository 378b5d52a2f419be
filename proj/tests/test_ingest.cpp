#include <doctest.h>

#include <cmath>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/ingest.hpp"
#include "support.hpp"

using namespace solarcast;
namespace chr = std::chrono;

namespace {

HourlySeries parse(const std::string& text) {
    std::istringstream in(text);
    return ingest::parse_csv(in);
}

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

std::string error_message(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

// Two days of hourly samples where the value at hour h is `base + h`.
HourlySeries two_days(double base = 100.0) {
    HourlySeries s;
    const auto t0 = make_timestamp(2001, 3, 1, 0);
    for (int i = 0; i < 48; ++i) {
        s.timestamps.push_back(t0 + chr::hours(i));
        s.radiation.push_back(base + i % 24);
    }
    s.repaired.assign(s.size(), 0);
    return s;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("three valid rows parse without repairs") {
    const auto s = parse(
        "timestamp,ghi_whm2,pressure_pa,cloud_octas,precip_mm\n"
        "2001-06-01T10:00:00Z,500,101300,2,0\n"
        "2001-06-01T11:00:00Z,600,101290,1,0\n"
        "2001-06-01T12:00:00Z,650,101280,0,0.5\n");
    REQUIRE(s.size() == 3);
    CHECK(s.radiation[1] == 600.0);
    CHECK(s.repaired_count() == 0);
    REQUIRE(s.cloudiness);
    CHECK((*s.cloudiness)[0] == 2.0);
    REQUIRE(s.pressure_gradient);
    CHECK(std::isnan((*s.pressure_gradient)[0]));
    CHECK((*s.pressure_gradient)[2] == doctest::Approx(-10.0));
    CHECK(s.timestamps[2] - s.timestamps[0] == chr::hours(2));
}

TEST_CASE("optional channels may be absent and columns may be renamed") {
    ingest::ColumnMap cols;
    cols.timestamp = "time";
    cols.radiation = "ghi";
    std::istringstream in("ghi,time\n10,2001-01-01 09:00\n,2001-01-01 10:00\n");
    const auto s = ingest::parse_csv(in, cols);
    REQUIRE(s.size() == 2);
    CHECK_FALSE(s.pressure);
    CHECK_FALSE(s.cloudiness);
    CHECK(std::isnan(s.radiation[1]));
    CHECK(s.missing_count() == 1);
}

TEST_CASE("duplicate timestamp names the offending line") {
    const std::string text =
        "timestamp,ghi_whm2\n"
        "2001-06-01T10:00:00Z,500\n"
        "2001-06-01T11:00:00Z,600\n"
        "2001-06-01T11:00:00Z,610\n";
    CHECK(error_code([&] { parse(text); }) == "duplicate_timestamp");
    CHECK(error_message([&] { parse(text); }).find("line 4") != std::string::npos);
}

TEST_CASE("cloudiness outside 0..8 octas is rejected") {
    const std::string text = "timestamp,ghi_whm2,cloud_octas\n2001-06-01T10:00:00Z,500,9\n";
    CHECK(error_code([&] { parse(text); }) == "octas_out_of_range");
    CHECK(error_message([&] { parse(text); }).find("octas out of range") != std::string::npos);
}

TEST_CASE("malformed files are rejected") {
    CHECK(error_code([] { parse("time,ghi_whm2\n2001-06-01T10:00Z,1\n"); }) == "missing_column");
    CHECK(error_code([] { parse("timestamp,value\n2001-06-01T10:00Z,1\n"); }) == "missing_column");
    CHECK(error_code([] { parse("timestamp,ghi_whm2\nyesterday,1\n"); }) == "bad_timestamp");
    CHECK(error_code([] { parse("timestamp,ghi_whm2\n2001-06-01T10:00Z,abc\n"); }) == "bad_value");
    CHECK(error_code([] { parse("timestamp,ghi_whm2\n2001-06-01T10:00Z,-1\n"); }) == "negative_radiation");
    CHECK(error_code([] { parse(""); }) == "missing_column");
    CHECK(error_code([] { ingest::load_csv("/nonexistent/data.csv"); }) == "missing_file");
}

TEST_CASE("write_csv round trips through parse_csv") {
    const auto a = parse(
        "timestamp,ghi_whm2,pressure_pa,cloud_octas,precip_mm\n"
        "2001-06-01T10:00:00Z,500.25,101300,2,0\n"
        "2001-06-01T11:00:00Z,,101290,1,0.1\n");
    std::ostringstream out;
    ingest::write_csv(out, a);
    const auto b = parse(out.str());
    REQUIRE(b.size() == a.size());
    CHECK(b.timestamps == a.timestamps);
    CHECK(b.radiation[0] == a.radiation[0]);
    CHECK(std::isnan(b.radiation[1]));
    CHECK(*b.precipitation == *a.precipitation);
}

TEST_CASE("repair leaves a complete series unchanged") {
    const auto s = two_days();
    const auto r = ingest::repair_missing(s);
    CHECK(r.repaired == 0);
    CHECK(r.series.radiation == s.radiation);
    CHECK_FALSE(r.exceeds_ceiling);
}

TEST_CASE("a gap takes the mean of its hour of day") {
    HourlySeries s;
    const auto t0 = make_timestamp(2001, 3, 1, 0);
    for (int d = 0; d < 3; ++d)
        for (int h = 0; h < 24; ++h) {
            s.timestamps.push_back(t0 + chr::hours(24 * d + h));
            s.radiation.push_back(h == 10 ? 100.0 + 200.0 * d : 1.0);
        }
    s.repaired.assign(s.size(), 0);
    s.radiation[24 * 2 + 10] = std::nan("");  // the 10:00 values left are 100 and 300
    const auto r = ingest::repair_missing(s);
    CHECK(r.series.radiation[24 * 2 + 10] == 200.0);
    CHECK(r.repaired == 1);
    CHECK(r.series.repaired[24 * 2 + 10] == 1);
    CHECK(r.fraction == doctest::Approx(1.0 / 72.0));
    CHECK(r.series.repaired_fraction() == doctest::Approx(1.0 / 72.0));
}

TEST_CASE("exceeding the missing ceiling warns without failing") {
    auto s = two_days();
    for (int i = 0; i < 5; ++i) s.radiation[static_cast<std::size_t>(i)] = std::nan("");
    const auto r = ingest::repair_missing(s, 0.04);
    CHECK(r.exceeds_ceiling);
    CHECK(r.repaired == 5);
    CHECK_FALSE(ingest::repair_missing(s, 0.5).exceeds_ceiling);
}

TEST_CASE("an hour with no observations at all cannot be repaired") {
    auto s = two_days();
    s.radiation[11] = std::nan("");
    s.radiation[35] = std::nan("");
    CHECK(error_code([&] { ingest::repair_missing(s); }) == "empty_hour_slot");
}

TEST_CASE("repair is idempotent") {
    auto s = testing::daytime(testing::flat_scenario(0.5, 0.1, 0.7, 1, 3));
    s.pressure.reset();
    for (std::size_t i = 0; i < s.size(); i += 37) s.radiation[i] = std::nan("");
    for (std::size_t i = 5; i < s.size(); i += 53) (*s.cloudiness)[i] = std::nan("");
    const auto once = ingest::repair_missing(s).series;
    const auto twice = ingest::repair_missing(once).series;
    CHECK(once.radiation == twice.radiation);
    CHECK(*once.cloudiness == *twice.cloudiness);
    CHECK(once.repaired == twice.repaired);
    CHECK(once.missing_count() == 0);
}

TEST_CASE("daytime filter keeps nine contiguous samples per day") {
    const auto meta = StationMeta::from_degrees("greenwich", 45.0, 0.0);
    HourlySeries s;
    const auto t0 = make_timestamp(2001, 6, 1, 0);
    for (int i = 0; i < 48; ++i) {
        s.timestamps.push_back(t0 + chr::hours(i));
        s.radiation.push_back(static_cast<double>(i));
    }
    s.repaired.assign(s.size(), 0);
    const auto d = ingest::daytime_filter(s, meta);
    REQUIRE(d.size() == 18);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto sh = solar::solar_hour_of(meta, d.timestamps[i]);
        CHECK(sh.hour == 8 + static_cast<int>(i % 9));
    }
    // Sample 9 closes the first day and sample 10 opens the next, adjacent in the output.
    CHECK(solar::solar_hour_of(meta, d.timestamps[8]).hour == 16);
    CHECK(solar::solar_hour_of(meta, d.timestamps[9]).hour == 8);
    CHECK(d.timestamps[9] - d.timestamps[8] > chr::hours(1));
}

TEST_CASE("daytime filter on an empty series is empty") {
    CHECK(ingest::daytime_filter(HourlySeries{}, StationMeta::from_degrees("x", 40, 5)).empty());
}

TEST_CASE("daytime filter rejects a day missing window hours") {
    const auto meta = StationMeta::from_degrees("greenwich", 45.0, 0.0);
    HourlySeries s;
    const auto t0 = make_timestamp(2001, 6, 1, 0);
    for (int i = 0; i < 48; ++i) {
        if (i == 24 + 12) continue;
        s.timestamps.push_back(t0 + chr::hours(i));
        s.radiation.push_back(1.0);
    }
    s.repaired.assign(s.size(), 0);
    CHECK(error_code([&] { ingest::daytime_filter(s, meta); }) == "incomplete_day");
    CHECK(error_message([&] { ingest::daytime_filter(s, meta); }).find("2001-06-02") != std::string::npos);
}

TEST_CASE("daytime filter length is nine per complete day over a year") {
    for (double lon : {-5.0, 8.5, 8.7, 15.0}) {
        const auto meta = StationMeta::from_degrees("s", 42.0, lon);
        auto sc = testing::flat_scenario(0.5, 0.1, 0.7, 1, 1);
        sc.station = meta;
        sc.exogenous = false;
        const auto raw = synth::generate(sc);
        // Full UTC coverage keeps every solar day of the year complete except
        // possibly those cut by the series edges.
        std::size_t days = 0;
        std::optional<chr::sys_days> last;
        for (const auto ts : raw.timestamps) {
            const auto sh = solar::solar_hour_of(sc.truth(), ts);
            if (sh.hour == 8 && !is_leap_day(sh.date) && sh.date != last) {
                ++days;
                last = sh.date;
            }
        }
        const auto d = ingest::daytime_filter(raw, sc.truth());
        CHECK(d.size() == 9 * days);
        CHECK(days == 365);
    }
}

TEST_CASE("February 29 is dropped") {
    auto sc = testing::flat_scenario(0.5, 0.1, 0.7, 1, 1);
    sc.start_year = 2004;
    sc.exogenous = false;
    const auto d = ingest::daytime_filter(synth::generate(sc), sc.truth());
    CHECK(d.size() == 9 * 365);
    for (const auto ts : d.timestamps) CHECK_FALSE(is_leap_day(solar::solar_hour_of(sc.truth(), ts).date));
}

TEST_CASE("split of ten samples is 7/1/2") {
    HourlySeries s;
    for (int i = 0; i < 10; ++i) {
        s.timestamps.push_back(make_timestamp(2001, 1, 1, 0) + chr::hours(i));
        s.radiation.push_back(i);
    }
    s.repaired.assign(10, 0);
    const auto parts = ingest::split(s, {0.72, 0.08, 0.20});
    CHECK(parts.train.size() == 7);
    CHECK(parts.validation.size() == 1);
    CHECK(parts.test.size() == 2);
    CHECK(parts.test.radiation.front() == 8.0);

    const auto all_test = ingest::split(s, {0.0, 0.0, 1.0});
    CHECK(all_test.train.empty());
    CHECK(all_test.validation.empty());
    CHECK(all_test.test.size() == 10);

    const auto no_test = ingest::split(s, {0.9, 0.1, 0.0});
    CHECK(no_test.train.size() == 9);
    CHECK(no_test.validation.size() == 1);
    CHECK(no_test.test.empty());
}

TEST_CASE("split preconditions") {
    auto s = two_days();
    CHECK(error_code([&] { ingest::split(s, {0.5, 0.2, 0.2}); }) == "bad_split");
    CHECK(error_code([&] { ingest::split(s, {1.2, -0.2, 0.0}); }) == "bad_split");
    CHECK(error_code([&] { ingest::split(s.slice(0, 2), {0.72, 0.08, 0.2}); }) == "series_too_short");
}

TEST_CASE("split preserves order and loses nothing") {
    const auto s = two_days();
    for (const ingest::SplitSpec spec : {ingest::SplitSpec{0.72, 0.08, 0.2}, ingest::SplitSpec{0.33, 0.33, 0.34},
                                         ingest::SplitSpec{1.0, 0.0, 0.0}}) {
        for (std::size_t n = 3; n <= s.size(); ++n) {
            const auto part = s.slice(0, n);
            const auto p = ingest::split(part, spec);
            auto joined = p.train;
            joined.append(p.validation);
            joined.append(p.test);
            CHECK(joined.timestamps == part.timestamps);
            CHECK(joined.radiation == part.radiation);
        }
    }
}

}  // TEST_SUITE
