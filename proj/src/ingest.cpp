#include "solarcast/ingest.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/solar_geometry.hpp"

namespace solarcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
std::vector<T> pick(const std::vector<T>& v, std::span<const std::size_t> idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

std::optional<std::vector<double>> pick(const std::optional<std::vector<double>>& v,
                                        std::span<const std::size_t> idx) {
    if (!v) return std::nullopt;
    return pick(*v, idx);
}

std::optional<std::vector<double>> cut(const std::optional<std::vector<double>>& v, std::size_t a,
                                       std::size_t b) {
    if (!v) return std::nullopt;
    return std::vector<double>(v->begin() + static_cast<std::ptrdiff_t>(a),
                               v->begin() + static_cast<std::ptrdiff_t>(b));
}

void extend(std::optional<std::vector<double>>& dst, const std::optional<std::vector<double>>& src) {
    if (dst.has_value() != src.has_value())
        throw Error("channel_mismatch", "cannot append series with different channels");
    if (dst) dst->insert(dst->end(), src->begin(), src->end());
}

}  // namespace

std::size_t HourlySeries::repaired_count() const noexcept {
    std::size_t n = 0;
    for (auto f : repaired) n += f ? 1 : 0;
    return n;
}

double HourlySeries::repaired_fraction() const noexcept {
    return empty() ? 0.0 : static_cast<double>(repaired_count()) / static_cast<double>(size());
}

std::size_t HourlySeries::missing_count() const noexcept {
    std::size_t n = 0;
    for (double x : radiation) n += std::isnan(x) ? 1 : 0;
    return n;
}

HourlySeries HourlySeries::slice(std::size_t begin, std::size_t end) const {
    HourlySeries out;
    out.station_id = station_id;
    auto a = static_cast<std::ptrdiff_t>(begin), b = static_cast<std::ptrdiff_t>(end);
    out.timestamps.assign(timestamps.begin() + a, timestamps.begin() + b);
    out.radiation.assign(radiation.begin() + a, radiation.begin() + b);
    out.repaired.assign(repaired.begin() + a, repaired.begin() + b);
    out.pressure = cut(pressure, begin, end);
    out.pressure_gradient = cut(pressure_gradient, begin, end);
    out.cloudiness = cut(cloudiness, begin, end);
    out.precipitation = cut(precipitation, begin, end);
    return out;
}

HourlySeries HourlySeries::select(std::span<const std::size_t> idx) const {
    HourlySeries out;
    out.station_id = station_id;
    out.timestamps = pick(timestamps, idx);
    out.radiation = pick(radiation, idx);
    out.repaired = pick(repaired, idx);
    out.pressure = pick(pressure, idx);
    out.pressure_gradient = pick(pressure_gradient, idx);
    out.cloudiness = pick(cloudiness, idx);
    out.precipitation = pick(precipitation, idx);
    return out;
}

void HourlySeries::append(const HourlySeries& o) {
    if (!o.empty() && !empty() && o.timestamps.front() <= timestamps.back())
        throw Error("unordered_timestamps", "appended series must start after this one ends");
    timestamps.insert(timestamps.end(), o.timestamps.begin(), o.timestamps.end());
    radiation.insert(radiation.end(), o.radiation.begin(), o.radiation.end());
    repaired.insert(repaired.end(), o.repaired.begin(), o.repaired.end());
    extend(pressure, o.pressure);
    extend(pressure_gradient, o.pressure_gradient);
    extend(cloudiness, o.cloudiness);
    extend(precipitation, o.precipitation);
}

ExogenousChannels ExogenousChannels::from(const HourlySeries& s) {
    return {s.cloudiness, s.pressure, s.precipitation};
}

ExogenousChannels ExogenousChannels::slice(std::size_t a, std::size_t b) const {
    return {cut(cloudiness, a, b), cut(pressure, a, b), cut(precipitation, a, b)};
}

ExogenousChannels ExogenousChannels::select(std::span<const std::size_t> idx) const {
    return {pick(cloudiness, idx), pick(pressure, idx), pick(precipitation, idx)};
}

}  // namespace solarcast

namespace solarcast::ingest {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t' || f.front() == '"')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '"' || f.back() == '\r'))
            f.remove_suffix(1);
    }
    return out;
}

double parse_value(std::string_view f, std::size_t line_no, const std::string& column) {
    if (f.empty() || f == "NaN" || f == "nan" || f == "NA") return kNaN;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v))
        throw Error("bad_value", "line " + std::to_string(line_no) + ": column '" + column +
                                     "' is not a number");
    return v;
}

}  // namespace

HourlySeries parse_csv(std::istream& in, const ColumnMap& columns, std::string station_id) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos)
        throw Error("missing_column", "CSV has no header row");

    const auto header = split_fields(line);
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto c_ts = find(columns.timestamp);
    const auto c_rad = find(columns.radiation);
    if (!c_ts) throw Error("missing_column", "missing mandatory column '" + columns.timestamp + "'");
    if (!c_rad) throw Error("missing_column", "missing mandatory column '" + columns.radiation + "'");
    const auto c_p = find(columns.pressure);
    const auto c_n = find(columns.cloudiness);
    const auto c_rp = find(columns.precipitation);

    HourlySeries s;
    s.station_id = std::move(station_id);
    if (c_p) s.pressure.emplace();
    if (c_n) s.cloudiness.emplace();
    if (c_rp) s.precipitation.emplace();

    std::set<Timestamp> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_fields(line);
        if (f.size() != header.size())
            throw Error("bad_row", "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(header.size()) + " fields, found " +
                                       std::to_string(f.size()));
        Timestamp ts;
        try {
            ts = parse_timestamp(f[*c_ts]);
        } catch (const Error& e) {
            throw Error("bad_timestamp", "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen.insert(ts).second)
            throw Error("duplicate_timestamp", "line " + std::to_string(line_no) + ": duplicate timestamp " +
                                                   format_timestamp(ts));
        if (!s.timestamps.empty() && ts < s.timestamps.back())
            throw Error("unordered_timestamps", "line " + std::to_string(line_no) +
                                                    ": timestamps must be increasing");
        const double x = parse_value(f[*c_rad], line_no, columns.radiation);
        if (x < 0.0)
            throw Error("negative_radiation", "line " + std::to_string(line_no) + ": negative radiation");
        s.timestamps.push_back(ts);
        s.radiation.push_back(x);
        s.repaired.push_back(0);
        if (c_p) s.pressure->push_back(parse_value(f[*c_p], line_no, columns.pressure));
        if (c_rp) {
            const double r = parse_value(f[*c_rp], line_no, columns.precipitation);
            if (r < 0.0)
                throw Error("negative_precipitation",
                            "line " + std::to_string(line_no) + ": negative precipitation");
            s.precipitation->push_back(r);
        }
        if (c_n) {
            const double n = parse_value(f[*c_n], line_no, columns.cloudiness);
            if (!std::isnan(n) && (n < 0.0 || n > 8.0))
                throw Error("octas_out_of_range", "line " + std::to_string(line_no) +
                                                      ": octas out of range (" + std::string(f[*c_n]) + ")");
            s.cloudiness->push_back(n);
        }
    }

    if (s.pressure) {
        std::vector<double> grad(s.size(), kNaN);
        for (std::size_t i = 1; i < s.size(); ++i)
            if (s.timestamps[i] - s.timestamps[i - 1] == std::chrono::hours{1})
                grad[i] = (*s.pressure)[i] - (*s.pressure)[i - 1];
        s.pressure_gradient = std::move(grad);
    }
    return s;
}

HourlySeries load_csv(const std::filesystem::path& path, const ColumnMap& columns) {
    std::ifstream in(path);
    if (!in) throw Error("missing_file", "cannot open data file " + path.string());
    return parse_csv(in, columns, path.stem().string());
}

void write_csv(std::ostream& out, const HourlySeries& s) {
    std::string text = "timestamp,ghi_whm2";
    if (s.pressure) text += ",pressure_pa";
    if (s.cloudiness) text += ",cloud_octas";
    if (s.precipitation) text += ",precip_mm";
    text += '\n';
    char buf[64];
    auto put = [&](double v) {
        text += ',';
        if (std::isnan(v)) return;
        std::snprintf(buf, sizeof buf, "%.10g", v);
        text += buf;
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        text += format_timestamp(s.timestamps[i]);
        put(s.radiation[i]);
        if (s.pressure) put((*s.pressure)[i]);
        if (s.cloudiness) put((*s.cloudiness)[i]);
        if (s.precipitation) put((*s.precipitation)[i]);
        text += '\n';
    }
    out << text;
}

namespace {

// Returns the number of values filled in.
std::size_t fill_by_hour(std::vector<double>& values, const std::vector<Timestamp>& ts,
                         const char* what, std::vector<std::uint8_t>* flags) {
    std::array<double, 24> sum{};
    std::array<std::size_t, 24> count{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) continue;
        const int h = hour_of_day(ts[i]);
        sum[static_cast<std::size_t>(h)] += values[i];
        ++count[static_cast<std::size_t>(h)];
    }
    std::size_t filled = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isnan(values[i])) continue;
        const auto h = static_cast<std::size_t>(hour_of_day(ts[i]));
        if (count[h] == 0)
            throw Error("empty_hour_slot", std::string(what) + ": hour " + std::to_string(h) +
                                               " has no observations to average");
        values[i] = sum[h] / static_cast<double>(count[h]);
        if (flags) (*flags)[i] = 1;
        ++filled;
    }
    return filled;
}

}  // namespace

RepairResult repair_missing(const HourlySeries& series, double max_missing_fraction) {
    RepairResult r{series, 0, 0.0, false};
    auto& s = r.series;
    if (s.repaired.size() != s.size()) s.repaired.assign(s.size(), 0);
    r.repaired = fill_by_hour(s.radiation, s.timestamps, "radiation", &s.repaired);
    if (s.pressure) fill_by_hour(*s.pressure, s.timestamps, "pressure", nullptr);
    if (s.pressure_gradient) fill_by_hour(*s.pressure_gradient, s.timestamps, "pressure_gradient", nullptr);
    if (s.cloudiness) fill_by_hour(*s.cloudiness, s.timestamps, "cloudiness", nullptr);
    if (s.precipitation) fill_by_hour(*s.precipitation, s.timestamps, "precipitation", nullptr);
    r.fraction = s.repaired_fraction();
    r.exceeds_ceiling = r.fraction > max_missing_fraction;
    return r;
}

HourlySeries daytime_filter(const HourlySeries& series, const StationMeta& meta,
                            const DaytimeOptions& opt) {
    const int window = opt.last_hour - opt.first_hour + 1;
    std::vector<std::size_t> keep;
    keep.reserve(series.size() * static_cast<std::size_t>(window) / 24 + 16);

    std::optional<std::chrono::sys_days> current;
    int expected_hour = opt.first_hour;
    auto close_day = [&]() {
        if (current && expected_hour != opt.last_hour + 1)
            throw Error("incomplete_day", "solar day " + format_date(*current) + " has " +
                                              std::to_string(expected_hour - opt.first_hour) + " of " +
                                              std::to_string(window) + " daytime samples");
    };

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto sh = solar::solar_hour_of(meta, series.timestamps[i]);
        if (sh.hour < opt.first_hour || sh.hour > opt.last_hour) continue;
        if (opt.drop_leap_day && is_leap_day(sh.date)) continue;
        if (!current || sh.date != *current) {
            close_day();
            current = sh.date;
            expected_hour = opt.first_hour;
        }
        if (sh.hour != expected_hour)
            throw Error("incomplete_day", "solar day " + format_date(sh.date) + " is missing hour " +
                                              std::to_string(expected_hour) + " of the daytime window");
        if (std::isnan(series.radiation[i]))
            throw Error("unrepaired_sample", "missing radiation at " + format_timestamp(series.timestamps[i]) +
                                                 "; run repair first");
        ++expected_hour;
        keep.push_back(i);
    }
    close_day();
    return series.select(keep);
}

std::pair<std::size_t, std::size_t> split_bounds(std::size_t n, const SplitSpec& spec) {
    if (spec.train < 0 || spec.validation < 0 || spec.test < 0 ||
        std::abs(spec.train + spec.validation + spec.test - 1.0) > 1e-9)
        throw Error("bad_split", "split fractions must be non-negative and sum to 1");
    if (n < 3) throw Error("series_too_short", "split needs at least 3 samples");
    const double dn = static_cast<double>(n);
    auto bound = [&](double frac) {
        return std::min(n, static_cast<std::size_t>(std::floor(dn * frac + 1e-9)));
    };
    const std::size_t train_end = bound(spec.train);
    const std::size_t val_end = std::max(train_end, bound(spec.train + spec.validation));
    return {train_end, val_end};
}

Split split(const HourlySeries& series, const SplitSpec& spec) {
    const auto [a, b] = split_bounds(series.size(), spec);
    return {series.slice(0, a), series.slice(a, b), series.slice(b, series.size())};
}

}  // namespace solarcast::ingest
