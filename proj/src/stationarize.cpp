#include "solarcast/stationarize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "solarcast/error.hpp"
#include "solarcast/solar_geometry.hpp"

namespace solarcast::stationarity {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::None: return "none";
        case Method::CI: return "CI";
        case Method::CSI: return "CSI";
        case Method::CSI_PC: return "CSI_PC";
    }
    return "none";
}

Method parse_method(std::string_view t) {
    if (t == "none" || t == "None" || t == "NONE") return Method::None;
    if (t == "CI" || t == "ci") return Method::CI;
    if (t == "CSI" || t == "csi") return Method::CSI;
    if (t == "CSI_PC" || t == "csi_pc" || t == "CSI+PC" || t == "csi+pc") return Method::CSI_PC;
    throw Error("bad_method", "unknown stationarization method '" + std::string(t) + "'");
}

std::size_t calendar_slot(const StationMeta& meta, Timestamp ts) {
    const auto sh = solar::solar_hour_of(meta, ts);
    if (sh.hour < 8 || sh.hour > 16)
        throw Error("non_daytime_sample", "sample at " + format_timestamp(ts) + " is outside 8:00-16:00 TST");
    const auto day = static_cast<std::size_t>(day_of_year_noleap(sh.date) - 1);
    return day * kDaytimeHours + static_cast<std::size_t>(sh.hour - 8);
}

double StationarizedSeries::scale(std::size_t i) const {
    double s = denominators[i];
    if (method == Method::CSI_PC) s *= periodic_coefficients[slots[i]];
    return s;
}

namespace {

template <class Denominator>
StationarizedSeries build(const HourlySeries& series, const StationMeta& meta, Method method,
                          Denominator denominator) {
    StationarizedSeries out;
    out.method = method;
    out.values.reserve(series.size());
    out.denominators.reserve(series.size());
    out.slots.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const Timestamp ts = series.timestamps[i];
        const double d = denominator(ts);
        if (!(d > 0.0))
            throw Error("nonpositive_denominator", "denominator is not positive at " + format_timestamp(ts));
        const double x = series.radiation[i];
        if (!(x >= 0.0))
            throw Error("bad_value", "radiation must be finite and non-negative at " + format_timestamp(ts));
        out.values.push_back(x / d);
        out.denominators.push_back(d);
        out.slots.push_back(calendar_slot(meta, ts));
    }
    return out;
}

}  // namespace

StationarizedSeries to_raw(const HourlySeries& series, const StationMeta& meta) {
    return build(series, meta, Method::None, [](Timestamp) { return 1.0; });
}

StationarizedSeries to_clearness_index(const HourlySeries& series, const StationMeta& meta) {
    return build(series, meta, Method::CI, [&](Timestamp ts) {
        const auto s = solar::sample_instant(meta, ts);
        if (!(s.sin_elevation > 0.0)) return 0.0;
        return solar::extraterrestrial(meta, s);
    });
}

StationarizedSeries to_clearsky_index(const HourlySeries& series, const StationMeta& meta) {
    if (!meta.has_clearsky())
        throw Error("clearsky_unfitted", "clear-sky index needs fitted tau and b");
    return build(series, meta, Method::CSI, [&](Timestamp ts) {
        const auto s = solar::sample_instant(meta, ts);
        if (!(s.sin_elevation > 0.0)) return 0.0;
        return solar::clearsky_ghi(meta, s);
    });
}

std::vector<double> periodic_coefficients(const StationarizedSeries& csi) {
    if (csi.method != Method::CSI)
        throw Error("bad_method", "periodic coefficients are computed from a CSI series");
    const std::size_t n = csi.size();
    if (n < 2 * kSlotsPerYear)
        throw Error("insufficient_data", "periodic coefficients need at least two full years");

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + csi.values[i];

    constexpr std::size_t half = kSlotsPerYear / 2;
    std::vector<double> sum(kSlotsPerYear, 0.0);
    std::vector<std::size_t> count(kSlotsPerYear, 0);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t w = std::min({half, t, n - 1 - t});
        const double mm = (prefix[t + w + 1] - prefix[t - w]) / static_cast<double>(2 * w + 1);
        if (!(mm > 0.0))
            throw Error("zero_trend", "moving average vanishes at sample " + std::to_string(t));
        sum[csi.slots[t]] += csi.values[t] / mm;
        ++count[csi.slots[t]];
    }
    std::vector<double> pc(kSlotsPerYear);
    for (std::size_t k = 0; k < kSlotsPerYear; ++k) {
        if (count[k] == 0)
            throw Error("insufficient_data", "slot " + std::to_string(k) + " has no samples");
        pc[k] = sum[k] / static_cast<double>(count[k]);
    }
    return pc;
}

StationarizedSeries to_csi_pc(const StationarizedSeries& csi, std::span<const double> pc) {
    if (csi.method != Method::CSI) throw Error("bad_method", "CSI_PC is built on a CSI series");
    if (pc.size() != kSlotsPerYear)
        throw Error("bad_coefficients", "expected " + std::to_string(kSlotsPerYear) + " periodic coefficients");
    for (std::size_t k = 0; k < pc.size(); ++k)
        if (!(pc[k] > 0.0))
            throw Error("bad_coefficients", "periodic coefficient " + std::to_string(k) + " is not positive");
    StationarizedSeries out = csi;
    out.method = Method::CSI_PC;
    out.periodic_coefficients.assign(pc.begin(), pc.end());
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = csi.values[i] / pc[csi.slots[i]];
    return out;
}

StationarizedSeries stationarize(const HourlySeries& series, const StationMeta& meta, Method method,
                                 std::span<const double> pc) {
    switch (method) {
        case Method::None: return to_raw(series, meta);
        case Method::CI: return to_clearness_index(series, meta);
        case Method::CSI: return to_clearsky_index(series, meta);
        case Method::CSI_PC: {
            auto csi = to_clearsky_index(series, meta);
            if (pc.empty()) {
                const auto own = periodic_coefficients(csi);
                return to_csi_pc(csi, own);
            }
            return to_csi_pc(csi, pc);
        }
    }
    throw Error("bad_method", "unknown stationarization method");
}

Destationarized destationarize(const StationarizedSeries& s, std::span<const double> predictions) {
    if (predictions.size() != s.size())
        throw Error("slot_misalignment", "got " + std::to_string(predictions.size()) +
                                             " predictions for " + std::to_string(s.size()) + " slots");
    Destationarized out;
    out.values.resize(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double v = predictions[i] * s.scale(i);
        if (v < 0.0) {
            out.values[i] = 0.0;
            ++out.clamped;
        } else {
            out.values[i] = v;
        }
    }
    return out;
}

void write_coefficients(std::ostream& out, std::span<const double> pc) {
    std::string text = "slot,coefficient\n";
    char buf[64];
    for (std::size_t k = 0; k < pc.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, pc[k]);
        text += buf;
    }
    out << text;
}

std::vector<double> read_coefficients(std::istream& in) {
    std::string line;
    std::getline(in, line);
    if (line.rfind("slot,coefficient", 0) != 0)
        throw Error("bad_coefficients", "periodic coefficient file lacks its header");
    std::vector<double> pc;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("bad_coefficients", "malformed coefficient row");
        const auto slot = std::stoul(line.substr(0, comma));
        if (slot != pc.size()) throw Error("bad_coefficients", "coefficient rows out of order");
        pc.push_back(std::stod(line.substr(comma + 1)));
    }
    if (pc.size() != kSlotsPerYear)
        throw Error("bad_coefficients", "expected " + std::to_string(kSlotsPerYear) + " coefficient rows");
    return pc;
}

std::vector<double> load_coefficients(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing_file", "cannot open " + path.string());
    return read_coefficients(in);
}

}  // namespace solarcast::stationarity
