#include "solarcast/solar_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "solarcast/error.hpp"

namespace solarcast {

using namespace std::chrono;

StationMeta StationMeta::from_degrees(std::string id, double latitude_deg, double longitude_deg,
                                      double altitude_m) {
    constexpr double deg = std::numbers::pi / 180.0;
    StationMeta m;
    m.id = std::move(id);
    m.latitude = latitude_deg * deg;
    m.longitude = longitude_deg * deg;
    m.altitude = altitude_m;
    return m;
}

void StationMeta::validate() const {
    if (!(std::abs(latitude) < std::numbers::pi / 2))
        throw Error("invalid_station", "latitude must lie strictly between the poles");
    if (!(solar_constant > 0)) throw Error("invalid_station", "solar constant must be positive");
    if (tau && !(*tau >= 0)) throw Error("invalid_station", "tau must be non-negative");
    if (b && !(*b > 0)) throw Error("invalid_station", "b must be positive");
}

StationMeta read_station(std::istream& in) {
    constexpr double deg = std::numbers::pi / 180.0;
    StationMeta m;
    bool have_lat = false, have_lon = false;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto z = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, z - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "id") m.id = value;
            else if (key == "latitude_deg") { m.latitude = std::stod(value) * deg; have_lat = true; }
            else if (key == "longitude_deg") { m.longitude = std::stod(value) * deg; have_lon = true; }
            else if (key == "altitude_m") m.altitude = std::stod(value);
            else if (key == "solar_constant") m.solar_constant = std::stod(value);
            else if (key == "tau") m.tau = std::stod(value);
            else if (key == "b") m.b = std::stod(value);
            else throw Error("invalid_station", "unknown station key '" + key + "'");
        } catch (const std::logic_error&) {
            throw Error("invalid_station", "bad value for station key '" + key + "'");
        }
    }
    if (!have_lat || !have_lon)
        throw Error("invalid_station", "station record needs latitude_deg and longitude_deg");
    m.validate();
    return m;
}

StationMeta load_station(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing_file", "cannot open station file " + path.string());
    return read_station(in);
}

void write_station(std::ostream& out, const StationMeta& meta) {
    constexpr double deg = 180.0 / std::numbers::pi;
    std::ostringstream s;
    s.precision(17);
    s << "id = " << meta.id << '\n'
      << "latitude_deg = " << meta.latitude * deg << '\n'
      << "longitude_deg = " << meta.longitude * deg << '\n'
      << "altitude_m = " << meta.altitude << '\n'
      << "solar_constant = " << meta.solar_constant << '\n';
    if (meta.tau) s << "tau = " << *meta.tau << '\n';
    if (meta.b) s << "b = " << *meta.b << '\n';
    out << s.str();
}

}  // namespace solarcast

namespace solarcast::solar {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kMaxDeclination = 0.4093;

double utc_hours(Timestamp ts) {
    return duration<double, std::ratio<3600>>(ts - floor<days>(ts)).count();
}
}  // namespace

double SolarInstant::elevation() const { return std::asin(std::clamp(sin_elevation, -1.0, 1.0)); }

// Spencer series, clamped to the obliquity it overshoots by ~1e-4 rad near the solstices.
double declination(double g) {
    const double d = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) - 0.006758 * std::cos(2 * g) +
                     0.000907 * std::sin(2 * g) - 0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
    return std::clamp(d, -kMaxDeclination, kMaxDeclination);
}

double eccentricity(double g) {
    return 1.000110 + 0.034221 * std::cos(g) + 0.001280 * std::sin(g) + 0.000719 * std::cos(2 * g) +
           0.000077 * std::sin(2 * g);
}

double equation_of_time_minutes(double g) {
    return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                     0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
}

double day_angle(Timestamp ts) {
    const int n = day_of_year(floor<days>(ts));
    return 2.0 * kPi * (n - 1 + (utc_hours(ts) - 12.0) / 24.0) / 365.0;
}

double true_solar_hours(const StationMeta& meta, Timestamp ts) {
    const double lon_deg = meta.longitude / kDeg;
    return utc_hours(ts) + lon_deg / 15.0 + equation_of_time_minutes(day_angle(ts)) / 60.0;
}

SolarInstant solar_instant(const StationMeta& meta, Timestamp ts) {
    const double g = day_angle(ts);
    SolarInstant s;
    s.declination = declination(g);
    s.eccentricity = eccentricity(g);
    s.hour_angle = (true_solar_hours(meta, ts) - 12.0) * 15.0 * kDeg;
    s.sin_elevation = std::sin(s.declination) * std::sin(meta.latitude) +
                      std::cos(s.declination) * std::cos(meta.latitude) * std::cos(s.hour_angle);
    return s;
}

namespace {

// Longitude plus equation-of-time offset, held fixed over each local mean
// solar day so hourly samples never skip or repeat a whole solar hour.
double daily_offset_hours(const StationMeta& meta, Timestamp ts) {
    const double lon_h = meta.longitude / kDeg / 15.0;
    const seconds lon_s{std::lround(lon_h * 3600.0)};
    const sys_days local_day = floor<days>(ts + lon_s);
    const Timestamp local_noon = local_day + hours{12} - lon_s;
    return lon_h + equation_of_time_minutes(day_angle(local_noon)) / 60.0;
}

}  // namespace

SolarHour solar_hour_of(const StationMeta& meta, Timestamp ts) {
    const double tst = utc_hours(ts) + daily_offset_hours(meta, ts);
    SolarHour out{floor<days>(ts), static_cast<int>(std::lround(tst))};
    while (out.hour < 0) {
        out.hour += 24;
        out.date -= days{1};
    }
    while (out.hour >= 24) {
        out.hour -= 24;
        out.date += days{1};
    }
    return out;
}

Timestamp snap_to_solar_hour(const StationMeta& meta, Timestamp ts) {
    const double tst = utc_hours(ts) + daily_offset_hours(meta, ts);
    const double shift_s = (std::round(tst) - tst) * 3600.0;
    return ts + seconds{std::lround(shift_s)};
}

SolarInstant sample_instant(const StationMeta& meta, Timestamp ts) {
    return solar_instant(meta, snap_to_solar_hour(meta, ts));
}

double extraterrestrial(const StationMeta& meta, const SolarInstant& instant) {
    if (!(instant.sin_elevation > 0.0))
        throw Error("non_daytime_sample", "sun at or below the horizon");
    return meta.solar_constant * instant.eccentricity * instant.sin_elevation;
}

double clearsky_ghi(double h0, double sin_elevation, double tau, double b) {
    return h0 * std::exp(-tau / std::pow(sin_elevation, b)) * sin_elevation;
}

double clearsky_ghi(const StationMeta& meta, const SolarInstant& instant) {
    if (!meta.has_clearsky())
        throw Error("clearsky_unfitted", "station has no fitted clear-sky parameters");
    const double h0 = extraterrestrial(meta, instant);
    return clearsky_ghi(h0, instant.sin_elevation, *meta.tau, *meta.b);
}

namespace {

struct EnvelopePoint {
    double amplitude;  // H0 · sin h
    double sin_h;
    double observed;
};

double sse(const std::vector<EnvelopePoint>& pts, double tau, double b) {
    double s = 0.0;
    for (const auto& p : pts) {
        const double r = p.amplitude * std::exp(-tau / std::pow(p.sin_h, b)) - p.observed;
        s += r * r;
    }
    return s;
}

}  // namespace

SolisFit fit_solis(const HourlySeries& series, const StationMeta& meta) {
    if (series.empty()) throw Error("insufficient_data", "fit_solis needs at least one year of data");
    if (series.timestamps.back() - series.timestamps.front() < days{364})
        throw Error("insufficient_data", "fit_solis needs at least one year of data");

    // Envelope: max over years for each (day of year, solar hour).
    constexpr std::size_t kKeys = 365 * 24;
    std::vector<double> best(kKeys, -std::numeric_limits<double>::infinity());
    std::vector<Timestamp> where(kKeys);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double x = series.radiation[i];
        if (!std::isfinite(x)) continue;
        const SolarHour sh = solar_hour_of(meta, series.timestamps[i]);
        if (is_leap_day(sh.date)) continue;
        const std::size_t key = static_cast<std::size_t>(day_of_year_noleap(sh.date) - 1) * 24 +
                                static_cast<std::size_t>(sh.hour);
        if (x > best[key]) {
            best[key] = x;
            where[key] = series.timestamps[i];
        }
    }

    std::vector<EnvelopePoint> pts;
    bool any_positive = false;
    for (std::size_t k = 0; k < kKeys; ++k) {
        if (!std::isfinite(best[k])) continue;
        const SolarInstant s = sample_instant(meta, where[k]);
        if (!(s.sin_elevation > 0.0)) continue;
        const double h0 = meta.solar_constant * s.eccentricity * s.sin_elevation;
        pts.push_back({h0 * s.sin_elevation, s.sin_elevation, best[k]});
        any_positive = any_positive || best[k] > 0.0;
    }
    if (pts.empty() || !any_positive)
        throw Error("degenerate_envelope", "radiation envelope is identically zero");

    // Starting point: log-linearisation  ln(-ln(X/A)) = ln τ - b ln(sin h),
    // compared against a coarse grid.
    double tau = 0.1, b = 1.0;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (const auto& p : pts) {
            const double r = p.observed / p.amplitude;
            if (!(r > 0.0 && r < 1.0)) continue;
            const double y = -std::log(r);
            if (!(y > 1e-9)) continue;
            const double lx = std::log(p.sin_h);
            const double ly = std::log(y);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
        const double den = static_cast<double>(n) * sxx - sx * sx;
        if (n >= 2 && den > 1e-12) {
            const double slope = (static_cast<double>(n) * sxy - sx * sy) / den;
            const double icpt = (sy - slope * sx) / static_cast<double>(n);
            tau = std::exp(icpt);
            b = std::clamp(-slope, 0.05, 10.0);
        } else if (n == 0) {
            tau = 0.0;
        }
        double best_sse = sse(pts, tau, b);
        for (double t0 : {0.0, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
            for (double b0 : {0.5, 1.0, 1.5, 2.0}) {
                const double s = sse(pts, t0, b0);
                if (s < best_sse) {
                    best_sse = s;
                    tau = t0;
                    b = b0;
                }
            }
        }
    }

    // Levenberg-Marquardt on the two parameters, τ kept non-negative.
    double cost = sse(pts, tau, b);
    double lambda = 1e-3;
    for (int iter = 0; iter < 500 && cost > 0.0; ++iter) {
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (const auto& p : pts) {
            const double sb = std::pow(p.sin_h, -b);
            const double f = p.amplitude * std::exp(-tau * sb);
            const double r = f - p.observed;
            const double d_tau = -f * sb;
            const double d_b = f * tau * sb * std::log(p.sin_h);
            a11 += d_tau * d_tau; a12 += d_tau * d_b; a22 += d_b * d_b;
            g1 += d_tau * r; g2 += d_b * r;
        }
        bool accepted = false;
        while (lambda < 1e12) {
            const double floor_d = 1e-12 * (a11 + a22) + 1e-300;
            const double m11 = a11 + lambda * (a11 + floor_d);
            const double m22 = a22 + lambda * (a22 + floor_d);
            const double det = m11 * m22 - a12 * a12;
            if (!(std::abs(det) > 0)) {
                lambda *= 10;
                continue;
            }
            const double dt = -(m22 * g1 - a12 * g2) / det;
            const double db = -(m11 * g2 - a12 * g1) / det;
            const double nt = std::max(0.0, tau + dt);
            const double nb = std::clamp(b + db, 1e-3, 20.0);
            const double nc = sse(pts, nt, nb);
            if (nc < cost) {
                const double rel = (cost - nc) / cost;
                tau = nt;
                b = nb;
                cost = nc;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = rel > 1e-15;
                break;
            }
            lambda *= 10;
        }
        if (!accepted) break;
    }

    SolisFit fit;
    fit.tau = tau;
    fit.b = b;
    fit.envelope_points = pts.size();
    fit.rmse = std::sqrt(cost / static_cast<double>(pts.size()));
    return fit;
}

}  // namespace solarcast::solar
