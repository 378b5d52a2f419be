#include "solarcast/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include "solarcast/config.hpp"
#include "solarcast/error.hpp"
#include "solarcast/ingest.hpp"
#include "solarcast/solar_geometry.hpp"

namespace solarcast::synth {

namespace chr = std::chrono;

void Scenario::validate() const {
    if (!(std::abs(phi) < 1.0)) throw Error("unstable_process", "hourly AR coefficient must satisfy |phi| < 1");
    if (!(std::abs(weather_phi) < 1.0))
        throw Error("unstable_process", "weather AR coefficient must satisfy |phi| < 1");
    if (sigma_summer < 0 || sigma_winter < 0 || weather_sigma < 0 || cloud_noise < 0 || pressure_noise < 0 ||
        lead_strength < 0)
        throw Error("bad_scenario", "scales must be non-negative");
    if (!(missing_fraction >= 0 && missing_fraction < 1))
        throw Error("bad_scenario", "missing_fraction must lie in [0, 1)");
    if (years < 1) throw Error("bad_scenario", "at least one year is required");
    if (tau < 0 || !(b > 0)) throw Error("bad_scenario", "tau must be >= 0 and b > 0");
    station.validate();
}

StationMeta Scenario::truth() const {
    StationMeta m = station;
    m.tau = tau;
    m.b = b;
    return m;
}

HourlySeries generate(const Scenario& sc) {
    sc.validate();
    const StationMeta meta = sc.truth();
    std::mt19937_64 rng(sc.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Timestamp begin = make_timestamp(sc.start_year, 1, 1, 0);
    const Timestamp end = make_timestamp(sc.start_year + sc.years, 1, 1, 0);
    const auto hours = static_cast<std::size_t>(chr::duration_cast<chr::hours>(end - begin).count());

    HourlySeries s;
    s.station_id = meta.id;
    s.timestamps.reserve(hours);
    s.radiation.reserve(hours);
    std::vector<double> pressure, cloud, precip;
    if (sc.exogenous) {
        pressure.reserve(hours);
        cloud.reserve(hours);
        precip.reserve(hours);
    }

    const double weather_innov = sc.weather_sigma * std::sqrt(1.0 - sc.weather_phi * sc.weather_phi);
    const double mean_level = 0.5 * (sc.mean_summer + sc.mean_winter);
    double weather = 0.0, d = 0.0;
    double next_eps = gauss(rng);
    std::optional<chr::sys_days> day;

    for (std::size_t i = 0; i < hours; ++i) {
        const Timestamp ts = begin + chr::hours(static_cast<long>(i));
        const auto sh = solar::solar_hour_of(meta, ts);
        if (!day || sh.date != *day) {
            day = sh.date;
            weather = sc.weather_phi * weather + weather_innov * gauss(rng);
        }
        // 1 at mid-July, 0 at mid-January.
        const double doy = static_cast<double>(day_of_year(sh.date));
        const double w = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (doy - 196.0) / 365.25));
        const double sigma = sc.sigma_summer * w + sc.sigma_winter * (1.0 - w);
        const double mu = sc.mean_summer * w + sc.mean_winter * (1.0 - w);

        const bool window = sh.hour >= 8 && sh.hour <= 16 && !is_leap_day(sh.date);
        double lead = 0.0;
        if (window) {
            const double eps = next_eps;
            next_eps = gauss(rng);
            d = sc.phi * d + sigma * eps;
            lead = sigma * next_eps;
        }
        const double k = std::clamp(mu + weather + d, 1e-3, 1.1);

        const auto inst = solar::sample_instant(meta, ts);
        double x = inst.sin_elevation > 0.0 ? k * solar::clearsky_ghi(meta, inst) : 0.0;
        if (sc.missing_fraction > 0.0 && unit(rng) < sc.missing_fraction) x = std::nan("");

        s.timestamps.push_back(ts);
        s.radiation.push_back(x);
        if (sc.exogenous) {
            const double octas = 8.0 * (1.05 - k) / 0.95 + sc.cloud_noise * gauss(rng);
            cloud.push_back(std::clamp(std::round(octas), 0.0, 8.0));
            pressure.push_back(101300.0 + 500.0 * (k - mean_level) + 500.0 * sc.lead_strength * lead +
                               sc.pressure_noise * gauss(rng));
            precip.push_back(std::max(0.0, std::round(10.0 * (3.0 * (0.45 - k) + 0.3 * gauss(rng))) / 10.0));
        }
    }
    if (sc.exogenous) {
        s.cloudiness = std::move(cloud);
        s.pressure = std::move(pressure);
        s.precipitation = std::move(precip);
    }
    s.repaired.assign(s.size(), 0);
    return s;
}

Scenario read_scenario(std::istream& in) {
    const auto kv = KeyValues::parse(in);
    kv.require_known({"station_id", "latitude_deg", "longitude_deg", "altitude_m", "solar_constant", "tau", "b",
                      "start_year", "years", "phi", "sigma_summer", "sigma_winter", "mean_summer", "mean_winter",
                      "weather_phi", "weather_sigma", "lead_strength", "cloud_noise", "pressure_noise",
                      "missing_fraction", "exogenous", "seed"});
    Scenario sc;
    constexpr double kDeg = std::numbers::pi / 180.0;
    sc.station = StationMeta::from_degrees(kv.text("station_id", sc.station.id),
                                           kv.number("latitude_deg", sc.station.latitude / kDeg),
                                           kv.number("longitude_deg", sc.station.longitude / kDeg),
                                           kv.number("altitude_m", sc.station.altitude));
    sc.station.solar_constant = kv.number("solar_constant", sc.station.solar_constant);
    sc.tau = kv.number("tau", sc.tau);
    sc.b = kv.number("b", sc.b);
    sc.start_year = static_cast<int>(kv.integer("start_year", sc.start_year));
    sc.years = static_cast<int>(kv.integer("years", sc.years));
    sc.phi = kv.number("phi", sc.phi);
    sc.sigma_summer = kv.number("sigma_summer", sc.sigma_summer);
    sc.sigma_winter = kv.number("sigma_winter", sc.sigma_winter);
    sc.mean_summer = kv.number("mean_summer", sc.mean_summer);
    sc.mean_winter = kv.number("mean_winter", sc.mean_winter);
    sc.weather_phi = kv.number("weather_phi", sc.weather_phi);
    sc.weather_sigma = kv.number("weather_sigma", sc.weather_sigma);
    sc.lead_strength = kv.number("lead_strength", sc.lead_strength);
    sc.cloud_noise = kv.number("cloud_noise", sc.cloud_noise);
    sc.pressure_noise = kv.number("pressure_noise", sc.pressure_noise);
    sc.missing_fraction = kv.number("missing_fraction", sc.missing_fraction);
    sc.exogenous = kv.flag("exogenous", sc.exogenous);
    sc.seed = kv.unsigned_integer("seed", sc.seed);
    return sc;
}

void write_scenario(std::ostream& out, const Scenario& sc) {
    constexpr double kDeg = std::numbers::pi / 180.0;
    char buf[128];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.10g\n", key, v);
        out << buf;
    };
    out << "station_id = " << sc.station.id << '\n';
    put("latitude_deg", sc.station.latitude / kDeg);
    put("longitude_deg", sc.station.longitude / kDeg);
    put("altitude_m", sc.station.altitude);
    put("solar_constant", sc.station.solar_constant);
    put("tau", sc.tau);
    put("b", sc.b);
    out << "start_year = " << sc.start_year << '\n' << "years = " << sc.years << '\n';
    put("phi", sc.phi);
    put("sigma_summer", sc.sigma_summer);
    put("sigma_winter", sc.sigma_winter);
    put("mean_summer", sc.mean_summer);
    put("mean_winter", sc.mean_winter);
    put("weather_phi", sc.weather_phi);
    put("weather_sigma", sc.weather_sigma);
    put("lead_strength", sc.lead_strength);
    put("cloud_noise", sc.cloud_noise);
    put("pressure_noise", sc.pressure_noise);
    put("missing_fraction", sc.missing_fraction);
    out << "exogenous = " << (sc.exogenous ? "true" : "false") << '\n' << "seed = " << sc.seed << '\n';
}

void write_bundle(const std::filesystem::path& dir, const Scenario& sc) {
    const auto series = generate(sc);
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw Error("io_error", "cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("data.csv");
        ingest::write_csv(f, series);
    }
    {
        auto f = open("station.txt");
        write_station(f, sc.station);
    }
    {
        auto f = open("truth.txt");
        write_station(f, sc.truth());
    }
    {
        auto f = open("scenario.txt");
        write_scenario(f, sc);
    }
}

}  // namespace solarcast::synth
