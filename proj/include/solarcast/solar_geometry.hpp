#pragma once

#include <chrono>
#include <cstddef>

#include "solarcast/series.hpp"
#include "solarcast/station.hpp"
#include "solarcast/time.hpp"

namespace solarcast::solar {

/// Sun position for one site and instant.
struct SolarInstant {
    double declination = 0.0;   ///< rad
    double hour_angle = 0.0;    ///< rad, zero at true solar noon, negative mornings
    double eccentricity = 1.0;  ///< (r0/r)^2
    double sin_elevation = 0.0;

    [[nodiscard]] double elevation() const;
};

/// Spencer (1971) Fourier series, day angle in radians.
double declination(double day_angle);
double eccentricity(double day_angle);
double equation_of_time_minutes(double day_angle);

/// Day angle 2π(n - 1 + (hour - 12)/24)/365 for the UTC instant.
double day_angle(Timestamp ts);

/// True solar time in hours since local true-solar midnight of the UTC day,
/// i.e. UTC hour + longitude/15 + equation of time. May fall outside [0, 24).
double true_solar_hours(const StationMeta& meta, Timestamp ts);

SolarInstant solar_instant(const StationMeta& meta, Timestamp ts);

/// A sample's position on the true-solar clock: the solar calendar day and the
/// nearest whole true-solar hour.
struct SolarHour {
    std::chrono::sys_days date;
    int hour = 0;
};

SolarHour solar_hour_of(const StationMeta& meta, Timestamp ts);

/// Shifts `ts` by at most ±30 min so it lands on its whole true-solar hour.
/// Hourly samples are evaluated there, which keeps the 8:00 and 16:00 slots at
/// hour angles of exactly ∓60°.
Timestamp snap_to_solar_hour(const StationMeta& meta, Timestamp ts);

/// solar_instant at the snapped time; the geometry every daytime sample uses.
SolarInstant sample_instant(const StationMeta& meta, Timestamp ts);

/// H0 = I_SC · E0 · (sin δ sin ϕ + cos δ cos ϕ cos ω). Throws
/// Error("non_daytime_sample") when the sun is at or below the horizon.
double extraterrestrial(const StationMeta& meta, const SolarInstant& instant);

/// H0 · exp(-τ / sin^b h) · sin h. Requires fitted τ and b.
double clearsky_ghi(const StationMeta& meta, const SolarInstant& instant);
double clearsky_ghi(double h0, double sin_elevation, double tau, double b);

struct SolisFit {
    double tau = 0.0;
    double b = 1.0;
    std::size_t envelope_points = 0;
    double rmse = 0.0;  ///< Wh/m², against the envelope
};

/// Least-squares fit of the clear-sky curve to the upper envelope of the
/// observations (per day-of-year and solar hour maximum across years).
/// Expects a daytime-filtered series covering at least one year.
SolisFit fit_solis(const HourlySeries& series, const StationMeta& meta);

}  // namespace solarcast::solar
