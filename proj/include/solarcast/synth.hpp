#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "solarcast/series.hpp"
#include "solarcast/station.hpp"

namespace solarcast::synth {

/// Hourly radiation = clear-sky model × occlusion index k, with
/// k = clamp(μ(day) + d, (0, 1.1]) and d an AR(1) process over the daytime
/// window samples. The innovation scale and mean move smoothly between
/// their summer and winter values over the year. A day-level weather state
/// (AR(1) across days) shifts μ; exogenous channels are generated from k,
/// the weather state and the next innovation.
struct Scenario {
    StationMeta station = StationMeta::from_degrees("synthetic", 41.9, 8.7, 4.0);
    double tau = 0.2;
    double b = 0.8;
    int start_year = 2001;
    int years = 3;

    double phi = 0.5435;          ///< hourly AR(1) coefficient of d
    double sigma_summer = 0.06;   ///< innovation standard deviation
    double sigma_winter = 0.18;
    double mean_summer = 0.80;
    double mean_winter = 0.65;
    double weather_phi = 0.6;     ///< day-to-day persistence of the weather state
    double weather_sigma = 0.08;  ///< its stationary standard deviation

    double lead_strength = 0.5;   ///< share of the next innovation visible in pressure
    double cloud_noise = 0.5;     ///< octas
    double pressure_noise = 80.0; ///< Pa
    double missing_fraction = 0.0;
    bool exogenous = true;
    std::uint64_t seed = 1;

    /// Throws Error("unstable_process") for |φ| ≥ 1 and Error("bad_scenario")
    /// for negative scales or fractions outside [0, 1).
    void validate() const;
    /// Station with the generating τ and b filled in.
    [[nodiscard]] StationMeta truth() const;
};

HourlySeries generate(const Scenario& scenario);

/// Key-value scenario file; unknown keys are rejected.
Scenario read_scenario(std::istream& in);
void write_scenario(std::ostream& out, const Scenario& scenario);

/// Writes data.csv, station.txt (no τ/b), truth.txt and scenario.txt.
void write_bundle(const std::filesystem::path& dir, const Scenario& scenario);

}  // namespace solarcast::synth
