#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "solarcast/series.hpp"
#include "solarcast/station.hpp"

namespace solarcast::ingest {

/// Header names for each channel. Only timestamp and radiation are mandatory.
struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string radiation = "ghi_whm2";
    std::string pressure = "pressure_pa";
    std::string cloudiness = "cloud_octas";
    std::string precipitation = "precip_mm";
};

/// Parses a header-row CSV. Empty cells and `NaN` mark missing values.
/// Errors carry the 1-based file line number.
HourlySeries parse_csv(std::istream& in, const ColumnMap& columns = {}, std::string station_id = "station");
HourlySeries load_csv(const std::filesystem::path& path, const ColumnMap& columns = {});
void write_csv(std::ostream& out, const HourlySeries& series);

struct RepairResult {
    HourlySeries series;
    std::size_t repaired = 0;  ///< radiation samples filled in by this call
    double fraction = 0.0;     ///< total repaired fraction of the series
    bool exceeds_ceiling = false;
};

/// Default ceiling on the fraction of repaired radiation samples.
inline constexpr double kDefaultMaxMissingFraction = 0.04;

/// Fills each missing value with the mean of the non-missing values sharing
/// its UTC hour of day. Exogenous channels are filled the same way. Exceeding
/// `max_missing_fraction` only sets `exceeds_ceiling`.
RepairResult repair_missing(const HourlySeries& series,
                            double max_missing_fraction = kDefaultMaxMissingFraction);

struct DaytimeOptions {
    int first_hour = 8;   ///< true solar time, inclusive
    int last_hour = 16;   ///< true solar time, inclusive
    bool drop_leap_day = true;
};

/// Keeps the samples whose nearest whole true-solar hour lies in the window.
/// Every retained solar day must contribute the full window; kept samples stay
/// contiguous, so the last hour of a day is followed directly by the first
/// hour of the next.
HourlySeries daytime_filter(const HourlySeries& series, const StationMeta& meta,
                            const DaytimeOptions& options = {});

struct SplitSpec {
    double train = 0.72;
    double validation = 0.08;
    double test = 0.20;
};

struct Split {
    HourlySeries train;
    HourlySeries validation;
    HourlySeries test;
};

/// Chronological partition. Block ends are floor(n·train) and
/// floor(n·(train + validation)); the test block takes the rest.
Split split(const HourlySeries& series, const SplitSpec& spec);

/// End offsets of the train and validation blocks used by `split`.
std::pair<std::size_t, std::size_t> split_bounds(std::size_t n, const SplitSpec& spec);

}  // namespace solarcast::ingest
