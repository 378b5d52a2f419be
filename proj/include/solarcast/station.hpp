#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace solarcast {

/// Site description plus the simplified Solis clear-sky parameters.
/// Angles are stored in radians.
struct StationMeta {
    std::string id = "station";
    double latitude = 0.0;
    double longitude = 0.0;  ///< east positive
    double altitude = 0.0;   ///< metres
    double solar_constant = 1367.0;  ///< Wh/m²
    std::optional<double> tau;       ///< atmospheric optical depth
    std::optional<double> b;         ///< Solis fitting exponent

    static StationMeta from_degrees(std::string id, double latitude_deg, double longitude_deg,
                                    double altitude_m = 0.0);

    [[nodiscard]] bool has_clearsky() const noexcept { return tau.has_value() && b.has_value(); }

    /// Throws Error("invalid_station") when an invariant is broken.
    void validate() const;
};

/// Key-value station record: id, latitude_deg, longitude_deg, altitude_m,
/// and optionally solar_constant, tau, b.
StationMeta read_station(std::istream& in);
StationMeta load_station(const std::filesystem::path& path);
void write_station(std::ostream& out, const StationMeta& meta);

}  // namespace solarcast
