#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solarcast/time.hpp"

namespace solarcast {

/// Hourly station record. Missing radiation is NaN until repaired.
/// Optional channels are either absent or exactly as long as `timestamps`.
struct HourlySeries {
    std::string station_id;
    std::vector<Timestamp> timestamps;
    std::vector<double> radiation;  ///< Wh/m² over the hour
    std::optional<std::vector<double>> pressure;           ///< Pa
    std::optional<std::vector<double>> pressure_gradient;  ///< Pa, hour h minus hour h-1
    std::optional<std::vector<double>> cloudiness;         ///< octas
    std::optional<std::vector<double>> precipitation;      ///< mm
    std::vector<std::uint8_t> repaired;  ///< 1 where radiation was filled in

    [[nodiscard]] std::size_t size() const noexcept { return timestamps.size(); }
    [[nodiscard]] bool empty() const noexcept { return timestamps.empty(); }
    [[nodiscard]] std::size_t repaired_count() const noexcept;
    [[nodiscard]] double repaired_fraction() const noexcept;
    [[nodiscard]] std::size_t missing_count() const noexcept;

    /// Copy of samples [begin, end).
    [[nodiscard]] HourlySeries slice(std::size_t begin, std::size_t end) const;
    /// Copy of the samples at `indices`, in the given order.
    [[nodiscard]] HourlySeries select(std::span<const std::size_t> indices) const;
    /// Appends `other` (same channel layout) after this series.
    void append(const HourlySeries& other);
};

/// Exogenous inputs in raw units; never stationarized.
struct ExogenousChannels {
    std::optional<std::vector<double>> cloudiness;
    std::optional<std::vector<double>> pressure;
    std::optional<std::vector<double>> precipitation;

    static ExogenousChannels from(const HourlySeries& series);
    [[nodiscard]] ExogenousChannels slice(std::size_t begin, std::size_t end) const;
    [[nodiscard]] ExogenousChannels select(std::span<const std::size_t> indices) const;
};

}  // namespace solarcast
