#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solarcast/series.hpp"
#include "solarcast/station.hpp"

namespace solarcast::stationarity {

enum class Method { None, CI, CSI, CSI_PC };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// Daytime hours per day and daytime slots per 365-day year.
inline constexpr std::size_t kDaytimeHours = 9;
inline constexpr std::size_t kSlotsPerYear = 365 * kDaytimeHours;  // 3285

/// Slot of a daytime sample within the year: (day - 1) · 9 + (solar hour - 8),
/// with February 29 collapsed out.
std::size_t calendar_slot(const StationMeta& meta, Timestamp ts);

/// Forecasting happens on `values`; `values[i] · denominators[i]` (times the
/// periodic coefficient of `slots[i]` for CSI_PC) gives Wh/m² back.
struct StationarizedSeries {
    Method method = Method::None;
    std::vector<double> values;
    std::vector<double> denominators;  ///< 1, H0 or clear-sky GHI, Wh/m²
    std::vector<std::size_t> slots;
    std::vector<double> periodic_coefficients;  ///< kSlotsPerYear entries for CSI_PC

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    /// Full multiplier from index space to Wh/m² at sample i.
    [[nodiscard]] double scale(std::size_t i) const;
};

/// Identity transform; keeps slot bookkeeping so all methods share one path.
StationarizedSeries to_raw(const HourlySeries& series, const StationMeta& meta);
StationarizedSeries to_clearness_index(const HourlySeries& series, const StationMeta& meta);
StationarizedSeries to_clearsky_index(const HourlySeries& series, const StationMeta& meta);

/// Multiplicative seasonal coefficients of a CSI series: centred moving average
/// over one year of daytime slots (window shrinks symmetrically at the edges),
/// ratio to that trend, then the per-slot mean of the ratio across years.
std::vector<double> periodic_coefficients(const StationarizedSeries& csi);

/// Divides each value by the coefficient of its slot.
StationarizedSeries to_csi_pc(const StationarizedSeries& csi, std::span<const double> pc);

/// Dispatches on `method`. CSI_PC uses `pc` when given, otherwise computes it
/// from the series itself.
StationarizedSeries stationarize(const HourlySeries& series, const StationMeta& meta, Method method,
                                 std::span<const double> pc = {});

struct Destationarized {
    std::vector<double> values;  ///< Wh/m²
    std::size_t clamped = 0;     ///< negative results set to zero
};

/// Maps index-space predictions aligned with `s` back to Wh/m².
Destationarized destationarize(const StationarizedSeries& s, std::span<const double> predictions);

void write_coefficients(std::ostream& out, std::span<const double> pc);
std::vector<double> read_coefficients(std::istream& in);
std::vector<double> load_coefficients(const std::filesystem::path& path);

}  // namespace solarcast::stationarity
