#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solarcast/hybrid.hpp"
#include "solarcast/station.hpp"
#include "solarcast/time.hpp"

namespace solarcast::eval {

/// √(⟨(x − y)²⟩ / ⟨x²⟩)
double nrmse(std::span<const double> measured, std::span<const double> predicted);

/// Population standard deviation over the mean.
double coefficient_of_variation(std::span<const double> values);

// Baselines, all in Wh/m².

/// Measured value one sample before `target`.
double persistence_forecast(std::span<const double> measured, std::size_t target);

/// Clear-sky model at the target sample.
double clearsky_forecast(const StationMeta& meta, Timestamp target);

/// Per-slot mean with per-slot sample counts.
struct Climatology {
    std::vector<double> mean;
    std::vector<std::size_t> count;

    /// Throws Error("missing_climatology_slot") for a slot without samples.
    [[nodiscard]] double at(std::size_t slot) const;
    /// Mean for the slot, or `fallback` when the slot has no samples.
    [[nodiscard]] double at_or(std::size_t slot, double fallback) const noexcept;
};

/// Samples with NaN values are skipped.
Climatology slot_climatology(std::span<const double> values, std::span<const std::size_t> slots,
                             std::size_t slot_count);

double average_forecast(const Climatology& training, std::size_t slot);

/// nRMSE over all samples and per season (NaN for a season without samples).
struct Scores {
    std::string name;
    double annual = 0.0;
    std::array<double, hybrid::kSeasonCount> seasonal{};
    std::size_t samples = 0;
};

Scores score(std::string name, std::span<const double> measured, std::span<const double> predicted,
             std::span<const hybrid::Season> seasons);

// Ranking.

struct NrmseEntry {
    std::string station;
    hybrid::Season season = hybrid::Season::Winter;
    std::string predictor;
    double nrmse = 0.0;
};

enum class TiePolicy {
    NameOrder,  ///< equal scores ranked by predictor name, every rank used once
    Shared      ///< equal scores share the better rank (1, 2, 2, 4, ...)
};
TiePolicy parse_tie_policy(std::string_view text);
std::string_view to_string(TiePolicy p);

struct Ranking {
    std::vector<std::string> predictors;  ///< sorted by name
    std::vector<std::string> stations;    ///< sorted by name
    /// points[season][predictor], summed over stations.
    std::array<std::vector<int>, hybrid::kSeasonCount> points;
    /// places[season][predictor], 1 = fewest points; equal totals share a place.
    std::array<std::vector<int>, hybrid::kSeasonCount> places;
    /// "station/season: a = b" for every tied pair encountered.
    std::vector<std::string> ties;
};

/// Every (station, season) must rate the same predictor set exactly once.
Ranking rank_predictors(std::span<const NrmseEntry> table, TiePolicy ties = TiePolicy::NameOrder);

std::vector<NrmseEntry> read_nrmse_table(std::istream& in);
void write_nrmse_table(std::ostream& out, std::span<const NrmseEntry> table);
void write_ranking_text(std::ostream& out, const Ranking& ranking);
void write_ranking_csv(std::ostream& out, const Ranking& ranking);

// Reliability.

/// 100·(1 − |x̂ − x|/x), clamped to [0, 100]. Throws Error("zero_measurement")
/// when x ≤ 0.
double reliability(double measured, double predicted);

struct ReliabilitySeries {
    std::vector<double> eta;  ///< NaN where the measurement is zero
    std::size_t excluded = 0;
};
ReliabilitySeries reliability_index(std::span<const double> measured, std::span<const double> predicted);

/// x̂·(1 − η/100). Throws Error("bad_reliability") unless η ∈ [0, 100].
double interval_confidence(double predicted, double eta);

}  // namespace solarcast::eval
