#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "solarcast/config.hpp"
#include "solarcast/eval.hpp"
#include "solarcast/hybrid.hpp"
#include "solarcast/ingest.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/station.hpp"
#include "solarcast/stationarize.hpp"
#include "solarcast/stats.hpp"
#include "solarcast/synth.hpp"

namespace solarcast::pipeline {

struct PipelineConfig {
    std::filesystem::path station;
    std::filesystem::path data;
    std::filesystem::path out = "results";
    ingest::ColumnMap columns;
    stationarity::Method method = stationarity::Method::CSI;
    ingest::SplitSpec split;
    double max_missing_frac = ingest::kDefaultMaxMissingFraction;
    hybrid::ArmaSpec arma;
    std::optional<mlp::MlpArchitecture> architecture;  ///< derived from the lag selection when empty
    std::size_t hidden = 10;
    std::vector<std::size_t> hidden_grid{5, 10, 15};
    std::size_t max_lags = 10;
    std::size_t profile_lags = 24;
    double alpha = 0.05;
    stats::ExogenousThresholds thresholds;
    hybrid::SeasonCalendar calendar = hybrid::SeasonCalendar::Meteorological;
    std::vector<std::uint64_t> seeds{1};
    mlp::TrainConfig train;
    bool compare_stationarization = false;

    /// Reads every known key; unknown keys are rejected.
    static PipelineConfig from(const KeyValues& kv);
    /// Throws Error("bad_config") for an empty seed list or bad bounds.
    void validate() const;
};

/// Cleaned, daytime-only, stationarized history shared by every command.
struct Prepared {
    StationMeta meta;  ///< with clear-sky parameters
    std::optional<solar::SolisFit> solis;  ///< set when fitted here
    HourlySeries series;
    std::size_t repaired = 0;
    double repaired_fraction = 0.0;
    bool exceeds_missing_ceiling = false;
    std::size_t train_end = 0;
    std::size_t validation_end = 0;
    stationarity::StationarizedSeries index;
    ExogenousChannels exo;

    [[nodiscard]] hybrid::SeriesView view() const;
    [[nodiscard]] std::span<const double> measured() const { return series.radiation; }
};

/// Loads, repairs, filters, splits and stationarizes. Clear-sky parameters
/// come from `fitted` or the station file, else are fitted on the training
/// block; CSI+PC coefficients come from `pc` or are fitted on the training
/// block.
Prepared prepare(const PipelineConfig& cfg, std::optional<StationMeta> fitted = std::nullopt,
                 std::optional<std::vector<double>> pc = std::nullopt, std::ostream* diag = nullptr);

/// Stationarizes `base` with another method, reusing its split and station.
Prepared restationarize(const Prepared& base, stationarity::Method method);

struct LagChoice {
    stats::CorrelationProfile profile;
    std::vector<std::size_t> endogenous;
    stats::ExogenousSelection exogenous;
    mlp::MlpArchitecture exo_arch;
    mlp::MlpArchitecture endo_arch;
};
LagChoice choose_lags(const Prepared& p, const PipelineConfig& cfg);

/// Trains one network per seed and keeps the lowest validation error.
mlp::MlpModel train_best(const Prepared& p, const mlp::MlpArchitecture& arch, const PipelineConfig& cfg);

/// Validation-block nRMSE in Wh/m² of a network.
double validation_nrmse(const Prepared& p, const mlp::MlpModel& model);

/// Index forecasts of a network for targets [first, end).
std::vector<double> mlp_forecasts(const Prepared& p, const mlp::MlpModel& model, std::size_t first,
                                  std::size_t end);

/// Wh/m² value of an index forecast at sample i, clamped at zero.
double to_radiation(const Prepared& p, std::size_t i, double index_value);

void cmd_synth(const synth::Scenario& scenario, const std::filesystem::path& out);
void cmd_fit(const PipelineConfig& cfg, std::ostream* diag = nullptr);
void cmd_forecast(const PipelineConfig& cfg, std::ostream* diag = nullptr);
void cmd_evaluate(const PipelineConfig& cfg, std::ostream* diag = nullptr);
void cmd_rank(std::span<const std::filesystem::path> tables, const std::filesystem::path& out,
              eval::TiePolicy ties);
void cmd_sweep(const PipelineConfig& cfg, std::ostream* diag = nullptr);

}  // namespace solarcast::pipeline
