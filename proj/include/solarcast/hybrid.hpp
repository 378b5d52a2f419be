#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "solarcast/arma.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/series.hpp"
#include "solarcast/time.hpp"

namespace solarcast::hybrid {

enum class Season { Winter, Spring, Summer, Autumn };
inline constexpr std::size_t kSeasonCount = 4;

enum class SeasonCalendar {
    Meteorological,  ///< Dec-Feb, Mar-May, Jun-Aug, Sep-Nov
    Astronomical     ///< split at Mar 21, Jun 21, Sep 23, Dec 21
};

std::string_view to_string(Season s);
std::string_view to_string(SeasonCalendar c);
SeasonCalendar parse_calendar(std::string_view text);
Season season_of(Timestamp ts, SeasonCalendar calendar = SeasonCalendar::Meteorological);

enum class Mode { A, B, C };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

enum class Branch { Arma, Ann };
std::string_view to_string(Branch b);

/// Spring or summer goes to ARMA, autumn or winter to the network.
Branch seasonal_rule(Season origin_season) noexcept;
/// ARMA when |ε_AR| ≤ |ε_ANN|.
Branch residual_rule(double arma_residual, double ann_residual) noexcept;

/// Contiguous index-space history: stationarized values, their timestamps
/// and the raw exogenous channels, all the same length.
struct SeriesView {
    std::span<const double> index;
    std::span<const Timestamp> timestamps;
    const ExogenousChannels* exo = nullptr;

    [[nodiscard]] std::size_t size() const noexcept { return index.size(); }
};

struct ArmaSpec {
    std::size_t p_max = 5;
    std::size_t q_max = 0;
};

struct MlpSpec {
    mlp::MlpArchitecture arch;
    std::uint64_t seed = 1;
    mlp::TrainConfig train;
};

struct HybridModel {
    Mode mode = Mode::A;
    SeasonCalendar calendar = SeasonCalendar::Meteorological;
    arma::ArmaModel arma;
    mlp::MlpModel mlp;
    /// Positions in the fitting history seen by each branch.
    std::vector<std::size_t> arma_training;
    std::vector<std::size_t> mlp_training;

    [[nodiscard]] std::size_t warmup() const noexcept;
};

/// Order selection plus Yule-Walker on `values`.
arma::ArmaModel fit_arma(std::span<const double> values, const ArmaSpec& spec);

/// Trains on every supervised row of `train`; early stopping uses the rows of
/// `validation` whose targets fall in [validation_begin, validation_end).
mlp::MlpModel fit_mlp(const SeriesView& train, const SeriesView& validation, std::size_t validation_begin,
                      std::size_t validation_end, const MlpSpec& spec);

/// Modes A and C reuse branches fitted on the whole training block.
HybridModel combine(Mode mode, arma::ArmaModel arma, mlp::MlpModel mlp,
                    SeasonCalendar calendar = SeasonCalendar::Meteorological);

/// Fits both branches from `history`: samples [0, train_end) train,
/// [train_end, validation_end) drive early stopping. Mode B restricts the
/// ARMA branch to spring/summer samples and the network to autumn/winter
/// ones (Error("empty_season_subset") when either is empty).
HybridModel fit_hybrid(Mode mode, const SeriesView& history, std::size_t train_end, std::size_t validation_end,
                       const ArmaSpec& arma_spec, const MlpSpec& mlp_spec,
                       SeasonCalendar calendar = SeasonCalendar::Meteorological);

/// One logged forecast of index value at `target` from origin `target - 1`.
struct SelectionRecord {
    std::size_t target = 0;
    Timestamp origin{};
    Timestamp timestamp{};  ///< of the target
    Branch branch = Branch::Arma;
    double ar_forecast = 0.0;
    double ann_forecast = 0.0;
    double ar_residual = 0.0;   ///< measured minus forecast
    double ann_residual = 0.0;
    double selected_forecast = 0.0;
    bool cold_start = false;
};

/// Forecast for `target` from everything up to `target - 1`. Mode C uses the
/// residuals of `previous`; without one it applies the seasonal rule and
/// marks the record as a cold start. Residuals are left at zero.
SelectionRecord forecast_one_step(const HybridModel& model, const SeriesView& history, std::size_t target,
                                  const SelectionRecord* previous);

/// Forecasts every target in [first, end), filling residuals from `history`.
std::vector<SelectionRecord> run(const HybridModel& model, const SeriesView& history, std::size_t first,
                                 std::size_t end);

struct BranchShares {
    std::size_t arma = 0;
    std::size_t ann = 0;
};
BranchShares branch_shares(std::span<const SelectionRecord> log);

void write_selection_csv(std::ostream& out, std::span<const SelectionRecord> log);

}  // namespace solarcast::hybrid
