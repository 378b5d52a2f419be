#include "solarcast/hybrid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "solarcast/error.hpp"

namespace solarcast::hybrid {

namespace chr = std::chrono;

std::string_view to_string(Season s) {
    switch (s) {
        case Season::Winter: return "winter";
        case Season::Spring: return "spring";
        case Season::Summer: return "summer";
        case Season::Autumn: return "autumn";
    }
    return "winter";
}

std::string_view to_string(SeasonCalendar c) {
    return c == SeasonCalendar::Meteorological ? "meteorological" : "astronomical";
}

SeasonCalendar parse_calendar(std::string_view text) {
    if (text == "meteorological") return SeasonCalendar::Meteorological;
    if (text == "astronomical") return SeasonCalendar::Astronomical;
    throw Error("bad_calendar", "unknown season calendar '" + std::string(text) + "'");
}

Season season_of(Timestamp ts, SeasonCalendar calendar) {
    const chr::year_month_day ymd{chr::floor<chr::days>(ts)};
    const unsigned m = static_cast<unsigned>(ymd.month());
    if (calendar == SeasonCalendar::Meteorological) {
        if (m == 12 || m <= 2) return Season::Winter;
        if (m <= 5) return Season::Spring;
        if (m <= 8) return Season::Summer;
        return Season::Autumn;
    }
    const unsigned md = m * 100 + static_cast<unsigned>(ymd.day());
    if (md >= 1221 || md < 321) return Season::Winter;
    if (md < 621) return Season::Spring;
    if (md < 923) return Season::Summer;
    return Season::Autumn;
}

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::A: return "A";
        case Mode::B: return "B";
        case Mode::C: return "C";
    }
    return "A";
}

Mode parse_mode(std::string_view text) {
    if (text == "A" || text == "a") return Mode::A;
    if (text == "B" || text == "b") return Mode::B;
    if (text == "C" || text == "c") return Mode::C;
    throw Error("bad_mode", "unknown hybrid mode '" + std::string(text) + "'");
}

std::string_view to_string(Branch b) { return b == Branch::Arma ? "arma" : "ann"; }

Branch seasonal_rule(Season origin_season) noexcept {
    return origin_season == Season::Spring || origin_season == Season::Summer ? Branch::Arma : Branch::Ann;
}

Branch residual_rule(double arma_residual, double ann_residual) noexcept {
    return std::abs(arma_residual) <= std::abs(ann_residual) ? Branch::Arma : Branch::Ann;
}

std::size_t HybridModel::warmup() const noexcept {
    return std::max(arma.p, mlp.arch.max_lag());
}

arma::ArmaModel fit_arma(std::span<const double> values, const ArmaSpec& spec) {
    return arma::select_order(values, spec.p_max, spec.q_max).model;
}

mlp::MlpModel fit_mlp(const SeriesView& train, const SeriesView& validation, std::size_t validation_begin,
                      std::size_t validation_end, const MlpSpec& spec) {
    if (validation_begin == 0 || validation_end <= validation_begin)
        throw Error("empty_dataset", "validation block is empty");
    const auto train_rows = mlp::make_dataset(train.index, *train.exo, spec.arch);
    const auto val_rows =
        mlp::make_dataset(validation.index, *validation.exo, spec.arch, validation_begin - 1, validation_end - 1);
    if (train_rows.size() == 0) throw Error("empty_dataset", "training block is shorter than the input window");
    return mlp::train_lm(mlp::build(spec.arch, spec.seed), train_rows, val_rows, spec.train);
}

HybridModel combine(Mode mode, arma::ArmaModel arma, mlp::MlpModel mlp, SeasonCalendar calendar) {
    HybridModel h;
    h.mode = mode;
    h.calendar = calendar;
    h.arma = std::move(arma);
    h.mlp = std::move(mlp);
    return h;
}

namespace {

std::vector<std::size_t> iota_n(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace

HybridModel fit_hybrid(Mode mode, const SeriesView& history, std::size_t train_end, std::size_t validation_end,
                       const ArmaSpec& arma_spec, const MlpSpec& mlp_spec, SeasonCalendar calendar) {
    if (train_end > history.size() || validation_end > history.size() || validation_end < train_end)
        throw Error("bad_split", "training/validation bounds exceed the history");
    HybridModel h;
    h.mode = mode;
    h.calendar = calendar;

    if (mode != Mode::B) {
        h.arma_training = iota_n(train_end);
        h.mlp_training = h.arma_training;
        h.arma = fit_arma(history.index.first(train_end), arma_spec);
        const ExogenousChannels train_exo = history.exo->slice(0, train_end);
        const SeriesView train{history.index.first(train_end), history.timestamps.first(train_end), &train_exo};
        h.mlp = fit_mlp(train, history, train_end, validation_end, mlp_spec);
        return h;
    }

    for (std::size_t i = 0; i < train_end; ++i) {
        const bool warm = seasonal_rule(season_of(history.timestamps[i], calendar)) == Branch::Arma;
        (warm ? h.arma_training : h.mlp_training).push_back(i);
    }
    if (h.arma_training.empty() || h.mlp_training.empty())
        throw Error("empty_season_subset", "mode B needs both spring/summer and autumn/winter training samples");

    std::vector<double> warm_values;
    warm_values.reserve(h.arma_training.size());
    for (std::size_t i : h.arma_training) warm_values.push_back(history.index[i]);
    h.arma = fit_arma(warm_values, arma_spec);

    std::vector<double> cold_values;
    std::vector<Timestamp> cold_times;
    for (std::size_t i : h.mlp_training) {
        cold_values.push_back(history.index[i]);
        cold_times.push_back(history.timestamps[i]);
    }
    const ExogenousChannels cold_exo = history.exo->select(h.mlp_training);
    const SeriesView cold{cold_values, cold_times, &cold_exo};
    h.mlp = fit_mlp(cold, history, train_end, validation_end, mlp_spec);
    return h;
}

namespace {

SelectionRecord step(const HybridModel& model, const SeriesView& history, std::size_t target,
                     const SelectionRecord* previous, std::span<const double> ma_residuals) {
    if (target == 0 || target > history.size() || target < model.warmup())
        throw Error("insufficient_history", "not enough history before target " + std::to_string(target));
    const std::size_t t = target - 1;
    SelectionRecord r;
    r.target = target;
    r.origin = history.timestamps[t];
    r.timestamp = target < history.timestamps.size() ? history.timestamps[target] : r.origin + chr::hours(1);

    r.ar_forecast = arma::forecast_one_step(model.arma, history.index.first(target),
                                            model.arma.q > 0 ? ma_residuals.first(target) : ma_residuals);
    const auto inputs = mlp::lagged_inputs(history.index, *history.exo, model.mlp.arch, t);
    r.ann_forecast = mlp::forecast_one_step(model.mlp, inputs);

    if (model.mode == Mode::C && previous != nullptr) {
        r.branch = residual_rule(previous->ar_residual, previous->ann_residual);
    } else {
        r.branch = seasonal_rule(season_of(r.origin, model.calendar));
        r.cold_start = model.mode == Mode::C;
    }
    r.selected_forecast = r.branch == Branch::Arma ? r.ar_forecast : r.ann_forecast;
    return r;
}

}  // namespace

SelectionRecord forecast_one_step(const HybridModel& model, const SeriesView& history, std::size_t target,
                                  const SelectionRecord* previous) {
    std::vector<double> e;
    if (model.arma.q > 0 && target <= history.size()) e = arma::residuals(model.arma, history.index.first(target));
    return step(model, history, target, previous, e);
}

std::vector<SelectionRecord> run(const HybridModel& model, const SeriesView& history, std::size_t first,
                                 std::size_t end) {
    if (end > history.size()) throw Error("insufficient_history", "forecast window exceeds the history");
    std::vector<SelectionRecord> log;
    log.reserve(end > first ? end - first : 0);
    std::vector<double> e;
    if (model.arma.q > 0) e = arma::residuals(model.arma, history.index);
    for (std::size_t target = first; target < end; ++target) {
        SelectionRecord r = step(model, history, target, log.empty() ? nullptr : &log.back(), e);
        const double x = history.index[target];
        r.ar_residual = x - r.ar_forecast;
        r.ann_residual = x - r.ann_forecast;
        log.push_back(r);
    }
    return log;
}

BranchShares branch_shares(std::span<const SelectionRecord> log) {
    if (log.empty()) throw Error("empty_log", "no forecasts have been logged");
    BranchShares s;
    for (const auto& r : log) (r.branch == Branch::Arma ? s.arma : s.ann)++;
    return s;
}

void write_selection_csv(std::ostream& out, std::span<const SelectionRecord> log) {
    out << "timestamp,branch,ar_forecast,ann_forecast,ar_residual,ann_residual,selected_forecast,origin,cold_start\n";
    char buf[256];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, ",%s,%.10g,%.10g,%.10g,%.10g,%.10g,", to_string(r.branch).data(),
                      r.ar_forecast, r.ann_forecast, r.ar_residual, r.ann_residual, r.selected_forecast);
        out << format_timestamp(r.timestamp) << buf << format_timestamp(r.origin) << ',' << (r.cold_start ? 1 : 0)
            << '\n';
    }
}

}  // namespace solarcast::hybrid
