#include "solarcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "solarcast/arma.hpp"
#include "solarcast/error.hpp"

namespace solarcast::pipeline {

namespace fs = std::filesystem;
using hybrid::Season;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v, const char* fmt = "%.10g") {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string pct(double v) { return std::isnan(v) ? "-" : num(100.0 * v, "%.2f"); }

std::ofstream create(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io_error", "cannot write " + path.string());
    return f;
}

fs::path artifact(const PipelineConfig& cfg, const char* name) {
    const fs::path p = cfg.out / name;
    if (!fs::exists(p)) throw Error("missing_artifact", std::string(name) + " not found; run the upstream command first");
    return p;
}

std::string join(std::span<const std::size_t> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// Minimal CSV table keyed by header names.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    static CsvTable load(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("missing_artifact", "cannot open " + path.filename().string());
        CsvTable t;
        std::string line;
        auto fields = [](const std::string& l) {
            std::vector<std::string> f;
            std::size_t start = 0;
            while (true) {
                const auto comma = l.find(',', start);
                f.push_back(l.substr(start, comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            return f;
        };
        if (!std::getline(in, line)) throw Error("schema_mismatch", path.filename().string() + " is empty");
        t.header = fields(line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto f = fields(line);
            if (f.size() != t.header.size())
                throw Error("schema_mismatch", path.filename().string() + ": ragged row");
            t.rows.push_back(std::move(f));
        }
        return t;
    }

    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error("schema_mismatch", "missing column '" + std::string(name) + "'");
    }

    [[nodiscard]] std::vector<double> numbers(std::string_view name) const {
        const std::size_t c = column(name);
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r[c].empty() ? kNaN : parse_number(r[c], name));
        return v;
    }

    [[nodiscard]] std::vector<std::string> strings(std::string_view name) const {
        const std::size_t c = column(name);
        std::vector<std::string> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r[c]);
        return v;
    }
};

Season parse_season(std::string_view s) {
    for (std::size_t k = 0; k < hybrid::kSeasonCount; ++k)
        if (hybrid::to_string(static_cast<Season>(k)) == s) return static_cast<Season>(k);
    throw Error("schema_mismatch", "unknown season '" + std::string(s) + "'");
}

stationarity::StationarizedSeries index_for(const HourlySeries& series, const StationMeta& meta,
                                            stationarity::Method method, std::size_t train_end,
                                            const std::optional<std::vector<double>>& pc) {
    if (method != stationarity::Method::CSI_PC) return stationarity::stationarize(series, meta, method);
    if (pc) return stationarity::stationarize(series, meta, method, *pc);
    const auto own = stationarity::periodic_coefficients(
        stationarity::to_clearsky_index(series.slice(0, train_end), meta));
    return stationarity::stationarize(series, meta, method, own);
}

}  // namespace

PipelineConfig PipelineConfig::from(const KeyValues& kv) {
    kv.require_known({"station", "data", "out", "column_timestamp", "column_radiation", "column_pressure",
                      "column_cloudiness", "column_precipitation", "method", "split", "max_missing_frac",
                      "arma_p_max", "arma_q_max", "architecture", "hidden", "hidden_grid", "max_lags",
                      "profile_lags", "alpha", "cloud_threshold", "other_threshold", "pressure_threshold",
                      "precipitation_threshold", "seasons", "seeds", "max_fail", "max_epochs", "mu_initial",
                      "goal", "compare_stationarization"});
    PipelineConfig c;
    if (kv.has("station")) c.station = kv.path("station");
    if (kv.has("data")) c.data = kv.path("data");
    if (kv.has("out")) c.out = kv.path("out");
    c.columns.timestamp = kv.text("column_timestamp", c.columns.timestamp);
    c.columns.radiation = kv.text("column_radiation", c.columns.radiation);
    c.columns.pressure = kv.text("column_pressure", c.columns.pressure);
    c.columns.cloudiness = kv.text("column_cloudiness", c.columns.cloudiness);
    c.columns.precipitation = kv.text("column_precipitation", c.columns.precipitation);
    c.method = stationarity::parse_method(kv.text("method", stationarity::to_string(c.method)));
    if (kv.has("split")) {
        const auto parts = kv.list("split");
        if (parts.size() != 3) throw Error("bad_config", "split needs three fractions");
        c.split = {parse_number(parts[0], "split"), parse_number(parts[1], "split"), parse_number(parts[2], "split")};
    }
    c.max_missing_frac = kv.number("max_missing_frac", c.max_missing_frac);
    c.arma.p_max = kv.unsigned_integer("arma_p_max", c.arma.p_max);
    c.arma.q_max = kv.unsigned_integer("arma_q_max", c.arma.q_max);
    if (const auto a = kv.get("architecture"); a && *a != "auto") c.architecture = mlp::MlpArchitecture::parse(*a);
    c.hidden = kv.unsigned_integer("hidden", c.hidden);
    if (kv.has("hidden_grid")) {
        c.hidden_grid.clear();
        for (const auto& h : kv.list("hidden_grid")) c.hidden_grid.push_back(parse_unsigned(h, "hidden_grid"));
    }
    c.max_lags = kv.unsigned_integer("max_lags", c.max_lags);
    c.profile_lags = kv.unsigned_integer("profile_lags", c.profile_lags);
    c.alpha = kv.number("alpha", c.alpha);
    c.thresholds.cloudiness = kv.number("cloud_threshold", c.thresholds.cloudiness);
    const double other = kv.number("other_threshold", c.thresholds.pressure);
    c.thresholds.pressure = kv.number("pressure_threshold", other);
    c.thresholds.precipitation = kv.number("precipitation_threshold", other);
    c.calendar = hybrid::parse_calendar(kv.text("seasons", hybrid::to_string(c.calendar)));
    if (kv.has("seeds")) {
        c.seeds.clear();
        for (const auto& s : kv.list("seeds")) c.seeds.push_back(parse_unsigned(s, "seeds"));
    }
    c.train.max_fail = kv.unsigned_integer("max_fail", c.train.max_fail);
    c.train.max_epochs = kv.unsigned_integer("max_epochs", c.train.max_epochs);
    c.train.mu_initial = kv.number("mu_initial", c.train.mu_initial);
    c.train.goal = kv.number("goal", c.train.goal);
    c.compare_stationarization = kv.flag("compare_stationarization", c.compare_stationarization);
    return c;
}

void PipelineConfig::validate() const {
    if (seeds.empty()) throw Error("bad_config", "at least one seed is required");
    if (hidden < 1) throw Error("bad_config", "hidden must be at least 1");
    if (max_lags < 1) throw Error("bad_config", "max_lags must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bad_config", "alpha must lie in (0, 1)");
    if (max_missing_frac < 0.0) throw Error("bad_config", "max_missing_frac must be non-negative");
    if (architecture) architecture->validate();
    train.validate();
}

hybrid::SeriesView Prepared::view() const { return {index.values, series.timestamps, &exo}; }

Prepared prepare(const PipelineConfig& cfg, std::optional<StationMeta> fitted,
                 std::optional<std::vector<double>> pc, std::ostream* diag) {
    if (cfg.data.empty()) throw Error("bad_config", "no data file configured");
    if (!fitted && cfg.station.empty()) throw Error("bad_config", "no station file configured");
    Prepared p;
    p.meta = fitted ? *fitted : load_station(cfg.station);

    auto raw = ingest::load_csv(cfg.data, cfg.columns);
    raw.station_id = p.meta.id;
    auto repaired = ingest::repair_missing(raw, cfg.max_missing_frac);
    p.repaired = repaired.repaired;
    p.repaired_fraction = repaired.fraction;
    p.exceeds_missing_ceiling = repaired.exceeds_ceiling;
    if (repaired.exceeds_ceiling && diag)
        *diag << "warning: " << num(100.0 * repaired.fraction, "%.2f") << "% of radiation samples were repaired\n";

    p.series = ingest::daytime_filter(repaired.series, p.meta);
    std::tie(p.train_end, p.validation_end) = ingest::split_bounds(p.series.size(), cfg.split);
    if (!p.meta.has_clearsky()) {
        p.solis = solar::fit_solis(p.series.slice(0, p.train_end), p.meta);
        p.meta.tau = p.solis->tau;
        p.meta.b = p.solis->b;
    }
    p.index = index_for(p.series, p.meta, cfg.method, p.train_end, pc);
    p.exo = ExogenousChannels::from(p.series);
    return p;
}

Prepared restationarize(const Prepared& base, stationarity::Method method) {
    Prepared p = base;
    p.index = index_for(p.series, p.meta, method, p.train_end, std::nullopt);
    return p;
}

LagChoice choose_lags(const Prepared& p, const PipelineConfig& cfg) {
    LagChoice c;
    const auto train = std::span<const double>(p.index.values).first(p.train_end);
    c.profile = stats::correlation_profile(train, std::max(cfg.profile_lags, cfg.max_lags), cfg.alpha);
    c.endogenous = stats::select_endogenous_lags(c.profile, cfg.max_lags);
    auto th = cfg.thresholds;
    th.max_lags = cfg.max_lags;
    c.exogenous = stats::select_exogenous_lags(train, p.exo.slice(0, p.train_end), th);
    if (cfg.architecture) {
        c.exo_arch = *cfg.architecture;
    } else {
        c.exo_arch.endo = *std::max_element(c.endogenous.begin(), c.endogenous.end());
        c.exo_arch.cloudiness = c.exogenous.cloudiness;
        c.exo_arch.pressure = c.exogenous.pressure;
        c.exo_arch.precipitation = c.exogenous.precipitation;
        c.exo_arch.hidden = cfg.hidden;
    }
    c.endo_arch = mlp::MlpArchitecture{c.exo_arch.endo, 0, 0, 0, c.exo_arch.hidden, 1};
    return c;
}

namespace {

mlp::MlpModel train_one(const Prepared& p, const mlp::MlpArchitecture& arch, std::uint64_t seed,
                        const mlp::TrainConfig& train) {
    const ExogenousChannels train_exo = p.exo.slice(0, p.train_end);
    const auto v = p.view();
    const hybrid::SeriesView tv{v.index.first(p.train_end), v.timestamps.first(p.train_end), &train_exo};
    return hybrid::fit_mlp(tv, v, p.train_end, p.validation_end, {arch, seed, train});
}

double best_validation(const mlp::MlpModel& m) {
    for (const auto& r : m.log)
        if (r.epoch == m.best_epoch) return r.validation_error;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

mlp::MlpModel train_best(const Prepared& p, const mlp::MlpArchitecture& arch, const PipelineConfig& cfg) {
    std::optional<mlp::MlpModel> best;
    for (const auto seed : cfg.seeds) {
        auto m = train_one(p, arch, seed, cfg.train);
        if (!best || best_validation(m) < best_validation(*best)) best = std::move(m);
    }
    return std::move(*best);
}

double to_radiation(const Prepared& p, std::size_t i, double v) { return std::max(0.0, v * p.index.scale(i)); }

std::vector<double> mlp_forecasts(const Prepared& p, const mlp::MlpModel& model, std::size_t first,
                                  std::size_t end) {
    std::vector<double> out;
    out.reserve(end > first ? end - first : 0);
    for (std::size_t target = first; target < end; ++target) {
        if (target == 0 || target < model.arch.max_lag())
            throw Error("insufficient_history", "not enough history before target " + std::to_string(target));
        const auto in = mlp::lagged_inputs(p.index.values, p.exo, model.arch, target - 1);
        out.push_back(mlp::forecast_one_step(model, in));
    }
    return out;
}

double validation_nrmse(const Prepared& p, const mlp::MlpModel& model) {
    const auto f = mlp_forecasts(p, model, p.train_end, p.validation_end);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < f.size(); ++i) {
        x.push_back(p.series.radiation[p.train_end + i]);
        y.push_back(to_radiation(p, p.train_end + i, f[i]));
    }
    return eval::nrmse(x, y);
}

void cmd_synth(const synth::Scenario& scenario, const fs::path& out) { synth::write_bundle(out, scenario); }

namespace {

std::vector<double> measured_window(const Prepared& p, std::size_t first, std::size_t end) {
    return {p.series.radiation.begin() + static_cast<std::ptrdiff_t>(first),
            p.series.radiation.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::vector<double> selected_radiation(const Prepared& p, std::span<const hybrid::SelectionRecord> log,
                                       double hybrid::SelectionRecord::*field) {
    std::vector<double> out;
    out.reserve(log.size());
    for (const auto& r : log) out.push_back(to_radiation(p, r.target, r.*field));
    return out;
}

void write_stationarization(const Prepared& p, const PipelineConfig& cfg, std::ostream* diag) {
    auto f = create(cfg.out / "stationarization.csv");
    f << "method,architecture,cv,nrmse\n";
    using stationarity::Method;
    for (const auto m : {Method::None, Method::CI, Method::CSI, Method::CSI_PC}) {
        const auto q = restationarize(p, m);
        const auto lags = choose_lags(q, cfg);
        const auto model = train_best(q, lags.exo_arch, cfg);
        const std::size_t first = std::max(q.validation_end, model.arch.max_lag());
        const auto fc = mlp_forecasts(q, model, first, q.series.size());
        std::vector<double> y;
        for (std::size_t i = 0; i < fc.size(); ++i) y.push_back(to_radiation(q, first + i, fc[i]));
        const auto x = measured_window(q, first, q.series.size());
        const auto test_index = std::span<const double>(q.index.values).subspan(first);
        f << stationarity::to_string(m) << ',' << model.arch.canonical() << ','
          << num(eval::coefficient_of_variation(test_index), "%.6f") << ',' << num(eval::nrmse(x, y), "%.6f")
          << '\n';
        if (diag) *diag << "stationarization " << stationarity::to_string(m) << " done\n";
    }
}

}  // namespace

void cmd_fit(const PipelineConfig& cfg, std::ostream* diag) {
    cfg.validate();
    fs::create_directories(cfg.out);
    const auto p = prepare(cfg, std::nullopt, std::nullopt, diag);
    {
        auto f = create(cfg.out / "station_fitted.txt");
        write_station(f, p.meta);
    }
    if (cfg.method == stationarity::Method::CSI_PC) {
        auto f = create(cfg.out / "pc.csv");
        stationarity::write_coefficients(f, p.index.periodic_coefficients);
    }
    const auto lags = choose_lags(p, cfg);
    {
        auto f = create(cfg.out / "profile.csv");
        stats::write_profile_csv(f, lags.profile);
    }

    const auto train = std::span<const double>(p.index.values).first(p.train_end);
    const auto order = arma::select_order(train, cfg.arma.p_max, cfg.arma.q_max);
    arma::save_model(cfg.out / "arma.model", order.model);
    if (diag) *diag << "arma (" << order.model.p << "," << order.model.q << ")\n";

    const auto exo_model = train_best(p, lags.exo_arch, cfg);
    mlp::save_model(cfg.out / "ann_exo.model", exo_model);
    if (diag) *diag << "ann exo " << exo_model.arch.canonical() << " best epoch " << exo_model.best_epoch << '\n';
    const auto endo_model = train_best(p, lags.endo_arch, cfg);
    mlp::save_model(cfg.out / "ann_endo.model", endo_model);
    if (diag) *diag << "ann endo " << endo_model.arch.canonical() << " best epoch " << endo_model.best_epoch << '\n';

    std::optional<hybrid::HybridModel> b;
    for (const auto seed : cfg.seeds) {
        auto h = hybrid::fit_hybrid(hybrid::Mode::B, p.view(), p.train_end, p.validation_end, cfg.arma,
                                    {lags.exo_arch, seed, cfg.train}, cfg.calendar);
        if (!b || best_validation(h.mlp) < best_validation(b->mlp)) b = std::move(h);
    }
    arma::save_model(cfg.out / "hybrid_b_arma.model", b->arma);
    mlp::save_model(cfg.out / "hybrid_b_ann.model", b->mlp);

    // Slot climatology of the reliability of in-sample mode C forecasts.
    const auto c = hybrid::combine(hybrid::Mode::C, order.model, exo_model, cfg.calendar);
    const std::size_t first = std::max<std::size_t>(c.warmup(), 1);
    const auto log = hybrid::run(c, p.view(), first, p.train_end);
    const auto eta = eval::reliability_index(measured_window(p, first, p.train_end),
                                             selected_radiation(p, log, &hybrid::SelectionRecord::selected_forecast));
    const auto slots = std::span<const std::size_t>(p.index.slots).subspan(first, log.size());
    const auto clim = eval::slot_climatology(eta.eta, slots, stationarity::kSlotsPerYear);
    double eta_sum = 0.0;
    std::size_t eta_n = 0;
    for (double e : eta.eta)
        if (!std::isnan(e)) {
            eta_sum += e;
            ++eta_n;
        }
    const double eta_mean = eta_n ? eta_sum / static_cast<double>(eta_n) : 0.0;
    {
        auto f = create(cfg.out / "eta_climatology.csv");
        f << "slot,eta,count\n";
        for (std::size_t s = 0; s < stationarity::kSlotsPerYear; ++s)
            f << s << ',' << num(clim.at_or(s, eta_mean), "%.6f") << ',' << clim.count[s] << '\n';
    }

    if (cfg.compare_stationarization) write_stationarization(p, cfg, diag);

    auto m = create(cfg.out / "manifest.txt");
    m << "station = " << p.meta.id << '\n'
      << "method = " << stationarity::to_string(cfg.method) << '\n'
      << "samples = " << p.series.size() << '\n'
      << "train_end = " << p.train_end << '\n'
      << "validation_end = " << p.validation_end << '\n'
      << "repaired = " << p.repaired << '\n'
      << "repaired_fraction = " << num(p.repaired_fraction, "%.6f") << '\n'
      << "tau = " << num(*p.meta.tau, "%.6f") << '\n'
      << "b = " << num(*p.meta.b, "%.6f") << '\n'
      << "solis_fitted = " << (p.solis ? "true" : "false") << '\n'
      << "endogenous_lags = " << join(lags.endogenous) << '\n'
      << "exogenous = N^" << lags.exogenous.cloudiness << ", P^" << lags.exogenous.pressure << ", RP^"
      << lags.exogenous.precipitation << '\n'
      << "arma_order = " << order.model.p << ',' << order.model.q << '\n'
      << "arma_fpe = " << num(order.model.fpe, "%.8f") << '\n'
      << "arma_residuals_white = " << (order.residuals_white ? "true" : "false") << '\n'
      << "arma_whiteness_violations = " << order.whiteness_violations << '\n'
      << "ann_exo = " << exo_model.arch.canonical() << '\n'
      << "ann_exo_best_epoch = " << exo_model.best_epoch << '\n'
      << "ann_exo_stop = " << mlp::to_string(exo_model.stop) << '\n'
      << "ann_endo = " << endo_model.arch.canonical() << '\n'
      << "ann_endo_best_epoch = " << endo_model.best_epoch << '\n'
      << "ann_endo_stop = " << mlp::to_string(endo_model.stop) << '\n'
      << "hybrid_b_arma_order = " << b->arma.p << ',' << b->arma.q << '\n'
      << "hybrid_b_arma_samples = " << b->arma_training.size() << '\n'
      << "hybrid_b_ann_samples = " << b->mlp_training.size() << '\n'
      << "seasons = " << hybrid::to_string(cfg.calendar) << '\n';
}

void cmd_forecast(const PipelineConfig& cfg, std::ostream* diag) {
    cfg.validate();
    const auto meta = load_station(artifact(cfg, "station_fitted.txt"));
    std::optional<std::vector<double>> pc;
    if (cfg.method == stationarity::Method::CSI_PC) pc = stationarity::load_coefficients(artifact(cfg, "pc.csv"));
    const auto p = prepare(cfg, meta, pc, diag);

    const auto ar = arma::load_model(artifact(cfg, "arma.model"));
    const auto exo_model = mlp::load_model(artifact(cfg, "ann_exo.model"));
    const auto endo_model = mlp::load_model(artifact(cfg, "ann_endo.model"));
    auto b = hybrid::combine(hybrid::Mode::B, arma::load_model(artifact(cfg, "hybrid_b_arma.model")),
                             mlp::load_model(artifact(cfg, "hybrid_b_ann.model")), cfg.calendar);
    const auto a = hybrid::combine(hybrid::Mode::A, ar, exo_model, cfg.calendar);
    const auto c = hybrid::combine(hybrid::Mode::C, ar, exo_model, cfg.calendar);

    const auto eta_table = CsvTable::load(artifact(cfg, "eta_climatology.csv"));
    const auto eta_slot = eta_table.numbers("eta");
    if (eta_slot.size() != stationarity::kSlotsPerYear)
        throw Error("schema_mismatch", "eta_climatology.csv must have one row per slot");

    const std::size_t first = p.validation_end, end = p.series.size();
    const std::size_t warm = std::max({a.warmup(), b.warmup(), endo_model.arch.max_lag(), std::size_t{1}});
    if (first < warm) throw Error("insufficient_history", "test block starts before the models are warm");
    if (first >= end) throw Error("empty_dataset", "test block is empty");

    const auto view = p.view();
    const auto log_a = hybrid::run(a, view, first, end);
    const auto log_b = hybrid::run(b, view, first, end);
    const auto log_c = hybrid::run(c, view, first, end);
    const auto endo = mlp_forecasts(p, endo_model, first, end);
    const auto avg = eval::slot_climatology(std::span<const double>(p.series.radiation).first(p.train_end),
                                            std::span<const std::size_t>(p.index.slots).first(p.train_end),
                                            stationarity::kSlotsPerYear);

    auto f = create(cfg.out / "forecast.csv");
    f << "timestamp,season,slot,measured,persistence,clear_sky,average,arma,ann_endo,ann_exo,hybrid_a,hybrid_b,"
         "hybrid_c,branch_a,branch_b,branch_c,eta_slot,ic\n";
    std::string text;
    for (std::size_t k = 0; k < end - first; ++k) {
        const std::size_t i = first + k;
        const Timestamp ts = p.series.timestamps[i];
        const std::size_t slot = p.index.slots[i];
        const double hc = to_radiation(p, i, log_c[k].selected_forecast);
        const double eta = eta_slot[slot];
        text += format_timestamp(ts);
        text += ',';
        text += hybrid::to_string(hybrid::season_of(ts, cfg.calendar));
        text += ',' + std::to_string(slot);
        for (double v : {p.series.radiation[i], eval::persistence_forecast(p.series.radiation, i),
                         eval::clearsky_forecast(p.meta, ts), eval::average_forecast(avg, slot),
                         to_radiation(p, i, log_c[k].ar_forecast), to_radiation(p, i, endo[k]),
                         to_radiation(p, i, log_c[k].ann_forecast), to_radiation(p, i, log_a[k].selected_forecast),
                         to_radiation(p, i, log_b[k].selected_forecast), hc})
            text += ',' + num(v);
        for (const auto* log : {&log_a, &log_b, &log_c}) {
            text += ',';
            text += hybrid::to_string((*log)[k].branch);
        }
        text += ',' + num(eta, "%.6f") + ',' + num(eval::interval_confidence(hc, eta)) + '\n';
    }
    f << text;

    const std::pair<const char*, const std::vector<hybrid::SelectionRecord>*> logs[] = {
        {"selection_a.csv", &log_a}, {"selection_b.csv", &log_b}, {"selection_c.csv", &log_c}};
    for (const auto& [name, log] : logs) {
        auto s = create(cfg.out / name);
        hybrid::write_selection_csv(s, *log);
    }
    if (diag) *diag << "forecast " << end - first << " test hours\n";
}

namespace {

struct Predictor {
    const char* name;
    const char* column;
};

constexpr Predictor kPredictors[] = {{"Persistence", "persistence"}, {"Clear Sky", "clear_sky"},
                                     {"Average", "average"},         {"ARMA", "arma"},
                                     {"ANN endo", "ann_endo"},       {"ANN exo", "ann_exo"}};
constexpr Predictor kHybrids[] = {{"A", "hybrid_a"}, {"B", "hybrid_b"}, {"C", "hybrid_c"}};

void write_score_table(std::ostream& out, const std::string& station, std::span<const eval::Scores> scores,
                       const char* first_column) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s %-12s %8s %8s %8s %8s %8s\n", "Station", first_column, "Annual", "Winter",
                  "Spring", "Summer", "Autumn");
    out << buf;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        std::snprintf(buf, sizeof buf, "%-14s %-12s %8s %8s %8s %8s %8s\n", i == 0 ? station.c_str() : "",
                      s.name.c_str(), pct(s.annual).c_str(), pct(s.seasonal[0]).c_str(), pct(s.seasonal[1]).c_str(),
                      pct(s.seasonal[2]).c_str(), pct(s.seasonal[3]).c_str());
        out << buf;
    }
}

}  // namespace

void cmd_evaluate(const PipelineConfig& cfg, std::ostream* diag) {
    const auto station = load_station(artifact(cfg, "station_fitted.txt")).id;
    const auto t = CsvTable::load(artifact(cfg, "forecast.csv"));
    const auto measured = t.numbers("measured");
    std::vector<Season> seasons;
    for (const auto& s : t.strings("season")) seasons.push_back(parse_season(s));

    std::vector<eval::Scores> singles, hybrids;
    for (const auto& pr : kPredictors) singles.push_back(eval::score(pr.name, measured, t.numbers(pr.column), seasons));
    for (const auto& pr : kHybrids) hybrids.push_back(eval::score(pr.name, measured, t.numbers(pr.column), seasons));

    {
        auto f = create(cfg.out / "table4.txt");
        f << "nRMSE (%) of the single predictors over the test block\n\n";
        write_score_table(f, station, singles, "Model");
    }
    {
        auto f = create(cfg.out / "table6.txt");
        f << "nRMSE (%) of the hybrid models over the test block\n\n";
        write_score_table(f, station, hybrids, "Model");
        f << '\n';
        for (const char* col : {"branch_a", "branch_b", "branch_c"}) {
            std::size_t ar = 0, ann = 0;
            for (const auto& b : t.strings(col)) (b == "arma" ? ar : ann)++;
            f << "mode " << static_cast<char>(std::toupper(col[7])) << ": " << ar << " ARMA / " << ann << " ANN\n";
        }
    }
    {
        auto f = create(cfg.out / "report.csv");
        f << "model,annual,winter,spring,summer,autumn,samples\n";
        for (const auto* group : {&singles, &hybrids})
            for (const auto& s : *group) {
                f << s.name << ',' << num(s.annual, "%.6f");
                for (double v : s.seasonal) f << ',' << num(v, "%.6f");
                f << ',' << s.samples << '\n';
            }
    }
    {
        std::vector<eval::NrmseEntry> entries;
        for (std::size_t k = 0; k < hybrid::kSeasonCount; ++k)
            for (const auto& s : singles)
                if (!std::isnan(s.seasonal[k]))
                    entries.push_back({station, static_cast<Season>(k), s.name, s.seasonal[k]});
        auto f = create(cfg.out / "nrmse_table.csv");
        eval::write_nrmse_table(f, entries);
    }
    {
        const auto hc = t.numbers("hybrid_c");
        const auto eta_slot = t.numbers("eta_slot");
        const auto ic = t.numbers("ic");
        const auto ts = t.strings("timestamp");
        const auto eta = eval::reliability_index(measured, hc);
        auto f = create(cfg.out / "reliability.csv");
        f << "timestamp,measured,forecast,eta,eta_slot,ic,lower,upper\n";
        std::string text;
        for (std::size_t i = 0; i < measured.size(); ++i)
            text += ts[i] + ',' + num(measured[i]) + ',' + num(hc[i]) + ',' + num(eta.eta[i], "%.4f") + ',' +
                    num(eta_slot[i], "%.4f") + ',' + num(ic[i]) + ',' + num(hc[i] - ic[i]) + ',' +
                    num(hc[i] + ic[i]) + '\n';
        f << text;
        if (diag && eta.excluded) *diag << eta.excluded << " zero-radiation hours excluded from reliability\n";
    }
    if (fs::exists(cfg.out / "stationarization.csv")) {
        const auto s = CsvTable::load(cfg.out / "stationarization.csv");
        auto f = create(cfg.out / "table3.txt");
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-14s %-12s %-32s %6s %7s\n", "Station", "Stationarity", "ANN Architecture",
                      "CV", "nRMSE");
        f << buf;
        const auto methods = s.strings("method");
        const auto arch = s.strings("architecture");
        const auto cv = s.numbers("cv");
        const auto e = s.numbers("nrmse");
        for (std::size_t i = 0; i < methods.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%-14s %-12s %-32s %6.2f %7.3f\n", i == 0 ? station.c_str() : "",
                          methods[i].c_str(), arch[i].c_str(), cv[i], e[i]);
            f << buf;
        }
    }
}

void cmd_rank(std::span<const fs::path> tables, const fs::path& out, eval::TiePolicy ties) {
    if (tables.empty()) throw Error("bad_config", "rank needs at least one nRMSE table");
    std::vector<eval::NrmseEntry> all;
    for (const auto& path : tables) {
        std::ifstream in(path);
        if (!in) throw Error("missing_artifact", "cannot open " + path.filename().string());
        auto part = eval::read_nrmse_table(in);
        all.insert(all.end(), part.begin(), part.end());
    }
    const auto r = eval::rank_predictors(all, ties);
    fs::create_directories(out);
    {
        auto f = create(out / "ranking.txt");
        eval::write_ranking_text(f, r);
    }
    auto f = create(out / "ranking.csv");
    eval::write_ranking_csv(f, r);
}

void cmd_sweep(const PipelineConfig& cfg, std::ostream* diag) {
    cfg.validate();
    if (cfg.hidden_grid.empty()) throw Error("bad_config", "hidden_grid is empty");
    fs::create_directories(cfg.out);
    const auto p = prepare(cfg, std::nullopt, std::nullopt, diag);
    const auto lags = choose_lags(p, cfg);

    auto runs = create(cfg.out / "sweep_runs.csv");
    runs << "hidden,seed,validation_nrmse,best_epoch\n";
    auto summary = create(cfg.out / "sweep.csv");
    summary << "hidden,runs,mean,sd,ci95_low,ci95_high\n";
    double best_mean = std::numeric_limits<double>::infinity();
    std::size_t best_h = 0;
    for (const auto h : cfg.hidden_grid) {
        auto arch = lags.exo_arch;
        arch.hidden = h;
        std::vector<double> scores;
        for (const auto seed : cfg.seeds) {
            const auto m = train_one(p, arch, seed, cfg.train);
            scores.push_back(validation_nrmse(p, m));
            runs << h << ',' << seed << ',' << num(scores.back(), "%.8f") << ',' << m.best_epoch << '\n';
        }
        const double n = static_cast<double>(scores.size());
        const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
        double ss = 0.0;
        for (double s : scores) ss += (s - mean) * (s - mean);
        const double sd = scores.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        const double half = 1.96 * sd / std::sqrt(n);
        summary << h << ',' << scores.size() << ',' << num(mean, "%.8f") << ',' << num(sd, "%.8f") << ','
                << num(mean - half, "%.8f") << ',' << num(mean + half, "%.8f") << '\n';
        if (mean < best_mean) {
            best_mean = mean;
            best_h = h;
        }
        if (diag) *diag << "hidden " << h << ": mean validation nRMSE " << num(mean, "%.4f") << '\n';
    }
    auto f = create(cfg.out / "sweep.txt");
    f << "architecture = " << lags.exo_arch.canonical() << '\n' << "best_hidden = " << best_h << '\n';
}

}  // namespace solarcast::pipeline
