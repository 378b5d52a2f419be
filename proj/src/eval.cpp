#include "solarcast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/solar_geometry.hpp"

namespace solarcast::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void same_length(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("length_mismatch", "measured and predicted differ in length");
    if (x.empty()) throw Error("empty_input", "no samples to evaluate");
}

}  // namespace

double nrmse(std::span<const double> x, std::span<const double> y) {
    same_length(x, y);
    double se = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        se += d * d;
        sx += x[i] * x[i];
    }
    if (!(sx > 0.0)) throw Error("zero_measurements", "all measurements are zero");
    return std::sqrt(se / sx);
}

double coefficient_of_variation(std::span<const double> v) {
    if (v.empty()) throw Error("empty_input", "no samples");
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (m == 0.0) throw Error("zero_mean", "coefficient of variation is undefined for a zero mean");
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / n) / m;
}

double persistence_forecast(std::span<const double> measured, std::size_t target) {
    if (target == 0 || target > measured.size())
        throw Error("cold_start", "persistence needs one earlier sample");
    return measured[target - 1];
}

double clearsky_forecast(const StationMeta& meta, Timestamp target) {
    return solar::clearsky_ghi(meta, solar::sample_instant(meta, target));
}

double Climatology::at(std::size_t slot) const {
    if (slot >= mean.size() || count[slot] == 0)
        throw Error("missing_climatology_slot", "no training samples for slot " + std::to_string(slot));
    return mean[slot];
}

double Climatology::at_or(std::size_t slot, double fallback) const noexcept {
    return slot < mean.size() && count[slot] > 0 ? mean[slot] : fallback;
}

Climatology slot_climatology(std::span<const double> values, std::span<const std::size_t> slots,
                             std::size_t slot_count) {
    if (values.size() != slots.size()) throw Error("length_mismatch", "values and slots differ in length");
    Climatology c;
    c.mean.assign(slot_count, 0.0);
    c.count.assign(slot_count, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) continue;
        if (slots[i] >= slot_count) throw Error("slot_misalignment", "slot index out of range");
        c.mean[slots[i]] += values[i];
        ++c.count[slots[i]];
    }
    for (std::size_t s = 0; s < slot_count; ++s)
        if (c.count[s] > 0) c.mean[s] /= static_cast<double>(c.count[s]);
    return c;
}

double average_forecast(const Climatology& training, std::size_t slot) { return training.at(slot); }

Scores score(std::string name, std::span<const double> measured, std::span<const double> predicted,
             std::span<const hybrid::Season> seasons) {
    same_length(measured, predicted);
    if (seasons.size() != measured.size()) throw Error("length_mismatch", "season tags differ in length");
    Scores s;
    s.name = std::move(name);
    s.samples = measured.size();
    s.annual = nrmse(measured, predicted);
    for (std::size_t k = 0; k < hybrid::kSeasonCount; ++k) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < measured.size(); ++i) {
            if (static_cast<std::size_t>(seasons[i]) != k) continue;
            x.push_back(measured[i]);
            y.push_back(predicted[i]);
        }
        s.seasonal[k] = x.empty() ? kNaN : nrmse(x, y);
    }
    return s;
}

TiePolicy parse_tie_policy(std::string_view text) {
    if (text == "name") return TiePolicy::NameOrder;
    if (text == "shared") return TiePolicy::Shared;
    throw Error("bad_tie_policy", "unknown tie policy '" + std::string(text) + "'");
}

std::string_view to_string(TiePolicy p) { return p == TiePolicy::NameOrder ? "name" : "shared"; }

namespace {

hybrid::Season parse_season(std::string_view s) {
    for (std::size_t k = 0; k < hybrid::kSeasonCount; ++k) {
        const auto season = static_cast<hybrid::Season>(k);
        if (hybrid::to_string(season) == s) return season;
    }
    throw Error("bad_season", "unknown season '" + std::string(s) + "'");
}

std::vector<int> competition_places(const std::vector<int>& totals) {
    std::vector<int> places(totals.size());
    for (std::size_t i = 0; i < totals.size(); ++i) {
        int better = 0;
        for (int t : totals) better += t < totals[i] ? 1 : 0;
        places[i] = better + 1;
    }
    return places;
}

}  // namespace

Ranking rank_predictors(std::span<const NrmseEntry> table, TiePolicy policy) {
    if (table.empty()) throw Error("empty_input", "empty nRMSE table");
    std::set<std::string> predictors, stations;
    for (const auto& e : table) {
        predictors.insert(e.predictor);
        stations.insert(e.station);
    }
    Ranking r;
    r.predictors.assign(predictors.begin(), predictors.end());
    r.stations.assign(stations.begin(), stations.end());
    const std::size_t np = r.predictors.size();

    // (station, season) → nRMSE per predictor position
    std::map<std::pair<std::string, std::size_t>, std::vector<double>> cells;
    for (const auto& e : table) {
        if (!std::isfinite(e.nrmse)) throw Error("bad_value", "non-finite nRMSE for " + e.predictor);
        auto& cell = cells[{e.station, static_cast<std::size_t>(e.season)}];
        if (cell.empty()) cell.assign(np, kNaN);
        const auto p = static_cast<std::size_t>(
            std::lower_bound(r.predictors.begin(), r.predictors.end(), e.predictor) - r.predictors.begin());
        if (!std::isnan(cell[p]))
            throw Error("duplicate_entry", e.station + "/" + std::string(hybrid::to_string(e.season)) + "/" +
                                               e.predictor + " appears twice");
        cell[p] = e.nrmse;
    }

    for (auto& pts : r.points) pts.assign(np, 0);
    for (const auto& [key, cell] : cells) {
        const auto& [station, season] = key;
        const std::string where = station + "/" + std::string(hybrid::to_string(static_cast<hybrid::Season>(season)));
        for (std::size_t p = 0; p < np; ++p)
            if (std::isnan(cell[p]))
                throw Error("incomplete_table", where + " has no entry for " + r.predictors[p]);

        std::vector<std::size_t> order(np);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cell[a] < cell[b]; });
        for (std::size_t k = 0; k < np; ++k) {
            int rank = static_cast<int>(k) + 1;
            if (policy == TiePolicy::Shared) {
                std::size_t first = k;
                while (first > 0 && cell[order[first - 1]] == cell[order[k]]) --first;
                rank = static_cast<int>(first) + 1;
            }
            if (k > 0 && cell[order[k - 1]] == cell[order[k]])
                r.ties.push_back(where + ": " + r.predictors[order[k - 1]] + " = " + r.predictors[order[k]]);
            r.points[season][order[k]] += rank;
        }
    }
    for (std::size_t s = 0; s < hybrid::kSeasonCount; ++s) r.places[s] = competition_places(r.points[s]);
    return r;
}

std::vector<NrmseEntry> read_nrmse_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("station,season,predictor,nrmse", 0) != 0)
        throw Error("schema_mismatch", "expected header station,season,predictor,nrmse");
    std::vector<NrmseEntry> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 4) throw Error("bad_row", "line " + std::to_string(lineno) + ": expected 4 fields");
        NrmseEntry e{f[0], parse_season(f[1]), f[2], 0.0};
        try {
            std::size_t used = 0;
            e.nrmse = std::stod(f[3], &used);
            if (used != f[3].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error("bad_value", "line " + std::to_string(lineno) + ": bad nRMSE '" + f[3] + "'");
        }
        out.push_back(std::move(e));
    }
    return out;
}

void write_nrmse_table(std::ostream& out, std::span<const NrmseEntry> table) {
    out << "station,season,predictor,nrmse\n";
    char buf[64];
    for (const auto& e : table) {
        std::snprintf(buf, sizeof buf, "%.10g", e.nrmse);
        out << e.station << ',' << hybrid::to_string(e.season) << ',' << e.predictor << ',' << buf << '\n';
    }
}

namespace {

std::string ordinal(int n) {
    const char* suffix = "th";
    if (n % 100 < 11 || n % 100 > 13) {
        if (n % 10 == 1) suffix = "st";
        else if (n % 10 == 2) suffix = "nd";
        else if (n % 10 == 3) suffix = "rd";
    }
    return std::to_string(n) + suffix;
}

}  // namespace

void write_ranking_text(std::ostream& out, const Ranking& r) {
    std::size_t width = 6;
    for (const auto& p : r.predictors) width = std::max(width, p.size());
    std::vector<std::size_t> order(r.predictors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        int sa = 0, sb = 0;
        for (std::size_t s = 0; s < hybrid::kSeasonCount; ++s) {
            sa += r.points[s][a];
            sb += r.points[s][b];
        }
        return sa < sb;
    });
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), "Models");
    out << buf;
    out << "  Winter          Spring          Summer          Autumn";
    out << '\n';
    for (std::size_t p : order) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), r.predictors[p].c_str());
        out << buf;
        for (std::size_t s = 0; s < hybrid::kSeasonCount; ++s) {
            const std::string cell = ordinal(r.places[s][p]) + " (" + std::to_string(r.points[s][p]) + " pts)";
            std::snprintf(buf, sizeof buf, s + 1 < hybrid::kSeasonCount ? "  %-14s" : "  %s", cell.c_str());
            out << buf;
        }
        out << '\n';
    }
    if (!r.ties.empty()) {
        out << "\nties:\n";
        for (const auto& t : r.ties) out << "  " << t << '\n';
    }
}

void write_ranking_csv(std::ostream& out, const Ranking& r) {
    out << "predictor,season,points,place\n";
    for (std::size_t p = 0; p < r.predictors.size(); ++p)
        for (std::size_t s = 0; s < hybrid::kSeasonCount; ++s)
            out << r.predictors[p] << ',' << hybrid::to_string(static_cast<hybrid::Season>(s)) << ','
                << r.points[s][p] << ',' << r.places[s][p] << '\n';
}

double reliability(double x, double xhat) {
    if (!(x > 0.0)) throw Error("zero_measurement", "reliability is undefined for a zero measurement");
    const double eta = 100.0 * (1.0 - std::abs(xhat - x) / x);
    return std::clamp(eta, 0.0, 100.0);
}

ReliabilitySeries reliability_index(std::span<const double> measured, std::span<const double> predicted) {
    same_length(measured, predicted);
    ReliabilitySeries r;
    r.eta.resize(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        if (measured[i] > 0.0) {
            r.eta[i] = reliability(measured[i], predicted[i]);
        } else {
            r.eta[i] = kNaN;
            ++r.excluded;
        }
    }
    return r;
}

double interval_confidence(double predicted, double eta) {
    if (!(eta >= 0.0 && eta <= 100.0)) throw Error("bad_reliability", "reliability must lie in [0, 100]");
    return predicted * (1.0 - eta / 100.0);
}

}  // namespace solarcast::eval
