#include "solarcast/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "solarcast/error.hpp"

namespace solarcast::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw Error("empty_series", "mean of an empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
    if (x.size() <= max_lag)
        throw Error("series_too_short", "acf needs more samples than lags");
    const double m = mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) throw Error("zero_variance", "zero variance");
    std::vector<double> rho(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < x.size(); ++t) ck += (x[t] - m) * (x[t - k] - m);
        rho[k - 1] = ck / c0;
    }
    return rho;
}

namespace {

// Durbin-Levinson. `phi` ends holding the order-K coefficients; `partial`
// collects φ_kk at each order.
void durbin_levinson(std::span<const double> rho, std::vector<double>& phi, std::vector<double>& partial,
                     double& v) {
    const std::size_t k_max = rho.size();
    phi.assign(k_max, 0.0);
    partial.assign(k_max, 0.0);
    std::vector<double> prev(k_max, 0.0);
    v = 1.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        double num = rho[k - 1];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j - 1] * rho[k - j - 1];
            den -= prev[j - 1] * rho[j - 1];
        }
        if (!(std::abs(den) > 1e-14))
            throw Error("singular_recursion", "singular recursion at lag " + std::to_string(k));
        const double a = num / den;
        phi[k - 1] = a;
        for (std::size_t j = 1; j < k; ++j) phi[j - 1] = prev[j - 1] - a * prev[k - j - 1];
        partial[k - 1] = a;
        v *= (1.0 - a * a);
        std::copy(phi.begin(), phi.end(), prev.begin());
    }
}

}  // namespace

std::vector<double> pacf(std::span<const double> rho) {
    if (rho.empty()) throw Error("empty_series", "pacf needs at least one autocorrelation");
    std::vector<double> phi, partial;
    double v = 1.0;
    durbin_levinson(rho, phi, partial, v);
    return partial;
}

std::vector<double> levinson_durbin(std::span<const double> rho, double* residual_ratio) {
    std::vector<double> phi, partial;
    double v = 1.0;
    if (!rho.empty()) durbin_levinson(rho, phi, partial, v);
    if (residual_ratio) *residual_ratio = v;
    return phi;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("length_mismatch", "pearson needs two series of equal length >= 2");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx, dy = y[k] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw Error("zero_variance", "zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double significance_bound(std::size_t n, double alpha) {
    if (n == 0) throw Error("empty_series", "significance bound of an empty sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bad_alpha", "alpha must lie in (0, 1)");
    const boost::math::normal_distribution<double> z;
    return boost::math::quantile(z, 1.0 - alpha / 2.0) / std::sqrt(static_cast<double>(n));
}

CorrelationProfile correlation_profile(std::span<const double> x, std::size_t max_lag, double alpha) {
    if (max_lag == 0) throw Error("bad_lag", "profile needs at least one lag");
    CorrelationProfile p;
    p.acf = acf(x, max_lag);
    p.pacf = pacf(p.acf);
    p.sample_size = x.size();
    p.significance_bound = significance_bound(x.size(), alpha);
    return p;
}

std::vector<std::size_t> select_endogenous_lags(const CorrelationProfile& profile, std::size_t max_lags,
                                                LagBasis basis) {
    const auto& r = basis == LagBasis::Acf ? profile.acf : profile.pacf;
    std::vector<std::size_t> lags;
    for (std::size_t k = 1; k <= std::min(max_lags, r.size()); ++k)
        if (std::abs(r[k - 1]) > profile.significance_bound) lags.push_back(k);
    if (lags.empty()) throw Error("no_significant_lags", "no significant lags");
    return lags;
}

std::vector<double> lagged_correlations(std::span<const double> x, std::span<const double> channel,
                                        std::size_t max_lag) {
    if (x.size() != channel.size()) throw Error("length_mismatch", "channel is not aligned with the series");
    std::vector<double> out;
    for (std::size_t k = 0; k <= max_lag && k + 2 <= x.size(); ++k)
        out.push_back(pearson(x.subspan(k), channel.first(channel.size() - k)));
    return out;
}

namespace {

std::size_t contiguous_count(std::span<const double> x, const std::optional<std::vector<double>>& channel,
                             double threshold, std::size_t max_lags) {
    if (!channel || max_lags == 0) return 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < max_lags && k + 2 <= x.size(); ++k) {
        double r = 0.0;
        try {
            r = pearson(x.subspan(k), std::span<const double>(*channel).first(channel->size() - k));
        } catch (const Error&) {
            break;  // constant channel carries nothing
        }
        if (!(std::abs(r) >= threshold)) break;
        ++count;
    }
    return count;
}

}  // namespace

ExogenousSelection select_exogenous_lags(std::span<const double> radiation, const ExogenousChannels& ch,
                                         const ExogenousThresholds& th) {
    auto check = [&](const std::optional<std::vector<double>>& c) {
        if (c && c->size() != radiation.size())
            throw Error("length_mismatch", "exogenous channel is not aligned with radiation");
    };
    check(ch.cloudiness);
    check(ch.pressure);
    check(ch.precipitation);
    ExogenousSelection s;
    s.cloudiness = contiguous_count(radiation, ch.cloudiness, th.cloudiness, th.max_lags);
    s.pressure = contiguous_count(radiation, ch.pressure, th.pressure, th.max_lags);
    s.precipitation = contiguous_count(radiation, ch.precipitation, th.precipitation, th.max_lags);
    return s;
}

void write_profile_csv(std::ostream& out, const CorrelationProfile& p) {
    std::string text = "lag,acf,pacf,bound\n";
    char buf[128];
    for (std::size_t k = 0; k < p.acf.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.10f,%.10f,%.10f\n", k + 1, p.acf[k], p.pacf[k],
                      p.significance_bound);
        text += buf;
    }
    out << text;
}

}  // namespace solarcast::stats
