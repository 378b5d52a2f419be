#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "solarcast/series.hpp"

namespace solarcast::stats {

double mean(std::span<const double> x);

/// Sample autocorrelations ρ_1..ρ_K (biased estimator: lag-k cross products
/// over the total sum of squares). Throws Error("zero_variance").
std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

/// Partial autocorrelations ρ_11..ρ_KK from ρ_1..ρ_K via the Durbin-Levinson
/// recursion. Throws Error("singular_recursion") when the prediction error
/// variance collapses.
std::vector<double> pacf(std::span<const double> rho);

/// Solves the order-p Yule-Walker system for autocorrelations ρ_1..ρ_p with
/// the same recursion. Returns φ_1..φ_p and writes the normalised innovation
/// variance (σ²/γ_0) to `residual_ratio` when given.
std::vector<double> levinson_durbin(std::span<const double> rho, double* residual_ratio = nullptr);

/// Pearson correlation. Throws Error("zero_variance") for a constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Two-sided critical |ρ| for a sample of n at level alpha: z_{1-α/2}/√n.
double significance_bound(std::size_t n, double alpha = 0.05);

struct CorrelationProfile {
    std::vector<double> acf;   ///< lags 1..K
    std::vector<double> pacf;  ///< lags 1..K
    std::size_t sample_size = 0;
    double significance_bound = 0.0;
};

CorrelationProfile correlation_profile(std::span<const double> x, std::size_t max_lag, double alpha = 0.05);

enum class LagBasis { Acf, Pacf };

/// Lags 1..max_lags whose |correlation| exceeds the profile's bound, in
/// increasing order. Throws Error("no_significant_lags") when none qualify.
std::vector<std::size_t> select_endogenous_lags(const CorrelationProfile& profile, std::size_t max_lags = 10,
                                                LagBasis basis = LagBasis::Acf);

/// R between x(t) and channel(t - k) for k = 0..max_lag.
std::vector<double> lagged_correlations(std::span<const double> x, std::span<const double> channel,
                                        std::size_t max_lag);

struct ExogenousThresholds {
    double cloudiness = 0.50;
    double pressure = 0.15;
    double precipitation = 0.15;
    std::size_t max_lags = 10;
};

/// Contiguous lag counts per channel: lags t, t-1, ... are kept while
/// |R| stays at or above the channel threshold.
struct ExogenousSelection {
    std::size_t cloudiness = 0;
    std::size_t pressure = 0;
    std::size_t precipitation = 0;
};

ExogenousSelection select_exogenous_lags(std::span<const double> radiation, const ExogenousChannels& channels,
                                         const ExogenousThresholds& thresholds = {});

/// `lag,acf,pacf,bound` rows.
void write_profile_csv(std::ostream& out, const CorrelationProfile& profile);

}  // namespace solarcast::stats
